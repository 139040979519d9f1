#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnsens/model.hpp"

namespace bnsens {

/// Dense table over a set of discrete variables, first variable most
/// significant. A CPT converts to a factor over (parents..., child) with the
/// same memory layout.
class Factor {
 public:
  /// The constant 1.
  Factor() : values_{1.0} {}
  Factor(std::vector<VarId> vars, std::vector<std::size_t> cards, std::vector<double> values);

  static Factor constant(double value);
  static Factor from_cpt(const Cpt& cpt);
  /// 1 at `state` and 0 elsewhere, over a single variable.
  static Factor indicator(VarId var, std::size_t card, std::size_t state);

  std::span<const VarId> vars() const noexcept { return vars_; }
  std::span<const std::size_t> cards() const noexcept { return cards_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool contains(VarId v) const noexcept;

  /// Result variables: this factor's, then the other's new ones.
  Factor product(const Factor& other) const;
  /// Sums out everything not in `keep`; result variables follow `keep`'s order.
  Factor marginalize_onto(std::span<const VarId> keep) const;
  /// Sum of all entries, left to right.
  double total() const noexcept;

 private:
  std::vector<VarId> vars_;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
};

}  // namespace bnsens
