#include "bnsens/factor.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bnsens/error.hpp"
#include "bnsens/kernels.hpp"

namespace bnsens {

namespace {

using kernels::Index;

std::size_t product_of(std::span<const std::size_t> cards) {
  return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
}

/// Row-major strides of `vars` inside a factor laid out over `layout`; zero for
/// variables the factor does not carry.
std::vector<std::size_t> strides_in(std::span<const VarId> vars, std::span<const VarId> layout,
                                    std::span<const std::size_t> layout_cards) {
  std::vector<std::size_t> layout_strides(layout.size());
  std::size_t s = 1;
  for (std::size_t i = layout.size(); i-- > 0;) {
    layout_strides[i] = s;
    s *= layout_cards[i];
  }
  std::vector<std::size_t> out(vars.size(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto it = std::find(layout.begin(), layout.end(), vars[i]);
    if (it != layout.end()) out[i] = layout_strides[static_cast<std::size_t>(it - layout.begin())];
  }
  return out;
}

/// For each entry of a table over (`vars`, `cards`) in row-major order, the
/// offset obtained from `strides`.
std::vector<Index> offsets(std::span<const std::size_t> cards, std::span<const std::size_t> strides) {
  const std::size_t n = product_of(cards);
  std::vector<Index> out(n);
  std::vector<std::size_t> digit(cards.size(), 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<Index>(offset);
    for (std::size_t k = cards.size(); k-- > 0;) {
      if (++digit[k] < cards[k]) {
        offset += strides[k];
        break;
      }
      offset -= strides[k] * (cards[k] - 1);
      digit[k] = 0;
    }
  }
  return out;
}

}  // namespace

Factor::Factor(std::vector<VarId> vars, std::vector<std::size_t> cards, std::vector<double> values)
    : vars_(std::move(vars)), cards_(std::move(cards)), values_(std::move(values)) {
  if (vars_.size() != cards_.size() || values_.size() != product_of(cards_))
    throw precondition_error(Errc::bad_table, "factor shape mismatch");
  if (values_.size() > std::numeric_limits<Index>::max() / 2)
    throw precondition_error(Errc::too_large, "factor exceeds the 2^31 entry limit");
}

Factor Factor::constant(double value) {
  Factor f;
  f.values_[0] = value;
  return f;
}

Factor Factor::from_cpt(const Cpt& cpt) {
  std::vector<VarId> vars(cpt.parents().begin(), cpt.parents().end());
  std::vector<std::size_t> cards(cpt.parent_cardinalities().begin(), cpt.parent_cardinalities().end());
  vars.push_back(cpt.variable());
  cards.push_back(cpt.cardinality());
  return Factor(std::move(vars), std::move(cards),
                std::vector<double>(cpt.table().begin(), cpt.table().end()));
}

Factor Factor::indicator(VarId var, std::size_t card, std::size_t state) {
  std::vector<double> values(card, 0.0);
  values.at(state) = 1.0;
  return Factor({var}, {card}, std::move(values));
}

bool Factor::contains(VarId v) const noexcept {
  return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
}

Factor Factor::product(const Factor& other) const {
  std::vector<VarId> vars = vars_;
  std::vector<std::size_t> cards = cards_;
  for (std::size_t i = 0; i < other.vars_.size(); ++i) {
    if (!contains(other.vars_[i])) {
      vars.push_back(other.vars_[i]);
      cards.push_back(other.cards_[i]);
    }
  }
  const auto ia = offsets(cards, strides_in(vars, vars_, cards_));
  const auto ib = offsets(cards, strides_in(vars, other.vars_, other.cards_));
  std::vector<double> values(ia.size());
  kernels::multiply_gather(values, values_, ia, other.values_, ib);
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::marginalize_onto(std::span<const VarId> keep) const {
  std::vector<std::size_t> keep_cards;
  for (const VarId v : keep) {
    const auto it = std::find(vars_.begin(), vars_.end(), v);
    if (it == vars_.end()) throw precondition_error(Errc::bad_table, "marginalizing onto a foreign variable");
    keep_cards.push_back(cards_[static_cast<std::size_t>(it - vars_.begin())]);
  }

  // Reorder so summed variables are most significant; the sum then becomes a
  // sequence of whole-block additions.
  std::vector<VarId> order;
  std::vector<std::size_t> order_cards;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (std::find(keep.begin(), keep.end(), vars_[i]) == keep.end()) {
      order.push_back(vars_[i]);
      order_cards.push_back(cards_[i]);
    }
  }
  const std::size_t blocks = product_of(order_cards);
  order.insert(order.end(), keep.begin(), keep.end());
  order_cards.insert(order_cards.end(), keep_cards.begin(), keep_cards.end());

  std::vector<double> out(product_of(keep_cards));
  if (std::equal(order.begin(), order.end(), vars_.begin(), vars_.end())) {
    kernels::accumulate_blocks(out, values_, blocks);
  } else {
    const auto idx = offsets(order_cards, strides_in(order, vars_, cards_));
    std::vector<double> permuted(values_.size());
    kernels::gather(permuted, values_, idx);
    kernels::accumulate_blocks(out, permuted, blocks);
  }
  return Factor(std::vector<VarId>(keep.begin(), keep.end()), std::move(keep_cards), std::move(out));
}

double Factor::total() const noexcept {
  double sum = 0.0;
  for (const double v : values_) sum += v;
  return sum;
}

}  // namespace bnsens
