#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnsens {

using VarId = std::size_t;

struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const noexcept { return states.size(); }
  bool binary() const noexcept { return states.size() == 2; }
  std::optional<std::size_t> state_index(std::string_view label) const;
};

/// Observed states keyed by variable name. A map, so each variable appears once.
using Evidence = std::map<std::string, std::string>;

/// Resolved evidence: one slot per variable, empty when unobserved.
using Observation = std::vector<std::optional<std::size_t>>;

/// Names one CPT entry theta_{state | parent instantiation}.
///
/// `parents` may list the parent assignments in any order; references produced
/// by the library use the CPT's declared parent order.
struct ParameterRef {
  std::string variable;
  std::string state;
  std::vector<std::pair<std::string, std::string>> parents;

  friend bool operator==(const ParameterRef&, const ParameterRef&) = default;
};

/// Additive change to one entry. For binary variables the complementary entry
/// of the same row absorbs -delta.
struct ParameterDelta {
  ParameterRef target;
  double delta = 0.0;
};

/// Table coordinates of a parameter once resolved against a network.
struct Cell {
  VarId variable = 0;
  std::size_t row = 0;
  std::size_t state = 0;

  auto operator<=>(const Cell&) const = default;
};

/// Conditional probability table of one variable.
///
/// Layout: `table[row * cardinality + state]`, where `row` enumerates parent
/// instantiations with the first listed parent most significant and each
/// parent's states in declared order.
class Cpt {
 public:
  Cpt(VarId variable, std::size_t cardinality, std::vector<VarId> parents,
      std::vector<std::size_t> parent_cardinalities, std::vector<double> table);

  VarId variable() const noexcept { return variable_; }
  std::size_t cardinality() const noexcept { return cardinality_; }
  std::span<const VarId> parents() const noexcept { return parents_; }
  std::span<const std::size_t> parent_cardinalities() const noexcept { return parent_cards_; }
  std::size_t rows() const noexcept { return table_.size() / cardinality_; }

  std::span<const double> table() const noexcept { return table_; }
  std::span<const double> row(std::size_t r) const;
  double at(std::size_t row, std::size_t state) const;

  bool locked(std::size_t row, std::size_t state) const;
  /// True when any entry of the row is locked; a binary row cannot co-vary then.
  bool row_locked(std::size_t row) const;
  std::size_t lock_count() const noexcept;

  std::size_t row_index(std::span<const std::size_t> parent_states) const;
  std::vector<std::size_t> row_assignment(std::size_t row) const;

 private:
  friend class BayesianNetwork;

  VarId variable_;
  std::size_t cardinality_;
  std::vector<VarId> parents_;
  std::vector<std::size_t> parent_cards_;
  std::vector<double> table_;
  std::vector<bool> locks_;
};

/// A discrete Bayesian network. Values are cheap to copy at desk scale, and
/// every mutating free function returns a new network.
class BayesianNetwork {
 public:
  /// Adds a variable with a uniform, parentless CPT.
  VarId add_variable(std::string name, std::vector<std::string> states);

  /// Replaces the CPT of `variable`. Checks shape only; probabilistic
  /// invariants are reported by validate_network.
  void set_cpt(std::string_view variable, const std::vector<std::string>& parents,
               std::vector<double> table);

  void set_lock(const ParameterRef& parameter, bool locked = true);
  void set_lock(const Cell& cell, bool locked = true);

  std::size_t size() const noexcept { return variables_.size(); }
  std::span<const Variable> variables() const noexcept { return variables_; }
  const Variable& variable(VarId id) const { return variables_.at(id); }
  const Cpt& cpt(VarId id) const { return cpts_.at(id); }

  std::optional<VarId> find(std::string_view name) const;
  /// Like find, but throws Errc::unknown_variable.
  VarId id(std::string_view name) const;

  std::vector<VarId> children(VarId id) const;
  /// The variable together with its parents.
  std::vector<VarId> family(VarId id) const;

  Cell resolve(const ParameterRef& parameter) const;
  ParameterRef describe(const Cell& cell) const;
  double theta(const Cell& cell) const;

  Observation observe(const Evidence& evidence) const;

  /// Copy with one raw entry overwritten, rows deliberately left unnormalized.
  /// Used for multilinear probing.
  BayesianNetwork with_entry(const Cell& cell, double value) const;
  /// Copy with one row replaced (no normalization check).
  BayesianNetwork with_row(VarId id, std::size_t row, std::span<const double> values) const;
  /// Copy with leaf variables removed. Throws if a removed variable still has
  /// a child that is kept.
  BayesianNetwork without_variables(std::span<const std::string> names) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  std::map<std::string, VarId, std::less<>> index_;
};

struct Violation {
  std::string kind;  // "row_sum", "range", "cycle", "duplicate_state", "lock"
  std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Checks every structural and probabilistic invariant; empty means valid.
ValidationReport validate_network(const BayesianNetwork& net);

/// Applies one co-varied change to a binary CPT row.
BayesianNetwork apply_delta(const BayesianNetwork& net, const ParameterDelta& change);
BayesianNetwork apply_deltas(const BayesianNetwork& net, std::span<const ParameterDelta> changes);

/// Natural-log odds; -inf at 0 and +inf at 1.
double log_odds(double theta);
/// Inverse of log_odds.
double from_log_odds(double value);

/// Union of two evidence sets; throws Errc::conflicting_evidence on disagreement.
Evidence merge_evidence(const Evidence& a, const Evidence& b);

/// {X} u parents(X) and {Y} u parents(Y) share no variable.
bool families_disjoint(const BayesianNetwork& net, VarId x, VarId y);

/// "Alarm=t|Fire=f,Tampering=t"
std::string to_string(const ParameterRef& parameter);
/// "Smoke=t,Leaving=t"
std::string to_string(const Evidence& evidence);

}  // namespace bnsens
