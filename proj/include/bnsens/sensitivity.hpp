#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnsens/model.hpp"

namespace bnsens {

enum class Direction { at_least, at_most };

/// Pr(target | evidence) >= threshold, or <= threshold.
struct QueryConstraint {
  Evidence target;
  Evidence evidence;
  Direction direction = Direction::at_least;
  double threshold = 0.5;
};

/// Throws precondition errors for unknown names, a threshold outside (0,1),
/// or target and evidence sharing a variable. Pr(e) = 0 is reported by the
/// operations that propagate.
void check_constraint(const BayesianNetwork& net, const QueryConstraint& constraint);

/// Coefficient of one movable parameter. Always stated for the first state
/// of the row; the complement's coefficient is the negation.
struct AlphaEntry {
  Cell cell;
  ParameterRef parameter;
  double theta = 0.0;
  double alpha = 0.0;  // direction-normalized
  double dz = 0.0;     // co-varied d Pr(z,e) / d theta
  double de = 0.0;     // co-varied d Pr(e) / d theta
  bool inert = false;  // |alpha| below 1e-12 * Pr(e): held fixed by the optimizers
};

struct CrossAlpha {
  Cell x;
  Cell y;
  double alpha = 0.0;  // direction-normalized
  double dz = 0.0;
  double de = 0.0;
};

/// The solution space of a constraint over one or two CPTs, normalized to
///   sum alpha * delta  +  sum cross * delta_x * delta_y  >=  rhs
/// for both constraint directions. rhs <= 0 means the constraint already holds.
struct AlphaReport {
  QueryConstraint constraint;
  std::vector<AlphaEntry> alphas;
  std::vector<CrossAlpha> cross_alphas;
  /// Rows left out because they are locked or sit at 0 or 1.
  std::vector<ParameterRef> excluded;
  double rhs = 0.0;
  double pr_ze = 0.0;
  double pr_e = 0.0;

  double current() const { return pr_ze / pr_e; }
  bool satisfied() const { return rhs <= 0.0; }
  const AlphaEntry* find(const Cell& cell) const;
  /// Left-hand side minus rhs for first-state deltas keyed like `alphas`.
  double slack(const std::vector<std::pair<Cell, double>>& deltas) const;
  /// Posterior after the given first-state deltas, from the exact multilinear form.
  double posterior_after(const std::vector<std::pair<Cell, double>>& deltas) const;
};

AlphaReport alpha_single_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                             std::string_view variable);

AlphaReport alpha_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                          std::string_view x, std::string_view y);

struct SolveOptions {
  double tolerance = 1e-6;  // on the achieved posterior
  int max_iterations = 200;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class SolveStatus {
  feasible,
  infeasible,  // no admissible value inside [0,1] that keeps Pr(e) > 0
  irrelevant,  // alpha is zero but the constraint does not hold
};

std::string_view to_string(SolveStatus status);

/// Admissible values of one parameter with everything else fixed.
struct ParameterSolution {
  ParameterRef parameter;
  double theta = 0.0;
  double alpha = 0.0;
  double rhs = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  /// Closed interval of admissible new values; meaningful when feasible.
  double low = 0.0;
  double high = 0.0;
  /// The admissible value nearest in log-odds, its change, and that change's size.
  double suggested = 0.0;
  double delta = 0.0;
  double distance = 0.0;
  /// Posterior re-evaluated with the suggested value.
  double achieved = 0.0;
};

/// Throws for locked, extreme or multi-valued parameters. `parameter` may name
/// either state of the row.
ParameterSolution solve_single_parameter(const BayesianNetwork& net, const QueryConstraint& constraint,
                                         const ParameterRef& parameter);

/// Every movable, non-inert parameter of every binary CPT (or of `variables`
/// when given). Feasible solutions first, by increasing distance.
std::vector<ParameterSolution> suggest_single_parameters(const BayesianNetwork& net,
                                                         const QueryConstraint& constraint,
                                                         const std::vector<std::string>& variables = {});

struct Suggestion {
  std::vector<ParameterDelta> deltas;
  double achieved = 0.0;
  double distance = 0.0;
  bool feasible = false;
};

struct CptSuggestion {
  AlphaReport report;
  Suggestion suggestion;
  /// Common absolute log-odds change applied to the moved rows.
  double step = 0.0;
  /// h(hi) - rhs after each bisection step; nonincreasing.
  std::vector<double> residuals;
};

/// Moves every non-inert parameter of the CPT by the same absolute log-odds
/// change in the direction of its coefficient, with the change found by
/// bisection. Infeasible constraints give feasible == false with the deltas
/// at the largest admissible change.
CptSuggestion optimal_single_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                                 std::string_view variable, const SolveOptions& options = {});

struct TwoCptSuggestion {
  AlphaReport report;
  Suggestion suggestion;
  /// Signed log-odds step of X (positive follows X's first-order coefficients)
  /// and the resulting step of Y.
  double step_x = 0.0;
  double step_y = 0.0;
  std::size_t evaluations = 0;
};

/// Searches the constraint boundary for the pair of single-CPT changes with
/// the least combined distance. Requires disjoint families.
TwoCptSuggestion optimal_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                                 std::string_view x, std::string_view y, const SolveOptions& options = {});

/// The constraint restricted to two parameters, everything else fixed:
///   alpha1*d1 + alpha2*d2 + cross*d1*d2 >= rhs
/// with d1, d2 the changes of the parameters exactly as named (either state).
/// `points` samples the boundary curve inside the box of valid changes, sorted
/// by d1. With a cross term the curve is a hyperbola and may show two branches.
struct SolutionBoundary {
  ParameterRef first;
  ParameterRef second;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double cross = 0.0;
  double rhs = 0.0;
  std::vector<std::pair<double, double>> points;

  bool admits(double d1, double d2) const { return alpha1 * d1 + alpha2 * d2 + cross * d1 * d2 >= rhs; }
};

/// Parameters from the same CPT have no cross term; parameters from two CPTs
/// use the mixed second derivatives.
SolutionBoundary solution_boundary(const BayesianNetwork& net, const QueryConstraint& constraint,
                                   const ParameterRef& first, const ParameterRef& second,
                                   std::size_t samples = 256);

struct CptRelevance {
  std::string variable;
  double max_abs_alpha = 0.0;
  std::size_t active = 0;  // non-inert parameters
};

/// Binary CPTs with at least one non-inert coefficient, strongest first.
std::vector<CptRelevance> prune_candidate_cpts(const BayesianNetwork& net, const QueryConstraint& constraint);

}  // namespace bnsens
