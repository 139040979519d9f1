#include "bnsens/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "bnsens/distance.hpp"
#include "bnsens/engine.hpp"
#include "bnsens/error.hpp"

namespace bnsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInertScale = 1e-12;
constexpr double kBoundMargin = 1e-9;

double direction_sign(const QueryConstraint& c) { return c.direction == Direction::at_least ? 1.0 : -1.0; }

VarId binary_variable(const BayesianNetwork& net, std::string_view name) {
  const VarId v = net.id(name);
  const auto& var = net.variable(v);
  if (!var.binary())
    throw precondition_error(Errc::multi_valued, "'" + var.name + "' has " + std::to_string(var.cardinality()) +
                                                     " states; sensitivity targets must be binary");
  return v;
}

/// Both propagations every coefficient is read from.
struct Sweep {
  Sweep(const BayesianNetwork& net, const QueryConstraint& c)
      : engine(net), pe(engine.propagate(c.evidence)), pz(engine.propagate(merge_evidence(c.evidence, c.target))) {
    pr_e = pe.probability();
    pr_ze = pz.probability();
    if (!(pr_e > 0.0))
      throw precondition_error(Errc::zero_evidence, "evidence " + to_string(c.evidence) + " has probability 0");
  }

  InferenceEngine engine;
  Propagation pe;
  Propagation pz;
  double pr_e = 0.0;
  double pr_ze = 0.0;
};

AlphaReport start_report(const QueryConstraint& c, const Sweep& s) {
  AlphaReport r;
  r.constraint = c;
  r.pr_e = s.pr_e;
  r.pr_ze = s.pr_ze;
  r.rhs = -direction_sign(c) * (s.pr_ze - c.threshold * s.pr_e);
  return r;
}

/// Coefficients of every row of X. Locked or extreme rows go to `excluded`
/// unless `keep_all`.
void add_rows(const BayesianNetwork& net, const QueryConstraint& c, const Sweep& s, VarId x, AlphaReport& out,
              bool keep_all = false) {
  const auto rz = s.pz.family_derivative(x);
  const auto re = s.pe.family_derivative(x);
  const auto& cpt = net.cpt(x);
  const double sign = direction_sign(c);
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    const Cell cell{x, r, 0};
    const double theta = cpt.at(r, 0);
    if (!keep_all && (cpt.row_locked(r) || theta == 0.0 || theta == 1.0)) {
      out.excluded.push_back(net.describe(cell));
      continue;
    }
    AlphaEntry e;
    e.cell = cell;
    e.parameter = net.describe(cell);
    e.theta = theta;
    e.dz = rz[2 * r] - rz[2 * r + 1];
    e.de = re[2 * r] - re[2 * r + 1];
    e.alpha = sign * (e.dz - c.threshold * e.de);
    e.inert = std::abs(e.alpha) <= kInertScale * s.pr_e;
    out.alphas.push_back(std::move(e));
  }
}

// --- equal log-odds line search ----------------------------------------------

struct Mover {
  Cell cell;
  double theta = 0.0;
  double logit = 0.0;
  double sign = 1.0;
  double alpha = 0.0;
  double dz = 0.0;
  double de = 0.0;
};

double moved(const Mover& m, double step) {
  if (step == 0.0) return 0.0;
  return from_log_odds(m.logit + m.sign * step) - m.theta;
}

/// Step at which every mover is within kBoundMargin of the bound it heads for.
double step_limit(const std::vector<Mover>& movers, double direction = 1.0) {
  static const double edge = log_odds(1.0 - kBoundMargin);
  double limit = 0.0;
  for (const auto& m : movers) {
    const double toward = m.sign * direction;
    limit = std::max(limit, toward > 0 ? edge - m.logit : m.logit + edge);
  }
  return limit;
}

Mover make_mover(const Cell& cell, double theta, double alpha, double dz, double de) {
  return Mover{cell, theta, log_odds(theta), alpha >= 0.0 ? 1.0 : -1.0, alpha, dz, de};
}

/// The linear problem along the common step: slack(step) = sum alpha*delta - rhs,
/// posterior(step) = (ze + sum dz*delta) / (e + sum de*delta).
struct LinearProblem {
  std::vector<Mover> movers;
  double rhs = 0.0;
  double ze = 0.0;
  double e = 0.0;

  double slack(double step) const {
    double h = 0.0;
    for (const auto& m : movers) h += m.alpha * moved(m, step);
    return h - rhs;
  }

  double posterior(double step) const {
    double num = ze, den = e;
    for (const auto& m : movers) {
      const double d = moved(m, step);
      num += m.dz * d;
      den += m.de * d;
    }
    return num / den;
  }
};

struct LineSearch {
  double step = 0.0;
  bool feasible = false;
  std::vector<double> residuals;
};

/// Bisection on [0, limit] keeping the feasible end. Stops once the posterior
/// at the feasible end is within `tolerance` of `target` (tolerance 0 runs to
/// the resolution of doubles or the iteration cap).
LineSearch bisect(const LinearProblem& problem, double target, double tolerance, int max_iterations) {
  LineSearch out;
  if (problem.slack(0.0) >= 0.0) {
    out.feasible = true;
    return out;
  }
  double hi = step_limit(problem.movers);
  double slack_hi = problem.slack(hi);
  out.residuals.push_back(slack_hi);
  if (problem.movers.empty() || slack_hi < 0.0) {
    out.step = hi;
    return out;
  }
  out.feasible = true;
  double lo = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    if (tolerance > 0.0 && std::abs(problem.posterior(hi) - target) <= tolerance) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double s = problem.slack(mid);
    if (s >= 0.0) {
      hi = mid;
      slack_hi = s;
    } else {
      lo = mid;
    }
    out.residuals.push_back(slack_hi);
  }
  out.step = hi;
  return out;
}

void check_deadline(const SolveOptions& options, std::size_t done, std::size_t planned, double best_d,
                    double best_step) {
  if (!options.deadline || std::chrono::steady_clock::now() < *options.deadline) return;
  std::ostringstream msg;
  msg << "two-CPT search exceeded its deadline after " << done << " of about " << planned
      << " evaluations; best distance so far " << best_d << " at X step " << best_step;
  throw Error(ErrorKind::timeout, Errc::deadline_exceeded, msg.str());
}

Suggestion finish(const BayesianNetwork& net, const QueryConstraint& c, std::vector<ParameterDelta> deltas,
                  bool feasible) {
  Suggestion s;
  const BayesianNetwork changed = apply_deltas(net, deltas);
  s.achieved = posterior(changed, c.target, c.evidence);
  s.distance = combined_distance(net, deltas);
  s.deltas = std::move(deltas);
  s.feasible = feasible;
  return s;
}

/// Solution of one parameter taken from an already computed coefficient.
ParameterSolution solve_entry(const BayesianNetwork& net, const QueryConstraint& c, const AlphaReport& report,
                              const AlphaEntry& entry, std::size_t state) {
  const double flip = state == 0 ? 1.0 : -1.0;
  ParameterSolution out;
  out.parameter = net.describe(Cell{entry.cell.variable, entry.cell.row, state});
  out.theta = state == 0 ? entry.theta : 1.0 - entry.theta;
  out.alpha = flip * entry.alpha;
  out.rhs = report.rhs;

  const double theta = out.theta;
  if (entry.inert) {
    if (report.rhs > 0.0) {
      out.status = SolveStatus::irrelevant;
      return out;
    }
    out.low = 0.0;
    out.high = 1.0;
  } else if (out.alpha > 0.0) {
    out.low = std::max(0.0, theta + report.rhs / out.alpha);
    out.high = 1.0;
  } else {
    out.low = 0.0;
    out.high = std::min(1.0, theta + report.rhs / out.alpha);
  }
  if (out.low > out.high) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  out.suggested = std::clamp(theta, out.low, out.high);
  out.delta = out.suggested - theta;
  // Reaching the threshold only by making the evidence impossible leaves the
  // posterior undefined.
  if (!(report.pr_e + entry.de * flip * out.delta > kInertScale * report.pr_e)) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  out.status = SolveStatus::feasible;
  if (out.delta == 0.0) {
    out.distance = 0.0;
  } else if (out.suggested == 0.0 || out.suggested == 1.0) {
    out.distance = kInf;
  } else {
    out.distance = std::abs(log_odds(out.suggested) - log_odds(theta));
  }
  const ParameterDelta change{out.parameter, out.delta};
  out.achieved = posterior(apply_delta(net, change), c.target, c.evidence);
  return out;
}

}  // namespace

// --- constraint and report ------------------------------------------------------

void check_constraint(const BayesianNetwork& net, const QueryConstraint& c) {
  if (!(c.threshold > 0.0 && c.threshold < 1.0))
    throw precondition_error(Errc::bad_constraint, "threshold must lie strictly between 0 and 1");
  if (c.target.empty()) throw precondition_error(Errc::bad_constraint, "constraint has an empty target event");
  for (const auto& [name, label] : c.target)
    if (c.evidence.count(name))
      throw precondition_error(Errc::bad_constraint,
                               "'" + name + "' appears in both the target event and the evidence");
  net.observe(c.target);
  net.observe(c.evidence);
}

const AlphaEntry* AlphaReport::find(const Cell& cell) const {
  const Cell key{cell.variable, cell.row, 0};
  for (const auto& a : alphas)
    if (a.cell == key) return &a;
  return nullptr;
}

double AlphaReport::slack(const std::vector<std::pair<Cell, double>>& deltas) const {
  const std::map<Cell, double> d(deltas.begin(), deltas.end());
  auto get = [&](const Cell& c) {
    const auto it = d.find(c);
    return it == d.end() ? 0.0 : it->second;
  };
  double lhs = 0.0;
  for (const auto& a : alphas) lhs += a.alpha * get(a.cell);
  for (const auto& x : cross_alphas) lhs += x.alpha * get(x.x) * get(x.y);
  return lhs - rhs;
}

double AlphaReport::posterior_after(const std::vector<std::pair<Cell, double>>& deltas) const {
  const std::map<Cell, double> d(deltas.begin(), deltas.end());
  auto get = [&](const Cell& c) {
    const auto it = d.find(c);
    return it == d.end() ? 0.0 : it->second;
  };
  double num = pr_ze, den = pr_e;
  for (const auto& a : alphas) {
    num += a.dz * get(a.cell);
    den += a.de * get(a.cell);
  }
  for (const auto& x : cross_alphas) {
    const double dd = get(x.x) * get(x.y);
    num += x.dz * dd;
    den += x.de * dd;
  }
  return num / den;
}

AlphaReport alpha_single_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                             std::string_view variable) {
  check_constraint(net, constraint);
  const VarId x = binary_variable(net, variable);
  const Sweep sweep(net, constraint);
  AlphaReport report = start_report(constraint, sweep);
  add_rows(net, constraint, sweep, x, report);
  return report;
}

AlphaReport alpha_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint, std::string_view x_name,
                          std::string_view y_name) {
  check_constraint(net, constraint);
  const VarId x = binary_variable(net, x_name);
  const VarId y = binary_variable(net, y_name);
  if (x == y)
    throw precondition_error(Errc::same_variable,
                             "two-CPT analysis needs two distinct CPTs, got '" + std::string(x_name) + "' twice");
  const Sweep sweep(net, constraint);
  AlphaReport report = start_report(constraint, sweep);
  add_rows(net, constraint, sweep, x, report);
  add_rows(net, constraint, sweep, y, report);

  const auto se = second_covaried_derivatives(net, constraint.evidence, x_name, y_name);
  const auto sz = second_covaried_derivatives(net, merge_evidence(constraint.evidence, constraint.target),
                                              x_name, y_name);
  const double sign = direction_sign(constraint);
  for (const auto& ax : report.alphas) {
    if (ax.cell.variable != x) continue;
    for (const auto& ay : report.alphas) {
      if (ay.cell.variable != y) continue;
      CrossAlpha c;
      c.x = ax.cell;
      c.y = ay.cell;
      c.dz = sz.at(ax.cell, ay.cell);
      c.de = se.at(ax.cell, ay.cell);
      c.alpha = sign * (c.dz - constraint.threshold * c.de);
      report.cross_alphas.push_back(c);
    }
  }
  return report;
}

// --- single parameter -------------------------------------------------------------

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::irrelevant: return "irrelevant";
  }
  return "unknown";
}

ParameterSolution solve_single_parameter(const BayesianNetwork& net, const QueryConstraint& constraint,
                                         const ParameterRef& parameter) {
  check_constraint(net, constraint);
  const Cell cell = net.resolve(parameter);
  binary_variable(net, parameter.variable);
  const auto& cpt = net.cpt(cell.variable);
  if (cpt.row_locked(cell.row))
    throw precondition_error(Errc::locked_parameter, "parameter " + to_string(parameter) + " or its complement is locked");
  const double theta = cpt.at(cell.row, cell.state);
  if (theta == 0.0 || theta == 1.0)
    throw precondition_error(Errc::out_of_range,
                             "parameter " + to_string(parameter) + " is " + (theta == 0.0 ? "0" : "1") +
                                 " and cannot move on the log-odds scale");

  const Sweep sweep(net, constraint);
  AlphaReport report = start_report(constraint, sweep);
  add_rows(net, constraint, sweep, cell.variable, report);
  return solve_entry(net, constraint, report, *report.find(cell), cell.state);
}

std::vector<ParameterSolution> suggest_single_parameters(const BayesianNetwork& net,
                                                         const QueryConstraint& constraint,
                                                         const std::vector<std::string>& variables) {
  check_constraint(net, constraint);
  std::vector<VarId> ids;
  if (variables.empty()) {
    for (VarId v = 0; v < net.size(); ++v)
      if (net.variable(v).binary()) ids.push_back(v);
  } else {
    for (const auto& name : variables) ids.push_back(binary_variable(net, name));
  }

  const Sweep sweep(net, constraint);
  AlphaReport report = start_report(constraint, sweep);
  for (const VarId v : ids) add_rows(net, constraint, sweep, v, report);

  std::vector<ParameterSolution> out;
  for (const auto& entry : report.alphas)
    if (!entry.inert) out.push_back(solve_entry(net, constraint, report, entry, 0));
  std::stable_sort(out.begin(), out.end(), [](const ParameterSolution& a, const ParameterSolution& b) {
    const bool fa = a.status == SolveStatus::feasible, fb = b.status == SolveStatus::feasible;
    if (fa != fb) return fa;
    return fa && a.distance < b.distance;
  });
  return out;
}

// --- single CPT ---------------------------------------------------------------------

CptSuggestion optimal_single_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                                 std::string_view variable, const SolveOptions& options) {
  CptSuggestion out;
  out.report = alpha_single_cpt(net, constraint, variable);
  const AlphaReport& report = out.report;
  if (report.satisfied()) {
    out.suggestion = Suggestion{{}, report.current(), 0.0, true};
    return out;
  }

  LinearProblem problem{{}, report.rhs, report.pr_ze, report.pr_e};
  for (const auto& a : report.alphas)
    if (!a.inert) problem.movers.push_back(make_mover(a.cell, a.theta, a.alpha, a.dz, a.de));
  if (problem.movers.empty())
    throw precondition_error(Errc::no_candidates, "no movable parameter of '" + std::string(variable) +
                                                      "' influences the query");

  const LineSearch search = bisect(problem, constraint.threshold, options.tolerance, options.max_iterations);
  out.step = search.step;
  out.residuals = search.residuals;
  std::vector<ParameterDelta> deltas;
  for (const auto& m : problem.movers) deltas.push_back({net.describe(m.cell), moved(m, search.step)});
  out.suggestion = finish(net, constraint, std::move(deltas), search.feasible);
  return out;
}

// --- two CPTs ---------------------------------------------------------------------------

namespace {

/// The Y-side problem once X has moved by a signed step: exact, because the
/// polynomial has no terms of degree two within one CPT.
class TwoCptSearch {
 public:
  TwoCptSearch(const AlphaReport& report, VarId x, VarId y, const SolveOptions& options)
      : report_(report), options_(options) {
    for (const auto& a : report.alphas) {
      if (a.cell.variable == x && !a.inert) xs_.push_back(make_mover(a.cell, a.theta, a.alpha, a.dz, a.de));
      if (a.cell.variable == y) ys_.push_back(&a);
    }
    for (const auto& c : report.cross_alphas) cross_[{c.x.row, c.y.row}] = &c;
  }

  const std::vector<Mover>& x_movers() const { return xs_; }

  std::vector<double> x_deltas(double step) const {
    std::vector<double> d;
    for (const auto& m : xs_) d.push_back(moved(m, step));
    return d;
  }

  LinearProblem y_problem(double step_x) const {
    const auto dx = x_deltas(step_x);
    LinearProblem p{{}, report_.rhs, report_.pr_ze, report_.pr_e};
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      p.rhs -= xs_[i].alpha * dx[i];
      p.ze += xs_[i].dz * dx[i];
      p.e += xs_[i].de * dx[i];
    }
    for (const AlphaEntry* ay : ys_) {
      double alpha = ay->alpha, dz = ay->dz, de = ay->de;
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        const auto it = cross_.find({xs_[i].cell.row, ay->cell.row});
        if (it == cross_.end()) continue;
        alpha += it->second->alpha * dx[i];
        dz += it->second->dz * dx[i];
        de += it->second->de * dx[i];
      }
      if (std::abs(alpha) <= kInertScale * report_.pr_e) continue;
      p.movers.push_back(make_mover(ay->cell, ay->theta, alpha, dz, de));
    }
    return p;
  }

  /// Smallest Y step completing the constraint, or +inf.
  double y_step(double step_x) const {
    const LinearProblem p = y_problem(step_x);
    const LineSearch s = bisect(p, report_.constraint.threshold, 0.0, options_.max_iterations);
    return s.feasible ? s.step : kInf;
  }

  double objective(double step_x) {
    ++evaluations_;
    return std::abs(step_x) + y_step(step_x);
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const AlphaReport& report_;
  const SolveOptions& options_;
  std::vector<Mover> xs_;
  std::vector<const AlphaEntry*> ys_;
  std::map<std::pair<std::size_t, std::size_t>, const CrossAlpha*> cross_;
  std::size_t evaluations_ = 0;
};

constexpr int kGridPoints = 64;
constexpr double kGoldenWidth = 1e-4;

}  // namespace

TwoCptSuggestion optimal_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint,
                                 std::string_view x_name, std::string_view y_name, const SolveOptions& options) {
  const VarId x = binary_variable(net, x_name);
  const VarId y = binary_variable(net, y_name);
  if (x != y && !families_disjoint(net, x, y))
    throw precondition_error(Errc::non_disjoint_families,
                             "families of '" + std::string(x_name) + "' and '" + std::string(y_name) +
                                 "' overlap; two-CPT changes are only supported for disjoint families, where "
                                 "their distances add");

  TwoCptSuggestion out;
  out.report = alpha_two_cpt(net, constraint, x_name, y_name);
  const AlphaReport& report = out.report;
  if (report.satisfied()) {
    out.suggestion = Suggestion{{}, report.current(), 0.0, true};
    return out;
  }

  TwoCptSearch search(report, x, y, options);
  const auto& xs = search.x_movers();

  // Beyond either single-CPT optimum the objective only grows.
  const double y_only = search.y_step(0.0);
  double cap_pos = step_limit(xs, 1.0);
  double cap_neg = step_limit(xs, -1.0);
  {
    LinearProblem x_only{xs, report.rhs, report.pr_ze, report.pr_e};
    const LineSearch s = bisect(x_only, constraint.threshold, 0.0, options.max_iterations);
    if (s.feasible) cap_pos = std::min(cap_pos, s.step);
  }
  cap_pos = std::min(cap_pos, y_only);
  cap_neg = std::min(cap_neg, y_only);
  if (xs.empty()) cap_pos = cap_neg = 0.0;

  std::vector<double> grid{0.0};
  const double span = cap_pos + cap_neg;
  if (span > 0.0)
    for (int k = 0; k < kGridPoints; ++k) grid.push_back(-cap_neg + span * k / (kGridPoints - 1));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t planned = grid.size() + 40;
  std::vector<double> values(grid.size(), kInf);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_deadline(options, search.evaluations(), planned, values[best], grid[best]);
    values[i] = search.objective(grid[i]);
    if (values[i] < values[best]) best = i;
  }

  double best_step = grid[best];
  double best_value = values[best];
  if (std::isfinite(best_value) && grid.size() > 1) {
    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    check_deadline(options, search.evaluations(), planned, best_value, best_step);
    double fc = search.objective(c);
    double fd = search.objective(d);
    while (b - a > kGoldenWidth) {
      check_deadline(options, search.evaluations(), planned, best_value, best_step);
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = search.objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = search.objective(d);
      }
    }
    const double mid = fc <= fd ? c : d;
    const double fmid = std::min(fc, fd);
    if (fmid < best_value) {
      best_value = fmid;
      best_step = mid;
    }
  }
  out.evaluations = search.evaluations();

  if (!std::isfinite(best_value)) {
    out.suggestion = Suggestion{{}, report.current(), 0.0, false};
    return out;
  }

  const LinearProblem yp = search.y_problem(best_step);
  const LineSearch ys = bisect(yp, constraint.threshold, 0.0, options.max_iterations);
  out.step_x = best_step;
  out.step_y = ys.step;

  std::vector<ParameterDelta> deltas;
  const auto dx = search.x_deltas(best_step);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (dx[i] != 0.0) deltas.push_back({net.describe(xs[i].cell), dx[i]});
  for (const auto& m : yp.movers) {
    const double d = moved(m, ys.step);
    if (d != 0.0) deltas.push_back({net.describe(m.cell), d});
  }
  out.suggestion = finish(net, constraint, std::move(deltas), ys.feasible);
  return out;
}

// --- boundary and relevance --------------------------------------------------------------

SolutionBoundary solution_boundary(const BayesianNetwork& net, const QueryConstraint& constraint,
                                   const ParameterRef& first, const ParameterRef& second, std::size_t samples) {
  check_constraint(net, constraint);
  if (samples < 2) throw precondition_error(Errc::out_of_range, "a boundary needs at least two samples");
  const Cell c1 = net.resolve(first);
  const Cell c2 = net.resolve(second);
  binary_variable(net, first.variable);
  binary_variable(net, second.variable);
  if (c1.variable == c2.variable && c1.row == c2.row)
    throw precondition_error(Errc::bad_constraint, "both parameters sit in the same CPT row");

  const Sweep sweep(net, constraint);
  AlphaReport report = start_report(constraint, sweep);
  add_rows(net, constraint, sweep, c1.variable, report, true);
  if (c2.variable != c1.variable) add_rows(net, constraint, sweep, c2.variable, report, true);

  const double f1 = c1.state == 0 ? 1.0 : -1.0;
  const double f2 = c2.state == 0 ? 1.0 : -1.0;
  SolutionBoundary out;
  out.first = net.describe(c1);
  out.second = net.describe(c2);
  out.theta1 = net.theta(c1);
  out.theta2 = net.theta(c2);
  out.alpha1 = f1 * report.find(c1)->alpha;
  out.alpha2 = f2 * report.find(c2)->alpha;
  out.rhs = report.rhs;
  if (c1.variable != c2.variable) {
    const auto se = second_covaried_derivatives(net, constraint.evidence, first.variable, second.variable);
    const auto sz = second_covaried_derivatives(net, merge_evidence(constraint.evidence, constraint.target),
                                                first.variable, second.variable);
    out.cross = direction_sign(constraint) * (sz.at(c1, c2) - constraint.threshold * se.at(c1, c2));
  }

  const double tiny = kInertScale * report.pr_e;
  const double lo1 = -out.theta1, hi1 = 1.0 - out.theta1;
  const double lo2 = -out.theta2, hi2 = 1.0 - out.theta2;
  // Sweep each axis and solve for the other, so steep and flat stretches of
  // the curve both get points.
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
    const double d1 = lo1 + t * (hi1 - lo1);
    const double slope2 = out.alpha2 + out.cross * d1;
    if (std::abs(slope2) > tiny) {
      const double d2 = (out.rhs - out.alpha1 * d1) / slope2;
      if (d2 >= lo2 && d2 <= hi2) out.points.emplace_back(d1, d2);
    }
    const double d2 = lo2 + t * (hi2 - lo2);
    const double slope1 = out.alpha1 + out.cross * d2;
    if (std::abs(slope1) > tiny) {
      const double x = (out.rhs - out.alpha2 * d2) / slope1;
      if (x >= lo1 && x <= hi1) out.points.emplace_back(x, d2);
    }
  }
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
  return out;
}

std::vector<CptRelevance> prune_candidate_cpts(const BayesianNetwork& net, const QueryConstraint& constraint) {
  check_constraint(net, constraint);
  const Sweep sweep(net, constraint);
  std::vector<CptRelevance> out;
  for (VarId v = 0; v < net.size(); ++v) {
    if (!net.variable(v).binary()) continue;
    AlphaReport report = start_report(constraint, sweep);
    add_rows(net, constraint, sweep, v, report);
    CptRelevance r{net.variable(v).name, 0.0, 0};
    for (const auto& a : report.alphas) {
      if (a.inert) continue;
      ++r.active;
      r.max_abs_alpha = std::max(r.max_abs_alpha, std::abs(a.alpha));
    }
    if (r.active > 0) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CptRelevance& a, const CptRelevance& b) { return a.max_abs_alpha > b.max_abs_alpha; });
  return out;
}

}  // namespace bnsens
