#include "bnsens/distance.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "bnsens/engine.hpp"
#include "bnsens/error.hpp"

namespace bnsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportTolerance = 1e-12;

void check_same_structure(const BayesianNetwork& a, const BayesianNetwork& b) {
  auto mismatch = [](const std::string& what) {
    return precondition_error(Errc::structure_mismatch, "networks differ in structure: " + what);
  };
  if (a.size() != b.size()) throw mismatch("variable count");
  for (VarId v = 0; v < a.size(); ++v) {
    if (a.variable(v).name != b.variable(v).name || a.variable(v).states != b.variable(v).states)
      throw mismatch("variable '" + a.variable(v).name + "'");
    const auto pa = a.cpt(v).parents();
    const auto pb = b.cpt(v).parents();
    if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()))
      throw mismatch("parents of '" + a.variable(v).name + "'");
  }
}

}  // namespace

double cpt_distance(const BayesianNetwork& net, std::string_view variable,
                    std::span<const ParameterDelta> deltas) {
  const VarId x = net.id(variable);
  const auto& var = net.variable(x);
  if (!var.binary())
    throw precondition_error(Errc::multi_valued, "'" + var.name + "' is not binary");

  std::map<std::size_t, double> row_delta;  // in terms of the first state
  for (const auto& d : deltas) {
    const Cell cell = net.resolve(d.target);
    if (cell.variable != x)
      throw precondition_error(Errc::structure_mismatch,
                               "delta on " + to_string(d.target) + " is not in the CPT of '" + var.name + "'");
    row_delta[cell.row] += cell.state == 0 ? d.delta : -d.delta;
  }

  const auto pr_u = parent_marginals(net, x);
  double distance = 0.0;
  for (const auto& [row, delta] : row_delta) {
    const double before = net.theta(Cell{x, row, 0});
    const double after = before + delta;
    if (!(after >= 0.0 && after <= 1.0))
      throw precondition_error(Errc::out_of_range, "delta moves " + to_string(net.describe(Cell{x, row, 0})) +
                                                       " outside [0,1]");
    if (pr_u[row] <= kSupportTolerance || after == before) continue;
    const bool before_extreme = before == 0.0 || before == 1.0;
    const bool after_extreme = after == 0.0 || after == 1.0;
    if (before_extreme || after_extreme) return kInf;
    distance = std::max(distance, std::abs(log_odds(after) - log_odds(before)));
  }
  return distance;
}

double combined_distance(const BayesianNetwork& net, std::span<const ParameterDelta> deltas) {
  std::map<VarId, std::vector<ParameterDelta>> by_cpt;
  for (const auto& d : deltas) by_cpt[net.id(d.target.variable)].push_back(d);

  for (auto a = by_cpt.begin(); a != by_cpt.end(); ++a)
    for (auto b = std::next(a); b != by_cpt.end(); ++b)
      if (!families_disjoint(net, a->first, b->first))
        throw precondition_error(Errc::non_disjoint_families,
                                 "families of '" + net.variable(a->first).name + "' and '" +
                                     net.variable(b->first).name +
                                     "' overlap; the distance of such a change is not the sum of the CPT "
                                     "distances and is not supported");

  double total = 0.0;
  for (const auto& [v, list] : by_cpt) total += cpt_distance(net, net.variable(v).name, list);
  return total;
}

double global_distance_brute(const BayesianNetwork& before, const BayesianNetwork& after) {
  check_same_structure(before, after);
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  bool unbounded = false;
  std::vector<std::size_t> parent_states;
  enumerate_worlds(before, Observation(before.size()), [&](const std::vector<std::size_t>& world, double p) {
    if (unbounded) return;
    double q = 1.0;
    for (VarId v = 0; v < after.size() && q != 0.0; ++v) {
      const auto& cpt = after.cpt(v);
      parent_states.clear();
      for (const VarId parent : cpt.parents()) parent_states.push_back(world[parent]);
      q *= cpt.at(cpt.row_index(parent_states), world[v]);
    }
    if (p == 0.0 && q == 0.0) return;
    if (p == 0.0 || q == 0.0) {
      unbounded = true;
      return;
    }
    const double ratio = q / p;
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
  });
  if (unbounded) return kInf;
  return std::log(max_ratio) - std::log(min_ratio);
}

QueryBounds query_bounds(double p, double d) {
  if (!(p >= 0.0 && p <= 1.0))
    throw precondition_error(Errc::out_of_range, "query value must lie in [0,1]");
  if (!(d >= 0.0)) throw precondition_error(Errc::out_of_range, "distance must be nonnegative");
  if (p == 0.0 || p == 1.0) return {p, p};
  if (std::isinf(d)) return {0.0, 1.0};
  const double down = std::exp(-d);
  const double up = std::exp(d);
  return {p * down / (p * (down - 1.0) + 1.0), p * up / (p * (up - 1.0) + 1.0)};
}

std::vector<BoundPoint> bound_curve(double d, std::size_t samples) {
  if (samples < 2) throw precondition_error(Errc::out_of_range, "a bound curve needs at least two samples");
  std::vector<BoundPoint> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto b = query_bounds(p, d);
    out.push_back({p, b.lower, b.upper});
  }
  return out;
}

}  // namespace bnsens
