#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bnsens/model.hpp"

namespace bnsens {

/// Largest absolute log-odds change over the rows of X's CPT whose parent
/// instantiation has prior probability above 1e-12 (measured on `net`).
/// Moving an interior parameter to exactly 0 or 1 gives +inf.
double cpt_distance(const BayesianNetwork& net, std::string_view variable,
                    std::span<const ParameterDelta> deltas);

/// Sum of per-CPT distances. Refuses CPTs whose families overlap, since the
/// sum is only exact for disjoint families.
double combined_distance(const BayesianNetwork& net, std::span<const ParameterDelta> deltas);

/// ln(max ratio) - ln(min ratio) of world probabilities, by enumeration.
/// Worlds impossible under both networks are ignored; a world possible under
/// only one gives +inf.
double global_distance_brute(const BayesianNetwork& before, const BayesianNetwork& after);

struct QueryBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Range a query with value p can reach under any change of distance d.
QueryBounds query_bounds(double p, double d);

struct BoundPoint {
  double p = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// query_bounds at `samples` evenly spaced p in [0,1].
std::vector<BoundPoint> bound_curve(double d, std::size_t samples = 101);

}  // namespace bnsens
