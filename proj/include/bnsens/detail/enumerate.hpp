#pragma once

#include <vector>

#include "bnsens/error.hpp"

namespace bnsens {

template <typename Visit>
void enumerate_worlds(const BayesianNetwork& net, const Observation& observed, Visit&& visit) {
  const std::size_t n = net.size();
  std::size_t states = 1;
  std::vector<VarId> free;
  for (VarId v = 0; v < n; ++v) {
    states *= net.variable(v).cardinality();
    if (states > kEnumerationLimit)
      throw precondition_error(Errc::too_large, "network has more than 2^22 joint states");
    if (!observed[v]) free.push_back(v);
  }

  std::vector<std::size_t> world(n, 0);
  for (VarId v = 0; v < n; ++v)
    if (observed[v]) world[v] = *observed[v];

  std::vector<std::size_t> parent_states;
  while (true) {
    double p = 1.0;
    for (VarId v = 0; v < n && p != 0.0; ++v) {
      const auto& cpt = net.cpt(v);
      parent_states.clear();
      for (const VarId parent : cpt.parents()) parent_states.push_back(world[parent]);
      p *= cpt.at(cpt.row_index(parent_states), world[v]);
    }
    visit(static_cast<const std::vector<std::size_t>&>(world), p);

    std::size_t k = free.size();
    while (k > 0) {
      const VarId v = free[k - 1];
      if (++world[v] < net.variable(v).cardinality()) break;
      world[v] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

}  // namespace bnsens
