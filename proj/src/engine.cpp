#include "bnsens/engine.hpp"

#include <algorithm>
#include <array>

#include "bnsens/error.hpp"

namespace bnsens {

namespace {

void require_binary(const BayesianNetwork& net, VarId v) {
  const auto& var = net.variable(v);
  if (!var.binary())
    throw precondition_error(Errc::multi_valued, "'" + var.name + "' has " +
                                                     std::to_string(var.cardinality()) +
                                                     " states; sensitivity targets must be binary");
}

/// Evidence merge that reports a contradiction instead of throwing.
bool merge_into(Evidence& into, const Evidence& from) {
  for (const auto& [name, label] : from) {
    const auto [it, inserted] = into.emplace(name, label);
    if (!inserted && it->second != label) return false;
  }
  return true;
}

}  // namespace

InferenceEngine::InferenceEngine(BayesianNetwork net)
    : net_(std::move(net)), tree_(JoinTree::build(net_)) {
  tables_.reserve(net_.size());
  for (VarId v = 0; v < net_.size(); ++v) tables_.push_back(Factor::from_cpt(net_.cpt(v)));
}

Propagation InferenceEngine::propagate(const Evidence& evidence) const {
  return tree_->propagate(tables_, net_.observe(evidence));
}

Propagation InferenceEngine::propagate(const Evidence& evidence, std::span<const Factor> tables) const {
  return tree_->propagate(tables, net_.observe(evidence));
}

double InferenceEngine::joint(const Evidence& evidence) const {
  return propagate(evidence).probability();
}

double SecondDerivativeTable::at(const Cell& cx, const Cell& cy) const {
  const double sign = (cx.state == 0 ? 1.0 : -1.0) * (cy.state == 0 ? 1.0 : -1.0);
  return sign * entries.at({Cell{cx.variable, cx.row, 0}, Cell{cy.variable, cy.row, 0}});
}

double joint_probability(const BayesianNetwork& net, const Evidence& evidence) {
  if (evidence.empty()) return 1.0;
  return InferenceEngine(net).joint(evidence);
}

double posterior(const BayesianNetwork& net, const Evidence& target, const Evidence& evidence) {
  const InferenceEngine engine(net);
  const double pe = engine.joint(evidence);
  if (!(pe > 0.0))
    throw precondition_error(Errc::zero_evidence, "evidence " + to_string(evidence) + " has probability 0");
  Evidence both = evidence;
  if (!merge_into(both, target)) return 0.0;
  return engine.joint(both) / pe;
}

double raw_partial(const BayesianNetwork& net, const Evidence& evidence, const ParameterRef& parameter) {
  const Cell cell = net.resolve(parameter);
  const double high = InferenceEngine(net.with_entry(cell, 1.0)).joint(evidence);
  const double low = InferenceEngine(net.with_entry(cell, 0.0)).joint(evidence);
  return high - low;
}

DerivativeTable covaried_derivatives(const BayesianNetwork& net, const Evidence& evidence,
                                     std::span<const std::string> variables) {
  std::vector<VarId> ids;
  for (const auto& name : variables) {
    const VarId v = net.id(name);
    require_binary(net, v);
    ids.push_back(v);
  }
  DerivativeTable out{evidence, {}};
  const Propagation prop = InferenceEngine(net).propagate(evidence);
  for (const VarId v : ids) {
    const auto raw = prop.family_derivative(v);
    const std::size_t rows = net.cpt(v).rows();
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = raw[2 * r] - raw[2 * r + 1];
      out.entries[Cell{v, r, 0}] = d;
      out.entries[Cell{v, r, 1}] = -d;
    }
  }
  return out;
}

SecondDerivativeTable second_covaried_derivatives(const BayesianNetwork& net, const Evidence& evidence,
                                                  std::string_view x_name, std::string_view y_name) {
  const VarId x = net.id(x_name);
  const VarId y = net.id(y_name);
  if (x == y)
    throw precondition_error(Errc::same_variable, "second derivatives need two distinct CPTs, got '" +
                                                      std::string(x_name) + "' twice");
  require_binary(net, x);
  require_binary(net, y);

  const InferenceEngine engine(net);
  const auto& cpt_x = net.cpt(x);
  const std::size_t rows_x = cpt_x.rows();
  const std::size_t rows_y = net.cpt(y).rows();

  // raw[u][s] = family derivative of Y with X's CPT replaced by the indicator of (s, u),
  // i.e. d^2 Pr(e) / d theta_{x_s|u} d theta_{y|v} for every entry of Y.
  std::vector<Factor> tables = engine.tables();
  const Factor& fx = engine.tables()[x];
  std::vector<std::array<std::vector<double>, 2>> raw(rows_x);
  for (std::size_t u = 0; u < rows_x; ++u) {
    for (std::size_t s = 0; s < 2; ++s) {
      std::vector<double> values(fx.size(), 0.0);
      values[2 * u + s] = 1.0;
      tables[x] = Factor(std::vector<VarId>(fx.vars().begin(), fx.vars().end()),
                         std::vector<std::size_t>(fx.cards().begin(), fx.cards().end()), std::move(values));
      raw[u][s] = engine.propagate(evidence, tables).family_derivative(y);
    }
  }

  SecondDerivativeTable out{evidence, x, y, {}};
  for (std::size_t u = 0; u < rows_x; ++u) {
    for (std::size_t v = 0; v < rows_y; ++v) {
      const double d = (raw[u][0][2 * v] - raw[u][1][2 * v]) - (raw[u][0][2 * v + 1] - raw[u][1][2 * v + 1]);
      out.entries[{Cell{x, u, 0}, Cell{y, v, 0}}] = d;
    }
  }
  return out;
}

double brute_force_joint(const BayesianNetwork& net, const Evidence& evidence) {
  double total = 0.0;
  enumerate_worlds(net, net.observe(evidence), [&](const auto&, double p) { total += p; });
  return total;
}

std::vector<double> parent_marginals(const BayesianNetwork& net, VarId x) {
  const auto raw = InferenceEngine(net).propagate({}).family_derivative(x);
  const std::size_t card = net.variable(x).cardinality();
  std::vector<double> out(raw.size() / card);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = raw[r * card];
  return out;
}

}  // namespace bnsens
