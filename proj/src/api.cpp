#include "bnsens/api.hpp"

#include <cmath>

#include "bnsens/engine.hpp"
#include "bnsens/text.hpp"

namespace bnsens::api {

namespace {

json parameter_list(const std::vector<ParameterRef>& refs) {
  json out = json::array();
  for (const auto& r : refs) out.push_back(bnsens::to_string(r));
  return out;
}

json constraint_json(const QueryConstraint& c, const Format& f) {
  return json{{"text", bnsens::to_string(c)},
              {"target", evidence_json(c.target)},
              {"evidence", evidence_json(c.evidence)},
              {"direction", c.direction == Direction::at_least ? "at_least" : "at_most"},
              {"threshold", number(c.threshold, f)}};
}

json report_json(const AlphaReport& r, const BayesianNetwork& net, const Format& f) {
  json alphas = json::array();
  for (const auto& a : r.alphas)
    alphas.push_back({{"parameter", bnsens::to_string(a.parameter)},
                      {"variable", a.parameter.variable},
                      {"row", a.cell.row},
                      {"theta", number(a.theta, f)},
                      {"alpha", number(a.alpha, f)},
                      {"inert", a.inert}});
  json cross = json::array();
  for (const auto& c : r.cross_alphas)
    cross.push_back({{"x", bnsens::to_string(net.describe(c.x))},
                     {"y", bnsens::to_string(net.describe(c.y))},
                     {"alpha", number(c.alpha, f)}});
  return json{{"constraint", constraint_json(r.constraint, f)},
              {"current", number(r.current(), f)},
              {"pr_e", number(r.pr_e, f)},
              {"pr_ze", number(r.pr_ze, f)},
              {"rhs", number(r.rhs, f)},
              {"satisfied", r.satisfied()},
              {"alphas", std::move(alphas)},
              {"cross_alphas", std::move(cross)},
              {"excluded", parameter_list(r.excluded)}};
}

json suggestion_json(const Suggestion& s, const BayesianNetwork& net, const Format& f) {
  json deltas = json::array();
  for (const auto& d : s.deltas) {
    const double theta = net.theta(net.resolve(d.target));
    deltas.push_back({{"parameter", bnsens::to_string(d.target)},
                      {"theta", number(theta, f)},
                      {"delta", number(d.delta, f)},
                      {"new_value", number(theta + d.delta, f)}});
  }
  return json{{"feasible", s.feasible},
              {"achieved", number(s.achieved, f)},
              {"distance", number(s.distance, f)},
              {"deltas", std::move(deltas)}};
}

json bound_json(double p, double d, const Format& f) {
  const auto b = query_bounds(p, d);
  return json{{"lower", number(b.lower, f)}, {"upper", number(b.upper, f)}};
}

json boundary_json(const SolutionBoundary& b, const Format& f) {
  json points = json::array();
  for (const auto& [d1, d2] : b.points) points.push_back(json::array({number(d1, f), number(d2, f)}));
  return json{{"first", bnsens::to_string(b.first)},
              {"second", bnsens::to_string(b.second)},
              {"theta1", number(b.theta1, f)},
              {"theta2", number(b.theta2, f)},
              {"alpha1", number(b.alpha1, f)},
              {"alpha2", number(b.alpha2, f)},
              {"cross", number(b.cross, f)},
              {"rhs", number(b.rhs, f)},
              {"points", std::move(points)}};
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::timeout: return "timeout";
  }
  return "unknown";
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::syntax: return "syntax";
    case Errc::unknown_variable: return "unknown_variable";
    case Errc::unknown_state: return "unknown_state";
    case Errc::bad_table: return "bad_table";
    case Errc::row_sum: return "row_sum";
    case Errc::cycle: return "cycle";
    case Errc::duplicate_name: return "duplicate_name";
    case Errc::locked_parameter: return "locked_parameter";
    case Errc::out_of_range: return "out_of_range";
    case Errc::multi_valued: return "multi_valued";
    case Errc::zero_evidence: return "zero_evidence";
    case Errc::non_disjoint_families: return "non_disjoint_families";
    case Errc::same_variable: return "same_variable";
    case Errc::conflicting_evidence: return "conflicting_evidence";
    case Errc::too_large: return "too_large";
    case Errc::structure_mismatch: return "structure_mismatch";
    case Errc::bad_constraint: return "bad_constraint";
    case Errc::infeasible: return "infeasible";
    case Errc::irrelevant_parameter: return "irrelevant_parameter";
    case Errc::no_candidates: return "no_candidates";
    case Errc::too_many_sensors: return "too_many_sensors";
    case Errc::missing_sensor_evidence: return "missing_sensor_evidence";
    case Errc::deadline_exceeded: return "deadline_exceeded";
    case Errc::nothing_to_undo: return "nothing_to_undo";
  }
  return "unknown";
}

json error_json(const Error& error) {
  return json{{"error", {{"kind", to_string(error.kind())}, {"code", to_string(error.code())}, {"message", error.what()}}}};
}

json number(double value, const Format& format) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return nullptr;
  if (format.digits <= 0) return value;
  return std::stod(format_significant(value, format.digits));
}

json evidence_json(const Evidence& evidence) {
  json out = json::object();
  for (const auto& [name, state] : evidence) out[name] = state;
  return out;
}

Evidence evidence_from_json(const json& value) {
  if (value.is_null()) return {};
  if (value.is_string()) return parse_evidence(value.get<std::string>());
  if (!value.is_object()) throw ParseError("evidence must be an object or an \"A=t,B=f\" string");
  Evidence out;
  for (const auto& [name, state] : value.items()) {
    if (!state.is_string()) throw ParseError("state of '" + name + "' must be a string");
    out.emplace(name, state.get<std::string>());
  }
  return out;
}

json network_summary(const BayesianNetwork& net, const Format& f) {
  json variables = json::array(), cpts = json::array(), edges = json::array();
  for (VarId v = 0; v < net.size(); ++v) {
    const auto& var = net.variable(v);
    const auto& cpt = net.cpt(v);
    json parents = json::array();
    for (const VarId p : cpt.parents()) {
      parents.push_back(net.variable(p).name);
      edges.push_back(json::array({net.variable(p).name, var.name}));
    }
    variables.push_back({{"name", var.name}, {"states", var.states}, {"parents", parents}, {"binary", var.binary()}});
    json rows = json::array();
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      json assignment = json::object();
      const auto states = cpt.row_assignment(r);
      for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& pv = net.variable(cpt.parents()[i]);
        assignment[pv.name] = pv.states[states[i]];
      }
      json values = json::array(), locked = json::array();
      for (std::size_t s = 0; s < cpt.cardinality(); ++s) {
        values.push_back(number(cpt.at(r, s), f));
        locked.push_back(cpt.locked(r, s));
      }
      rows.push_back({{"parents", assignment}, {"values", values}, {"locked", locked}});
    }
    cpts.push_back({{"variable", var.name}, {"parents", parents}, {"rows", rows}});
  }
  return json{{"variables", variables}, {"cpts", cpts}, {"edges", edges}};
}

json query(const BayesianNetwork& net, const Evidence& target, const Evidence& evidence, const Format& f) {
  if (target.empty()) throw precondition_error(Errc::bad_constraint, "query needs a target event");
  net.observe(target);
  const double pe = joint_probability(net, evidence);
  return json{{"target", evidence_json(target)},
              {"evidence", evidence_json(evidence)},
              {"probability", number(posterior(net, target, evidence), f)},
              {"evidence_probability", number(pe, f)}};
}

json suggest_parameters(const BayesianNetwork& net, const QueryConstraint& constraint,
                        const std::vector<std::string>& cpts, const Format& f) {
  const auto solutions = suggest_single_parameters(net, constraint, cpts);
  json list = json::array();
  bool any = false;
  for (const auto& s : solutions) {
    const bool ok = s.status == SolveStatus::feasible;
    any = any || ok;
    json item{{"parameter", bnsens::to_string(s.parameter)},
              {"theta", number(s.theta, f)},
              {"alpha", number(s.alpha, f)},
              {"status", bnsens::to_string(s.status)}};
    if (ok) {
      item["low"] = number(s.low, f);
      item["high"] = number(s.high, f);
      item["suggested"] = number(s.suggested, f);
      item["delta"] = number(s.delta, f);
      item["distance"] = number(s.distance, f);
      item["achieved"] = number(s.achieved, f);
    }
    list.push_back(std::move(item));
  }
  const double current = posterior(net, constraint.target, constraint.evidence);
  return json{{"kind", "param"},
              {"constraint", constraint_json(constraint, f)},
              {"current", number(current, f)},
              {"feasible", any},
              {"solutions", std::move(list)}};
}

json suggest_cpt(const BayesianNetwork& net, const QueryConstraint& constraint, const std::string& variable,
                 const SolveOptions& options, const Format& f) {
  const auto r = optimal_single_cpt(net, constraint, variable, options);
  return json{{"kind", "cpt"},
              {"variable", variable},
              {"feasible", r.suggestion.feasible},
              {"report", report_json(r.report, net, f)},
              {"suggestion", suggestion_json(r.suggestion, net, f)},
              {"step", number(r.step, f)},
              {"iterations", r.residuals.size()},
              {"bound", bound_json(r.report.current(), r.suggestion.distance, f)}};
}

json suggest_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint, const std::string& x,
                     const std::string& y, const SolveOptions& options, const Format& f) {
  const auto r = optimal_two_cpt(net, constraint, x, y, options);
  return json{{"kind", "two-cpt"},
              {"x", x},
              {"y", y},
              {"feasible", r.suggestion.feasible},
              {"report", report_json(r.report, net, f)},
              {"suggestion", suggestion_json(r.suggestion, net, f)},
              {"step_x", number(r.step_x, f)},
              {"step_y", number(r.step_y, f)},
              {"evaluations", r.evaluations},
              {"bound", bound_json(r.report.current(), r.suggestion.distance, f)}};
}

json relevance(const BayesianNetwork& net, const QueryConstraint& constraint, const Format& f) {
  json ranking = json::array();
  for (const auto& r : prune_candidate_cpts(net, constraint))
    ranking.push_back({{"variable", r.variable}, {"max_abs_alpha", number(r.max_abs_alpha, f)}, {"active", r.active}});
  return json{{"kind", "relevance"}, {"constraint", constraint_json(constraint, f)}, {"ranking", std::move(ranking)}};
}

json soft_evidence(const BayesianNetwork& net, const std::vector<std::string>& hosts,
                   const QueryConstraint& constraint, const SolveOptions& options, const Format& f) {
  const SensorNetwork augmented = attach_virtual_sensors(net, hosts);
  QueryConstraint c = constraint;
  for (const auto& s : augmented.sensors) c.evidence = merge_evidence(c.evidence, {{s.node, kSensorOn}});
  const auto result = optimal_soft_evidence(augmented.network, augmented.sensors, c, options);
  json sensors = json::array();
  for (const auto& r : result.readings)
    sensors.push_back({{"host", r.sensor.host},
                       {"node", r.sensor.node},
                       {"true_positive", number(r.true_positive, f)},
                       {"false_positive", number(r.false_positive, f)},
                       {"false_negative", number(r.false_negative, f)},
                       {"likelihood_ratio", number(r.likelihood_ratio, f)}});
  return json{{"kind", "softev"},
              {"constraint", constraint_json(c, f)},
              {"feasible", result.suggestion.feasible},
              {"sensors", std::move(sensors)},
              {"suggestion", suggestion_json(result.suggestion, augmented.network, f)},
              {"total_distance", number(result.total_distance, f)}};
}

json bounds(std::optional<double> p, double d, std::size_t samples, const Format& f) {
  if (p) {
    const auto b = query_bounds(*p, d);
    return json{{"p", number(*p, f)}, {"d", number(d, f)}, {"lower", number(b.lower, f)}, {"upper", number(b.upper, f)}};
  }
  json curve = json::array();
  for (const auto& pt : bound_curve(d, samples))
    curve.push_back({{"p", number(pt.p, f)}, {"lower", number(pt.lower, f)}, {"upper", number(pt.upper, f)}});
  return json{{"d", number(d, f)}, {"curve", std::move(curve)}};
}

json solution_space(const BayesianNetwork& net, const QueryConstraint& constraint,
                    const std::vector<std::string>& cpts, const std::vector<ParameterRef>& parameters,
                    std::size_t samples, const Format& f) {
  std::optional<AlphaReport> report;
  std::optional<std::pair<ParameterRef, ParameterRef>> pair;

  if (parameters.size() == 2 && cpts.empty()) {
    const auto& a = parameters[0];
    const auto& b = parameters[1];
    report = a.variable == b.variable ? alpha_single_cpt(net, constraint, a.variable)
                                      : alpha_two_cpt(net, constraint, a.variable, b.variable);
    pair.emplace(a, b);
  } else if (parameters.empty() && cpts.size() == 1) {
    report = alpha_single_cpt(net, constraint, cpts[0]);
    if (report->alphas.size() == 2) pair.emplace(report->alphas[0].parameter, report->alphas[1].parameter);
  } else if (parameters.empty() && cpts.size() == 2) {
    report = alpha_two_cpt(net, constraint, cpts[0], cpts[1]);
    if (report->alphas.size() == 2 && report->alphas[0].parameter.variable != report->alphas[1].parameter.variable)
      pair.emplace(report->alphas[0].parameter, report->alphas[1].parameter);
  } else {
    throw precondition_error(Errc::bad_constraint, "solution space needs one or two CPTs, or exactly two parameters");
  }

  json out{{"kind", "solution-space"}, {"report", report_json(*report, net, f)}, {"boundary", nullptr}};
  if (pair) out["boundary"] = boundary_json(solution_boundary(net, constraint, pair->first, pair->second, samples), f);
  return out;
}

bool infeasible(const json& result) {
  const auto it = result.find("feasible");
  return it != result.end() && it->is_boolean() && !it->get<bool>();
}

std::vector<ParameterDelta> deltas_from_json(const json& value) {
  if (!value.is_array()) throw ParseError("deltas must be an array of {\"parameter\", \"delta\"} objects");
  std::vector<ParameterDelta> out;
  for (const auto& item : value) {
    if (!item.is_object() || !item.contains("parameter") || !item.contains("delta") ||
        !item["parameter"].is_string() || !item["delta"].is_number())
      throw ParseError("each delta needs a string \"parameter\" and a numeric \"delta\"");
    out.push_back({parse_parameter(item["parameter"].get<std::string>()), item["delta"].get<double>()});
  }
  return out;
}

}  // namespace bnsens::api
