#pragma once

// Structured results shared by the command line and the HTTP service. Both
// front-ends call these and only differ in how they print, so their machine
// output agrees field for field.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnsens/distance.hpp"
#include "bnsens/error.hpp"
#include "bnsens/model.hpp"
#include "bnsens/sensitivity.hpp"
#include "bnsens/softev.hpp"

namespace bnsens::api {

using json = nlohmann::ordered_json;

struct Format {
  /// Significant digits for every number; 0 keeps full double precision.
  int digits = 0;
};

std::string_view to_string(ErrorKind kind);
std::string_view to_string(Errc code);
json error_json(const Error& error);

/// Numbers rounded per `format`; infinities become the strings "inf" / "-inf".
json number(double value, const Format& format);

json evidence_json(const Evidence& evidence);
/// Accepts {"A":"t"} objects or "A=t,B=f" strings.
Evidence evidence_from_json(const json& value);

json network_summary(const BayesianNetwork& net, const Format& format);

json query(const BayesianNetwork& net, const Evidence& target, const Evidence& evidence, const Format& format);

json suggest_parameters(const BayesianNetwork& net, const QueryConstraint& constraint,
                        const std::vector<std::string>& cpts, const Format& format);

json suggest_cpt(const BayesianNetwork& net, const QueryConstraint& constraint, const std::string& variable,
                 const SolveOptions& options, const Format& format);

json suggest_two_cpt(const BayesianNetwork& net, const QueryConstraint& constraint, const std::string& x,
                     const std::string& y, const SolveOptions& options, const Format& format);

json relevance(const BayesianNetwork& net, const QueryConstraint& constraint, const Format& format);

/// Attaches one sensor per host, adds "<sensor>=q" to the constraint's
/// evidence and designs the readings.
json soft_evidence(const BayesianNetwork& net, const std::vector<std::string>& hosts,
                   const QueryConstraint& constraint, const SolveOptions& options, const Format& format);

/// One (lower, upper) pair when `p` is given, otherwise the sampled curve.
json bounds(std::optional<double> p, double d, std::size_t samples, const Format& format);

/// Coefficients for one CPT, two CPTs, or two named parameters, plus the
/// sampled boundary whenever exactly two parameters are free.
json solution_space(const BayesianNetwork& net, const QueryConstraint& constraint,
                    const std::vector<std::string>& cpts, const std::vector<ParameterRef>& parameters,
                    std::size_t samples, const Format& format);

/// True when a result reports an unsatisfiable constraint.
bool infeasible(const json& result);

std::vector<ParameterDelta> deltas_from_json(const json& value);

}  // namespace bnsens::api
