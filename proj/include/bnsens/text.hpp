#pragma once

// Short textual forms used on the command line and in HTTP bodies.

#include <string>
#include <string_view>

#include "bnsens/model.hpp"
#include "bnsens/sensitivity.hpp"

namespace bnsens {

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

/// printf "%.{digits}g"; infinities print as "inf" / "-inf".
std::string format_significant(double value, int digits = 6);

/// "Smoke=t,Leaving=t". Empty text gives empty evidence. A variable may
/// appear twice only with the same state.
Evidence parse_evidence(std::string_view text);

/// "Alarm=t|Fire=f,Tampering=t" or "Fire=t" for a root.
ParameterRef parse_parameter(std::string_view text);

/// "P(Fire=t|Leaving=t)<=0.025". Evidence written inside the P(...) is merged
/// with `evidence`.
QueryConstraint parse_constraint(std::string_view text, const Evidence& evidence = {});

std::string to_string(const QueryConstraint& constraint);

}  // namespace bnsens
