#pragma once

#include <string>
#include <vector>

#include "bnsens/model.hpp"
#include "bnsens/sensitivity.hpp"

namespace bnsens {

/// A binary dummy child Q of a binary host R. Observing Q's first state with
/// P(q|r) / P(q|not r) = lambda is virtual evidence of strength lambda on R.
struct VirtualSensor {
  std::string host;
  std::string node;
};

inline constexpr const char* kSensorOn = "q";
inline constexpr const char* kSensorOff = "nq";

struct SensorNetwork {
  BayesianNetwork network;
  std::vector<VirtualSensor> sensors;
};

/// Adds "Q_<host>" (or the given names) with every parameter 0.5, so no query
/// that leaves the sensors unobserved changes.
SensorNetwork attach_virtual_sensors(const BayesianNetwork& net, const std::vector<std::string>& hosts,
                                     const std::vector<std::string>& names = {});

BayesianNetwork detach_virtual_sensors(const BayesianNetwork& net, const std::vector<VirtualSensor>& sensors);

struct SensorReading {
  VirtualSensor sensor;
  double true_positive = 0.5;   // P(q | r)
  double false_positive = 0.5;  // P(q | not r)
  double false_negative = 0.5;  // 1 - P(q | r)
  double likelihood_ratio = 1.0;
};

struct SoftEvidenceResult {
  std::vector<SensorReading> readings;
  Suggestion suggestion;
  double total_distance = 0.0;
};

SensorReading read_sensor(const BayesianNetwork& net, const VirtualSensor& sensor);

/// Weakest sensor readings (least distance) that make the constraint hold.
/// `net` must already carry the sensors, and the constraint's evidence must
/// observe each sensor in state "q". One or two sensors.
SoftEvidenceResult optimal_soft_evidence(const BayesianNetwork& net, const std::vector<VirtualSensor>& sensors,
                                         const QueryConstraint& constraint, const SolveOptions& options = {});

}  // namespace bnsens
