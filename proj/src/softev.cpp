#include "bnsens/softev.hpp"

#include "bnsens/distance.hpp"
#include "bnsens/error.hpp"

namespace bnsens {

SensorNetwork attach_virtual_sensors(const BayesianNetwork& net, const std::vector<std::string>& hosts,
                                     const std::vector<std::string>& names) {
  if (!names.empty() && names.size() != hosts.size())
    throw precondition_error(Errc::bad_constraint, "give one sensor name per host");
  SensorNetwork out{net, {}};
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    const VarId h = net.id(hosts[i]);
    if (!net.variable(h).binary())
      throw precondition_error(Errc::multi_valued, "sensor host '" + hosts[i] + "' must be binary");
    for (const auto& s : out.sensors)
      if (s.host == hosts[i])
        throw precondition_error(Errc::duplicate_name, "'" + hosts[i] + "' already has a sensor");
    const std::string node = names.empty() ? "Q_" + hosts[i] : names[i];
    if (out.network.find(node))
      throw precondition_error(Errc::duplicate_name, "a variable named '" + node + "' already exists");
    out.network.add_variable(node, {kSensorOn, kSensorOff});
    out.network.set_cpt(node, {hosts[i]}, std::vector<double>(4, 0.5));
    out.sensors.push_back({hosts[i], node});
  }
  return out;
}

BayesianNetwork detach_virtual_sensors(const BayesianNetwork& net, const std::vector<VirtualSensor>& sensors) {
  std::vector<std::string> names;
  for (const auto& s : sensors) names.push_back(s.node);
  return net.without_variables(names);
}

SensorReading read_sensor(const BayesianNetwork& net, const VirtualSensor& sensor) {
  const VarId q = net.id(sensor.node);
  const auto& cpt = net.cpt(q);
  SensorReading r;
  r.sensor = sensor;
  r.true_positive = cpt.at(0, 0);
  r.false_positive = cpt.at(1, 0);
  r.false_negative = 1.0 - r.true_positive;
  r.likelihood_ratio = r.true_positive / r.false_positive;
  return r;
}

SoftEvidenceResult optimal_soft_evidence(const BayesianNetwork& net, const std::vector<VirtualSensor>& sensors,
                                         const QueryConstraint& constraint, const SolveOptions& options) {
  if (sensors.empty() || sensors.size() > 2)
    throw precondition_error(Errc::too_many_sensors, "soft evidence design supports one or two sensors, got " +
                                                         std::to_string(sensors.size()));
  for (const auto& s : sensors) {
    const auto it = constraint.evidence.find(s.node);
    if (it == constraint.evidence.end() || it->second != kSensorOn)
      throw precondition_error(Errc::missing_sensor_evidence,
                               "the evidence must observe sensor " + s.node + "=" + kSensorOn);
  }

  SoftEvidenceResult out;
  if (sensors.size() == 1) {
    out.suggestion = optimal_single_cpt(net, constraint, sensors[0].node, options).suggestion;
  } else {
    out.suggestion = optimal_two_cpt(net, constraint, sensors[0].node, sensors[1].node, options).suggestion;
  }
  out.total_distance = out.suggestion.distance;
  const BayesianNetwork tuned = apply_deltas(net, out.suggestion.deltas);
  for (const auto& s : sensors) out.readings.push_back(read_sensor(tuned, s));
  return out;
}

}  // namespace bnsens
