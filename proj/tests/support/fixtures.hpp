#pragma once

#include <vector>

#include "uavnet/scenario.hpp"

namespace uavnet::testing {

/// Default parameters on a shorter horizon (J slots of 4 s) so full pipelines run fast.
inline ScenarioTemplate short_template(int slots = 20, std::uint64_t seed = 7) {
  ScenarioTemplate tmpl = default_template();
  tmpl.base.slot_count = slots;
  tmpl.base.flight_duration = 4.0 * slots;
  std::get<SamplerSpec>(tmpl.fleet).seed = seed;
  return tmpl;
}

/// Explicit fleet: speeds with matching initial positions, lanes from the sampler rule.
inline ScenarioTemplate tracked_template(const std::vector<double>& speeds, const std::vector<double>& initial_x,
                                         int slots = 20) {
  ScenarioTemplate tmpl = short_template(slots);
  std::vector<VehicleSpec> fleet;
  for (std::size_t v = 0; v < speeds.size(); ++v) {
    VehicleSpec spec;
    spec.speed = speeds[v];
    spec.initial_x = initial_x[v];
    fleet.push_back(spec);
  }
  tmpl.fleet = fleet;
  return tmpl;
}

}  // namespace uavnet::testing
