#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavnet/bandwidth_lp.hpp"
#include "uavnet/scenario.hpp"
#include "uavnet/verification.hpp"

namespace uavnet {

enum class Mode { Proposed, CenterHover, EqualBandwidth };

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct Solution {
  Mode mode = Mode::Proposed;
  Trajectory trajectory;
  BandwidthPlan plan;
  double eta = 0.0;                             // bps
  double initial_objective = 0.0;               // bps, before the first iteration
  std::vector<double> outer_trace;              // true objective after each outer iteration
  std::vector<std::vector<double>> inner_traces;  // one trace per trajectory optimization
  std::vector<double> per_vehicle_avg_rates;    // bps
  std::vector<std::vector<double>> per_slot_rates;  // [v][j], bps
  std::vector<double> backhaul_capacity;        // [j], bps
  VerificationReport verification;
  int outer_iterations = 0;
  int rejected_steps = 0;  // steps discarded because the true objective fell
  bool used_elastic = false;
  bool repaired = false;
};

/// Alternates the bandwidth LP and trajectory optimization from the straight-line
/// trajectory until the relative objective change falls below settings.epsilon.
Solution run_bca(const ScenarioConfig& scenario);

/// CenterHover: UAV fixed at the road center, bandwidth LP only.
/// EqualBandwidth: share 1/V for present vehicles, trajectory optimization only; the
/// rate floor is reported but not enforced.
Solution run_baseline(const ScenarioConfig& scenario, Mode mode);

Solution run_mode(const ScenarioConfig& scenario, Mode mode);

/// Scales all shares of each slot whose exact load exceeds the backhaul capacity by
/// capacity / load. Returns true when any slot changed.
bool repair_backhaul(const ScenarioConfig& scenario, const Trajectory& traj,
                     std::vector<std::vector<double>>& share);

/// Equal split over present vehicles, 1 / (vehicles present in the slot).
std::vector<std::vector<double>> equal_split_shares(const ScenarioConfig& scenario);

}  // namespace uavnet
