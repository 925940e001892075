#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavnet/convex/program.hpp"
#include "uavnet/convex/solver.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

/// Per-slot bandwidth shares. share[v][j] for j = 0..J; slot 0 is the start
/// position and never carries traffic.
struct BandwidthPlan {
  std::vector<std::vector<double>> share;
  double eta = 0.0;  // bps, min over normal vehicles of the average rate

  [[nodiscard]] double at(int v, int j) const {
    return share[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
  }
};

/// Data the allocation LP depends on, independent of how it was produced.
struct BandwidthInstance {
  int slot_count = 0;
  double bandwidth = 0.0;                      // B, Hz (scales the LP)
  std::vector<std::vector<double>> coeff;      // [v][j] rate at share 1, bps; 0 when absent
  std::vector<std::vector<bool>> present;      // [v][j]
  std::vector<bool> high_speed;                // [v]
  std::vector<double> rate_floor;              // [v], bps
  std::vector<double> backhaul;                // [j], bps

  [[nodiscard]] int vehicle_count() const { return static_cast<int>(coeff.size()); }
};

/// Rate of every vehicle in every slot at full bandwidth; 0 for absent slots.
std::vector<std::vector<double>> rate_coefficients(const ScenarioConfig& scenario,
                                                   const Trajectory& traj);
/// Backhaul capacity per slot (index 0 included).
std::vector<double> backhaul_capacities(const ScenarioConfig& scenario, const Trajectory& traj);

BandwidthInstance make_bandwidth_instance(const ScenarioConfig& scenario, const Trajectory& traj);

struct BandwidthLp {
  convex::ConvexProgram program;
  std::vector<std::vector<int>> share_var;  // [v][j] variable index or -1
  int eta_var = -1;
};

/// Max-min LP in rate units of B (bits/s/Hz): maximize eta subject to per-vehicle
/// average-rate rows, rate floors for present high-speed vehicles, per-slot
/// backhaul, per-slot simplex and share bounds.
BandwidthLp build_bandwidth_lp(const BandwidthInstance& instance);

/// Exact per-slot feasibility test of the floors: sum of floor/coeff <= 1 and sum of
/// floors <= backhaul. Returns a diagnostic naming the first failing slot.
std::optional<std::string> bandwidth_infeasibility(const BandwidthInstance& instance);

/// Average rate of each vehicle over the J service slots, bps.
std::vector<double> average_rates(const BandwidthInstance& instance,
                                  const std::vector<std::vector<double>>& share);
/// Minimum average rate over normal-speed vehicles, bps.
double min_normal_average(const BandwidthInstance& instance,
                          const std::vector<std::vector<double>>& share);

/// Optimal plan. Throws InfeasibleError (naming vehicle and slot) or SolverError.
BandwidthPlan solve_bandwidth(const BandwidthInstance& instance, const convex::SolveOptions& options);
BandwidthPlan solve_bandwidth(const ScenarioConfig& scenario, const Trajectory& traj,
                              const convex::SolveOptions& options);

struct ElasticPlan {
  BandwidthPlan plan;
  double max_shortfall = 0.0;  // bps, largest unmet rate floor
};

/// Minimizes the largest rate-floor shortfall. Diagnostic use only.
ElasticPlan solve_bandwidth_elastic(const BandwidthInstance& instance,
                                    const convex::SolveOptions& options);

/// Barrier settings from the scenario's solver block.
convex::SolveOptions solve_options(const SolverSettings& settings);

}  // namespace uavnet
