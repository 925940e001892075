#include "uavnet/bca.hpp"

#include <algorithm>

#include "uavnet/errors.hpp"
#include "uavnet/trajectory_sca.hpp"

namespace uavnet {

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Proposed:
      return "proposed";
    case Mode::CenterHover:
      return "center-hover";
    case Mode::EqualBandwidth:
      return "equal-bandwidth";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::Proposed, Mode::CenterHover, Mode::EqualBandwidth}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> equal_split_shares(const ScenarioConfig& s) {
  const auto present = vehicles_present(s);
  std::vector<std::vector<double>> share(s.vehicles.size(),
                                         std::vector<double>(static_cast<std::size_t>(s.slot_count + 1), 0.0));
  for (std::size_t v = 0; v < s.vehicles.size(); ++v) {
    for (int j = 1; j <= s.slot_count; ++j) {
      if (s.vehicles[v].present[j]) share[v][j] = 1.0 / present[j];
    }
  }
  return share;
}

bool repair_backhaul(const ScenarioConfig& s, const Trajectory& traj,
                     std::vector<std::vector<double>>& share) {
  const auto coeff = rate_coefficients(s, traj);
  const auto capacity = backhaul_capacities(s, traj);
  bool changed = false;
  for (int j = 1; j <= s.slot_count; ++j) {
    double load = 0.0;
    for (int v = 0; v < s.vehicle_count(); ++v) load += coeff[v][j] * share[v][j];
    // Rescaled slots land within rounding of capacity; leave them alone on a second pass.
    if (load <= capacity[j] * (1.0 + 1e-12)) continue;
    const double factor = capacity[j] / load;
    for (int v = 0; v < s.vehicle_count(); ++v) share[v][j] *= factor;
    changed = true;
  }
  return changed;
}

namespace {

void finalize(const ScenarioConfig& s, Solution& sol, bool enforce_rate_floor) {
  sol.repaired = repair_backhaul(s, sol.trajectory, sol.plan.share);
  const auto coeff = rate_coefficients(s, sol.trajectory);
  sol.backhaul_capacity = backhaul_capacities(s, sol.trajectory);
  sol.per_slot_rates = coeff;
  for (std::size_t v = 0; v < coeff.size(); ++v) {
    for (std::size_t j = 0; j < coeff[v].size(); ++j) sol.per_slot_rates[v][j] = coeff[v][j] * sol.plan.share[v][j];
  }
  sol.verification = verify_solution(s, sol.trajectory, sol.plan.share, enforce_rate_floor);
  sol.per_vehicle_avg_rates = sol.verification.average_rates;
  sol.eta = sol.verification.eta;
  sol.plan.eta = sol.eta;
}

}  // namespace

Solution run_bca(const ScenarioConfig& s) {
  const convex::SolveOptions options = solve_options(s.solver);
  Solution sol;
  sol.mode = Mode::Proposed;
  sol.trajectory = initial_trajectory(s);
  sol.plan.share = equal_split_shares(s);
  sol.initial_objective = true_objective(s, sol.trajectory, sol.plan.share);
  double previous = sol.initial_objective;

  for (int r = 1; r <= s.solver.max_outer_iterations; ++r) {
    const BandwidthInstance inst = make_bandwidth_instance(s, sol.trajectory);
    BandwidthPlan plan;
    try {
      plan = solve_bandwidth(inst, options);
    } catch (const InfeasibleError& e) {
      if (r != 1 || sol.used_elastic) throw;
      // One trajectory pass against the least-infeasible plan, then retry.
      const ElasticPlan elastic = solve_bandwidth_elastic(inst, options);
      sol.used_elastic = true;
      const std::string why = std::string(e.what()) + "; elastic shortfall " +
                              std::to_string(elastic.max_shortfall) + " bps";
      try {
        const ScaResult rescue = optimize_trajectory(s, elastic.plan.share, sol.trajectory, s.solver, true);
        sol.inner_traces.push_back(rescue.trace);
        sol.trajectory = rescue.traj;
        plan = solve_bandwidth(s, sol.trajectory, options);
      } catch (const InfeasibleError& again) {
        throw InfeasibleError(why + "; after trajectory pass: " + again.what());
      }
    }
    const ScaResult sca = optimize_trajectory(s, plan.share, sol.trajectory, s.solver, true);
    sol.inner_traces.push_back(sca.trace);
    sol.rejected_steps += sca.rejected;
    ++sol.outer_iterations;
    if (sca.eta < previous && !sol.outer_trace.empty()) {
      ++sol.rejected_steps;
      break;
    }
    sol.trajectory = sca.traj;
    sol.plan = plan;
    sol.plan.eta = sca.eta;
    sol.outer_trace.push_back(sca.eta);
    const bool done = objective_converged(previous, sca.eta, s.solver.epsilon);
    previous = sca.eta;
    if (done) break;
  }

  // Shares re-optimized for the final trajectory with the exact backhaul.
  sol.plan = solve_bandwidth(s, sol.trajectory, options);
  finalize(s, sol, true);
  return sol;
}

Solution run_baseline(const ScenarioConfig& s, Mode mode) {
  Solution sol;
  sol.mode = mode;
  if (mode == Mode::Proposed) return run_bca(s);
  if (mode == Mode::CenterHover) {
    ScenarioConfig hover = s;
    hover.uav_initial_xy = {s.road_length / 2.0, s.road_width / 2.0};
    sol.trajectory.altitude = s.uav_altitude;
    sol.trajectory.xy.assign(static_cast<std::size_t>(s.slot_count + 1), hover.uav_initial_xy);
    sol.plan = solve_bandwidth(hover, sol.trajectory, solve_options(s.solver));
    sol.initial_objective = sol.plan.eta;
    sol.outer_iterations = 1;
    finalize(hover, sol, true);
    sol.outer_trace = {sol.eta};
    return sol;
  }
  const int V = s.vehicle_count();
  sol.plan.share.assign(static_cast<std::size_t>(V), std::vector<double>(static_cast<std::size_t>(s.slot_count + 1), 0.0));
  for (int v = 0; v < V; ++v) {
    for (int j = 1; j <= s.slot_count; ++j) {
      if (s.vehicles[v].present[j]) sol.plan.share[v][j] = 1.0 / V;
    }
  }
  const Trajectory init = initial_trajectory(s);
  sol.initial_objective = true_objective(s, init, sol.plan.share);
  const ScaResult sca = optimize_trajectory(s, sol.plan.share, init, s.solver, false);
  sol.trajectory = sca.traj;
  sol.inner_traces.push_back(sca.trace);
  sol.rejected_steps = sca.rejected;
  sol.outer_iterations = 1;
  finalize(s, sol, false);
  sol.outer_trace = {sol.eta};
  return sol;
}

Solution run_mode(const ScenarioConfig& scenario, Mode mode) {
  return mode == Mode::Proposed ? run_bca(scenario) : run_baseline(scenario, mode);
}

}  // namespace uavnet
