#pragma once

#include <vector>

#include "uavnet/bandwidth_lp.hpp"
#include "uavnet/convex/program.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

/// Expansion point of the successive convex approximation. All arrays are indexed
/// by slot j = 0..J; squared distances are in m^2.
struct ScaLocalPoint {
  Trajectory traj;
  std::vector<std::vector<double>> dist_sq;  // [v][j] UAV-vehicle squared distance
  std::vector<double> bs_dist_sq;            // [j] UAV-base-station squared distance
  std::vector<double> induced;               // [j] induced-power factor at the slot speed
  std::vector<double> speed;                 // [j] slot speed, m/s
};

/// Tangent of t -> log2(1 + a/t) at t_r: the affine map t -> intercept - slope (t - t_r)
/// is a global lower bound on t > 0.
struct RateTangent {
  double intercept = 0.0;
  double slope = 0.0;

  [[nodiscard]] double at(double t, double t_r) const { return intercept - slope * (t - t_r); }
};
RateTangent linearize_rate(double t_r, double a);

/// Affine lower bound d_coeff * D + s_coeff * S + constant of D^2 + S^2 / s0^2, tight
/// at (D_r, S_r).
struct PowerTangent {
  double d_coeff = 0.0;
  double s_coeff = 0.0;
  double constant = 0.0;

  [[nodiscard]] double at(double d, double s) const { return d_coeff * d + s_coeff * s + constant; }
};
PowerTangent linearize_power_rhs(double d_r, double s_r, double s0);

ScaLocalPoint init_local_point(const ScenarioConfig& scenario, const Trajectory& traj);

/// Convexified trajectory program around a local point. Positions are in km, squared
/// distances in km^2, rates in bits/s/Hz.
struct TrajectorySubproblem {
  convex::ConvexProgram program;
  std::vector<int> x_var, y_var, speed_var, induced_var, bs_var;  // [j], -1 at j = 0
  std::vector<std::vector<int>> dist_var;                        // [v][j], -1 when share is 0
  int eta_var = -1;
};

inline constexpr double kLengthScale = 1000.0;  // m per program length unit

/// `enforce_rate_floor` drops the high-speed floor rows when false.
TrajectorySubproblem build_trajectory_subproblem(const ScenarioConfig& scenario,
                                                 const std::vector<std::vector<double>>& share,
                                                 const ScaLocalPoint& local, bool enforce_rate_floor);

/// Variable vector of `sub` at the local point itself: exact squared distances,
/// exact induced factor, slot speeds, and eta equal to the true objective.
std::vector<double> local_point_vector(const TrajectorySubproblem& sub, const ScenarioConfig& scenario,
                                       const std::vector<std::vector<double>>& share,
                                       const ScaLocalPoint& local);

/// Min over normal vehicles of the average rate, bps, with exact distances.
double true_objective(const ScenarioConfig& scenario, const Trajectory& traj,
                      const std::vector<std::vector<double>>& share);

/// Straight flight along the road centerline at min(S_U, 0.99 x power-capped speed,
/// road length / flight time), clipped to the road box.
Trajectory initial_trajectory(const ScenarioConfig& scenario);

struct ScaResult {
  Trajectory traj;
  double eta = 0.0;            // bps
  std::vector<double> trace;   // true objective, trace[0] at the start trajectory
  int iterations = 0;          // convex programs solved
  int rejected = 0;            // solves whose true objective fell below the previous one
  int newton_steps = 0;
};

/// Successive convex approximation with fixed shares. Stops when the relative
/// change of the true objective is below settings.epsilon or after
/// settings.max_sca_iterations solves. Throws InfeasibleError or SolverError.
ScaResult optimize_trajectory(const ScenarioConfig& scenario,
                              const std::vector<std::vector<double>>& share, const Trajectory& init,
                              const SolverSettings& settings, bool enforce_rate_floor = true);

/// True when |current - previous| < epsilon * max(|previous|, 1); always true for
/// an infinite epsilon.
bool objective_converged(double previous, double current, double epsilon);

}  // namespace uavnet
