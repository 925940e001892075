#include "uavnet/trajectory_sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uavnet/errors.hpp"

namespace uavnet {

using convex::AffineExpr;

RateTangent linearize_rate(double t_r, double a) {
  return {std::log1p(a / t_r) * kLog2E, kLog2E * a / ((t_r + a) * t_r)};
}

PowerTangent linearize_power_rhs(double d_r, double s_r, double s0) {
  const double s0_sq = s0 * s0;
  return {2.0 * d_r, 2.0 * s_r / s0_sq, -d_r * d_r - s_r * s_r / s0_sq};
}

ScaLocalPoint init_local_point(const ScenarioConfig& s, const Trajectory& traj) {
  ScaLocalPoint local;
  local.traj = traj;
  const auto slots = traj.xy.size();
  local.speed = uav_speed_profile(traj, s.slot_length);
  local.induced.resize(slots);
  local.bs_dist_sq.resize(slots);
  for (std::size_t j = 0; j < slots; ++j) {
    local.induced[j] = induced_power_factor(local.speed[j], s.power_model.hover_induced_speed);
    const double db = uav_bs_distance(traj.xy[j], traj.altitude, s.bs_position);
    local.bs_dist_sq[j] = db * db;
  }
  local.dist_sq.assign(s.vehicles.size(), std::vector<double>(slots, 0.0));
  for (std::size_t v = 0; v < s.vehicles.size(); ++v) {
    for (std::size_t j = 0; j < slots; ++j) {
      const double d = uav_vehicle_distance(s.vehicles[v].position(static_cast<int>(j)), traj.xy[j],
                                            traj.altitude);
      local.dist_sq[v][j] = d * d;
    }
  }
  return local;
}

double true_objective(const ScenarioConfig& s, const Trajectory& traj,
                      const std::vector<std::vector<double>>& share) {
  const auto coeff = rate_coefficients(s, traj);
  double best = std::numeric_limits<double>::infinity();
  for (int v : s.normal_indices()) {
    double sum = 0.0;
    for (int j = 1; j <= s.slot_count; ++j) sum += coeff[v][j] * share[v][j];
    best = std::min(best, sum / s.slot_count);
  }
  return best;
}

bool objective_converged(double previous, double current, double epsilon) {
  if (std::isinf(epsilon)) return true;
  return std::abs(current - previous) < epsilon * std::max(std::abs(previous), 1.0);
}

namespace {

constexpr double kInducedFloor = 1e-6;

struct Scales {
  double L2 = kLengthScale * kLengthScale;
  double access = 0.0;    // a = p d0 / sigma^2, km^2
  double backhaul = 0.0;  // km^2
  double altitude_sq = 0.0;
  double bs_height_sq = 0.0;
};

Scales scales_of(const ScenarioConfig& s) {
  Scales sc;
  sc.access = s.access_snr_scale() / sc.L2;
  sc.backhaul = s.backhaul_snr_scale() / sc.L2;
  sc.altitude_sq = s.uav_altitude * s.uav_altitude / sc.L2;
  const double dz = s.uav_altitude - s.bs_position.z;
  sc.bs_height_sq = dz * dz / sc.L2;
  return sc;
}

std::string tag(const char* what, int j) { return std::string(what) + " of slot " + std::to_string(j); }

}  // namespace

TrajectorySubproblem build_trajectory_subproblem(const ScenarioConfig& s,
                                                 const std::vector<std::vector<double>>& share,
                                                 const ScaLocalPoint& local, bool enforce_rate_floor) {
  TrajectorySubproblem sub;
  auto& prog = sub.program;
  const int J = s.slot_count;
  const int V = s.vehicle_count();
  const Scales sc = scales_of(s);
  const double B = s.total_bandwidth;
  const double L = kLengthScale;
  const auto slots = static_cast<std::size_t>(J + 1);

  sub.x_var.assign(slots, -1);
  sub.y_var.assign(slots, -1);
  sub.speed_var.assign(slots, -1);
  sub.induced_var.assign(slots, -1);
  sub.bs_var.assign(slots, -1);
  sub.dist_var.assign(static_cast<std::size_t>(V), std::vector<int>(slots, -1));

  const double t_max = (s.road_length * s.road_length + s.road_width * s.road_width) / sc.L2 +
                       sc.altitude_sq + 1.0;
  double tb_max = 0.0;
  for (double cx : {0.0, s.road_length}) {
    for (double cy : {0.0, s.road_width}) {
      const double d = uav_bs_distance({cx, cy}, s.uav_altitude, s.bs_position);
      tb_max = std::max(tb_max, d * d / sc.L2);
    }
  }
  tb_max += 1.0;

  for (int j = 1; j <= J; ++j) {
    const std::string js = std::to_string(j);
    sub.x_var[j] = prog.add_variable("x[" + js + "]", 0.0, s.road_length / L);
    sub.y_var[j] = prog.add_variable("y[" + js + "]", 0.0, s.road_width / L);
    sub.speed_var[j] = prog.add_variable("speed[" + js + "]", 0.0, s.uav_max_speed);
    sub.induced_var[j] = prog.add_variable("induced[" + js + "]", kInducedFloor, 1.5);
    sub.bs_var[j] = prog.add_variable("bs_dist_sq[" + js + "]", 0.0, tb_max);
    for (int v = 0; v < V; ++v) {
      if (!s.vehicles[v].present[j] || !(share[v][j] > 0.0)) continue;
      sub.dist_var[v][j] = prog.add_variable("dist_sq[" + std::to_string(v) + "][" + js + "]", 0.0, t_max);
    }
  }
  const double eff_max = std::log2(1.0 + sc.access / sc.altitude_sq);
  sub.eta_var = prog.add_variable("eta", -1.0, eff_max + 1.0);
  prog.set_objective_coeff(sub.eta_var, 1.0);

  auto tangent = [&](int v, int j) { return linearize_rate(local.dist_sq[v][j] / sc.L2, sc.access); };

  // Max-min rows on the linearized average rates.
  for (int v = 0; v < V; ++v) {
    if (s.vehicles[v].cls != VehicleClass::Normal) continue;
    AffineExpr row;
    row.add(sub.eta_var, 1.0);
    for (int j = 1; j <= J; ++j) {
      const int k = sub.dist_var[v][j];
      if (k < 0) continue;
      const RateTangent tg = tangent(v, j);
      const double kappa = share[v][j] / J;
      const double t_r = local.dist_sq[v][j] / sc.L2;
      row.add(k, kappa * tg.slope).shift(-kappa * (tg.intercept + tg.slope * t_r));
    }
    prog.add_linear(std::move(row), "max-min average rate of vehicle " + std::to_string(v));
  }

  // Rate floors, divided through by the share.
  if (enforce_rate_floor) {
    for (int v = 0; v < V; ++v) {
      const VehicleTrack& track = s.vehicles[v];
      if (track.cls != VehicleClass::HighSpeed) continue;
      for (int j = 1; j <= J; ++j) {
        if (!track.present[j]) continue;
        const int k = sub.dist_var[v][j];
        if (k < 0) {
          if (track.rate_floor > 0.0) {
            throw InfeasibleError("rate floor of vehicle " + std::to_string(v) + " slot " +
                                  std::to_string(j) + " has no bandwidth");
          }
          continue;
        }
        const RateTangent tg = tangent(v, j);
        const double t_r = local.dist_sq[v][j] / sc.L2;
        AffineExpr row;
        row.add(k, tg.slope).shift(track.rate_floor / (B * share[v][j]) - tg.intercept - tg.slope * t_r);
        prog.add_linear(std::move(row),
                        "rate floor of vehicle " + std::to_string(v) + " slot " + std::to_string(j));
      }
    }
  }

  const double backhaul_ratio = s.backhaul_bandwidth / B;
  const PowerModelParams pm = s.power_model;
  const double comm = s.total_comm_power;
  const double budget = s.power_budget;
  const double s0 = pm.hover_induced_speed;
  for (int j = 1; j <= J; ++j) {
    // Backhaul: linearized slot load against the linearized capacity.
    AffineExpr load;
    for (int v = 0; v < V; ++v) {
      const int k = sub.dist_var[v][j];
      if (k < 0) continue;
      const RateTangent tg = tangent(v, j);
      const double t_r = local.dist_sq[v][j] / sc.L2;
      load.add(k, -share[v][j] * tg.slope).shift(share[v][j] * (tg.intercept + tg.slope * t_r));
    }
    if (!load.terms.empty()) {
      const double tb_r = local.bs_dist_sq[j] / sc.L2;
      const RateTangent tb = linearize_rate(tb_r, sc.backhaul);
      load.add(sub.bs_var[j], backhaul_ratio * tb.slope)
          .shift(-backhaul_ratio * (tb.intercept + tb.slope * tb_r));
      prog.add_linear(std::move(load), tag("backhaul", j));
    }

    // Propulsion plus communication power within the budget (normalized by it).
    prog.add_smooth(
        {sub.speed_var[j], sub.induced_var[j]},
        [pm, comm, budget](std::span<const double> x, std::span<double> g, std::span<double> h) {
          const double sp = std::max(x[0], 0.0);
          const double ut2 = pm.tip_speed * pm.tip_speed;
          const double c = pm.parasitic_coefficient();
          const double p = comm + pm.blade_profile_power * (1.0 + 3.0 * x[0] * x[0] / ut2) +
                           pm.induced_power * x[1] + c * sp * sp * sp;
          if (!g.empty()) {
            g[0] = (6.0 * pm.blade_profile_power * x[0] / ut2 + 3.0 * c * sp * sp) / budget;
            g[1] = pm.induced_power / budget;
            h[0] = (6.0 * pm.blade_profile_power / ut2 + 6.0 * c * sp) / budget;
            h[1] = h[2] = h[3] = 0.0;
          }
          return p / budget - 1.0;
        },
        tag("power", j));

    // Induced-power factor: 1/D^2 below the tangent of D^2 + S^2/s0^2.
    const PowerTangent pt = linearize_power_rhs(local.induced[j], local.speed[j], s0);
    prog.add_smooth(
        {sub.induced_var[j], sub.speed_var[j]},
        [pt](std::span<const double> x, std::span<double> g, std::span<double> h) {
          const double d = x[0];
          if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
          const double inv2 = 1.0 / (d * d);
          if (!g.empty()) {
            g[0] = -2.0 * inv2 / d - pt.d_coeff;
            g[1] = -pt.s_coeff;
            h[0] = 6.0 * inv2 * inv2;
            h[1] = h[2] = h[3] = 0.0;
          }
          return inv2 - pt.at(d, x[1]);
        },
        tag("induced power", j));

    // Squared-distance epigraphs.
    for (int v = 0; v < V; ++v) {
      const int k = sub.dist_var[v][j];
      if (k < 0) continue;
      const Vec2 p = s.vehicles[v].position(j);
      prog.add_quadratic({AffineExpr{}.add(sub.x_var[j], 1.0).shift(-p.x / L),
                          AffineExpr{}.add(sub.y_var[j], 1.0).shift(-p.y / L)},
                         AffineExpr{}.add(k, 1.0).shift(-sc.altitude_sq),
                         "distance of vehicle " + std::to_string(v) + " slot " + std::to_string(j));
    }
    prog.add_quadratic({AffineExpr{}.add(sub.x_var[j], 1.0).shift(-s.bs_position.x / L),
                        AffineExpr{}.add(sub.y_var[j], 1.0).shift(-s.bs_position.y / L)},
                       AffineExpr{}.add(sub.bs_var[j], 1.0).shift(-sc.bs_height_sq),
                       tag("base-station distance", j));

    // Speed epigraph: step length within speed * slot length.
    AffineExpr dx;
    AffineExpr dy;
    dx.add(sub.x_var[j], 1.0);
    dy.add(sub.y_var[j], 1.0);
    if (j == 1) {
      dx.shift(-s.uav_initial_xy.x / L);
      dy.shift(-s.uav_initial_xy.y / L);
    } else {
      dx.add(sub.x_var[j - 1], -1.0);
      dy.add(sub.y_var[j - 1], -1.0);
    }
    prog.add_cone({dx, dy}, AffineExpr{}.add(sub.speed_var[j], s.slot_length / L), tag("mobility", j));
  }

  // Start hint: the local point nudged into the strict interior.
  Trajectory nudged = local.traj;
  for (int j = 1; j <= J; ++j) {
    const double mx = 1e-9 * s.road_length;
    const double my = 1e-9 * s.road_width;
    nudged.xy[j].x = std::clamp(nudged.xy[j].x, mx, s.road_length - mx);
    nudged.xy[j].y = std::clamp(nudged.xy[j].y, my, s.road_width - my);
  }
  const ScaLocalPoint hint_geom = init_local_point(s, nudged);
  std::vector<double> start(static_cast<std::size_t>(prog.variable_count()), 0.0);
  constexpr double kMargin = 1e-9;
  for (int j = 1; j <= J; ++j) {
    start[sub.x_var[j]] = nudged.xy[j].x / L;
    start[sub.y_var[j]] = nudged.xy[j].y / L;
    start[sub.speed_var[j]] =
        std::max(hint_geom.speed[j], local.speed[j]) * (1.0 + kMargin) + 1e-6;
    start[sub.induced_var[j]] = local.induced[j] * (1.0 + 1e-7);
    start[sub.bs_var[j]] = hint_geom.bs_dist_sq[j] / sc.L2 * (1.0 + kMargin);
    for (int v = 0; v < V; ++v) {
      if (sub.dist_var[v][j] >= 0) start[sub.dist_var[v][j]] = hint_geom.dist_sq[v][j] / sc.L2 * (1.0 + kMargin);
    }
  }
  const double eta = true_objective(s, local.traj, share) / B;
  start[sub.eta_var] = std::max(eta - 0.01 * (std::abs(eta) + 1.0), -0.5);
  prog.set_start(std::move(start));
  return sub;
}

std::vector<double> local_point_vector(const TrajectorySubproblem& sub, const ScenarioConfig& s,
                                       const std::vector<std::vector<double>>& share,
                                       const ScaLocalPoint& local) {
  const double L = kLengthScale;
  const double L2 = L * L;
  std::vector<double> x(static_cast<std::size_t>(sub.program.variable_count()), 0.0);
  for (int j = 1; j <= s.slot_count; ++j) {
    x[sub.x_var[j]] = local.traj.xy[j].x / L;
    x[sub.y_var[j]] = local.traj.xy[j].y / L;
    x[sub.speed_var[j]] = local.speed[j];
    x[sub.induced_var[j]] = local.induced[j];
    x[sub.bs_var[j]] = local.bs_dist_sq[j] / L2;
    for (int v = 0; v < s.vehicle_count(); ++v) {
      if (sub.dist_var[v][j] >= 0) x[sub.dist_var[v][j]] = local.dist_sq[v][j] / L2;
    }
  }
  x[sub.eta_var] = true_objective(s, local.traj, share) / s.total_bandwidth;
  return x;
}

Trajectory initial_trajectory(const ScenarioConfig& s) {
  const double cap = max_speed_within_power(s.power_model, s.total_comm_power, s.power_budget);
  const double speed = std::min({s.uav_max_speed, 0.99 * cap, s.road_length / s.flight_duration});
  const double step = speed * s.slot_length;
  const double lane = s.road_width / 2.0;
  Trajectory traj;
  traj.altitude = s.uav_altitude;
  traj.xy.push_back(s.uav_initial_xy);
  for (int j = 1; j <= s.slot_count; ++j) {
    const Vec2 prev = traj.xy.back();
    const double dy = std::clamp(lane - prev.y, -step, step);
    const double dx = std::sqrt(std::max(step * step - dy * dy, 0.0));
    traj.xy.push_back({std::min(prev.x + dx, s.road_length), prev.y + dy});
  }
  return traj;
}

namespace {

Trajectory extract_trajectory(const ScenarioConfig& s, const TrajectorySubproblem& sub,
                              const std::vector<double>& x) {
  Trajectory traj;
  traj.altitude = s.uav_altitude;
  traj.xy.push_back(s.uav_initial_xy);
  for (int j = 1; j <= s.slot_count; ++j) {
    traj.xy.push_back({std::clamp(x[sub.x_var[j]] * kLengthScale, 0.0, s.road_length),
                       std::clamp(x[sub.y_var[j]] * kLengthScale, 0.0, s.road_width)});
  }
  return traj;
}

}  // namespace

ScaResult optimize_trajectory(const ScenarioConfig& s, const std::vector<std::vector<double>>& share,
                              const Trajectory& init, const SolverSettings& settings,
                              bool enforce_rate_floor) {
  const convex::SolveOptions options = solve_options(settings);
  ScaResult result;
  result.traj = init;
  result.eta = true_objective(s, init, share);
  result.trace.push_back(result.eta);
  ScaLocalPoint local = init_local_point(s, init);
  for (int r = 1; r <= settings.max_sca_iterations; ++r) {
    const TrajectorySubproblem sub = build_trajectory_subproblem(s, share, local, enforce_rate_floor);
    const convex::SolveReport report = convex::solve(sub.program, options);
    ++result.iterations;
    result.newton_steps += report.newton_steps;
    if (report.status == convex::SolveStatus::Infeasible) {
      throw InfeasibleError("trajectory iteration " + std::to_string(r) + " infeasible at '" +
                            report.worst_constraint + "'");
    }
    if (report.status != convex::SolveStatus::Optimal) {
      throw SolverError("trajectory iteration " + std::to_string(r) + ": " +
                        std::string(convex::to_string(report.status)) + " (" + report.diagnostic + ")");
    }
    Trajectory next = extract_trajectory(s, sub, report.x);
    const double value = true_objective(s, next, share);
    if (value < result.eta) {
      ++result.rejected;
      break;
    }
    const double previous = result.eta;
    result.traj = std::move(next);
    result.eta = value;
    result.trace.push_back(value);
    local = init_local_point(s, result.traj);
    if (objective_converged(previous, value, settings.epsilon)) break;
  }
  return result;
}

}  // namespace uavnet
