#include "uavnet/bandwidth_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uavnet/errors.hpp"

namespace uavnet {

using convex::AffineExpr;

namespace {

constexpr double kShareSnap = 1e-9;

std::string slot_label(int v, int j) {
  return "vehicle " + std::to_string(v) + " slot " + std::to_string(j);
}

}  // namespace

convex::SolveOptions solve_options(const SolverSettings& settings) {
  convex::SolveOptions o;
  o.barrier_mu = settings.barrier.barrier_mu;
  o.initial_t = settings.barrier.initial_t;
  o.feas_tol = settings.barrier.feas_tol;
  o.gap_tol = settings.barrier.gap_tol;
  o.newton_tol = settings.barrier.newton_tol;
  o.max_newton = settings.barrier.max_newton;
  return o;
}

std::vector<std::vector<double>> rate_coefficients(const ScenarioConfig& s, const Trajectory& traj) {
  const auto slots = static_cast<std::size_t>(s.slot_count + 1);
  std::vector<std::vector<double>> c(s.vehicles.size(), std::vector<double>(slots, 0.0));
  for (std::size_t v = 0; v < s.vehicles.size(); ++v) {
    const VehicleTrack& track = s.vehicles[v];
    for (std::size_t j = 1; j < slots; ++j) {
      if (!track.present[j]) continue;
      const double d = uav_vehicle_distance(track.position(static_cast<int>(j)), traj.xy[j], traj.altitude);
      c[v][j] = instantaneous_rate(1.0, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain,
                                   s.noise_vehicle, d);
    }
  }
  return c;
}

std::vector<double> backhaul_capacities(const ScenarioConfig& s, const Trajectory& traj) {
  std::vector<double> rb(traj.xy.size());
  for (std::size_t j = 0; j < traj.xy.size(); ++j) {
    rb[j] = backhaul_capacity(traj.xy[j], traj.altitude, s.bs_position, s.backhaul_bandwidth,
                              s.bs_power, s.reference_gain, s.noise_uav);
  }
  return rb;
}

BandwidthInstance make_bandwidth_instance(const ScenarioConfig& s, const Trajectory& traj) {
  BandwidthInstance inst;
  inst.slot_count = s.slot_count;
  inst.bandwidth = s.total_bandwidth;
  inst.coeff = rate_coefficients(s, traj);
  inst.backhaul = backhaul_capacities(s, traj);
  for (const VehicleTrack& t : s.vehicles) {
    inst.present.push_back(t.present);
    inst.high_speed.push_back(t.cls == VehicleClass::HighSpeed);
    inst.rate_floor.push_back(t.rate_floor);
  }
  return inst;
}

BandwidthLp build_bandwidth_lp(const BandwidthInstance& inst) {
  BandwidthLp lp;
  auto& prog = lp.program;
  const int V = inst.vehicle_count();
  const int J = inst.slot_count;
  const double B = inst.bandwidth;
  double cmax = 0.0;
  lp.share_var.assign(static_cast<std::size_t>(V), std::vector<int>(static_cast<std::size_t>(J + 1), -1));
  for (int v = 0; v < V; ++v) {
    for (int j = 1; j <= J; ++j) {
      if (!inst.present[v][j]) continue;
      lp.share_var[v][j] = prog.add_variable("share[" + std::to_string(v) + "][" + std::to_string(j) + "]", 0.0, 1.0);
      cmax = std::max(cmax, inst.coeff[v][j] / B);
    }
  }
  lp.eta_var = prog.add_variable("eta", -1.0, cmax + 1.0);
  prog.set_objective_coeff(lp.eta_var, 1.0);

  for (int v = 0; v < V; ++v) {
    if (inst.high_speed[v]) continue;
    AffineExpr row;
    row.add(lp.eta_var, 1.0);
    for (int j = 1; j <= J; ++j) {
      const int k = lp.share_var[v][j];
      if (k >= 0) row.add(k, -inst.coeff[v][j] / (B * J));
    }
    prog.add_linear(std::move(row), "max-min average rate of vehicle " + std::to_string(v));
  }
  for (int v = 0; v < V; ++v) {
    if (!inst.high_speed[v]) continue;
    for (int j = 1; j <= J; ++j) {
      const int k = lp.share_var[v][j];
      if (k < 0) continue;
      AffineExpr row;
      row.add(k, -inst.coeff[v][j] / B).shift(inst.rate_floor[v] / B);
      prog.add_linear(std::move(row), "rate floor of " + slot_label(v, j));
    }
  }
  for (int j = 1; j <= J; ++j) {
    AffineExpr simplex;
    AffineExpr backhaul;
    for (int v = 0; v < V; ++v) {
      const int k = lp.share_var[v][j];
      if (k < 0) continue;
      simplex.add(k, 1.0);
      backhaul.add(k, inst.coeff[v][j] / B);
    }
    if (simplex.terms.empty()) continue;
    simplex.shift(-1.0);
    backhaul.shift(-inst.backhaul[j] / B);
    prog.add_linear(std::move(simplex), "share simplex of slot " + std::to_string(j));
    prog.add_linear(std::move(backhaul), "backhaul of slot " + std::to_string(j));
  }

  // Equal split among present vehicles as a start hint.
  std::vector<double> start(static_cast<std::size_t>(prog.variable_count()), 0.0);
  for (int j = 1; j <= J; ++j) {
    int count = 0;
    for (int v = 0; v < V; ++v) count += lp.share_var[v][j] >= 0 ? 1 : 0;
    for (int v = 0; v < V; ++v) {
      if (lp.share_var[v][j] >= 0) start[static_cast<std::size_t>(lp.share_var[v][j])] = 0.5 / count;
    }
  }
  start[static_cast<std::size_t>(lp.eta_var)] = -0.5;
  prog.set_start(std::move(start));
  return lp;
}

std::optional<std::string> bandwidth_infeasibility(const BandwidthInstance& inst) {
  for (int j = 1; j <= inst.slot_count; ++j) {
    double share_needed = 0.0;
    double rate_needed = 0.0;
    for (int v = 0; v < inst.vehicle_count(); ++v) {
      if (!inst.high_speed[v] || !inst.present[v][j]) continue;
      const double need = inst.rate_floor[v] / inst.coeff[v][j];
      if (need > 1.0) {
        std::ostringstream msg;
        msg << "rate floor of " << slot_label(v, j) << " is unreachable: needs " << inst.rate_floor[v]
            << " bps but full bandwidth gives " << inst.coeff[v][j] << " bps";
        return msg.str();
      }
      share_needed += need;
      rate_needed += inst.rate_floor[v];
    }
    if (share_needed > 1.0) {
      std::ostringstream msg;
      msg << "rate floors in slot " << j << " need " << share_needed << " of the bandwidth";
      return msg.str();
    }
    if (rate_needed > inst.backhaul[j]) {
      std::ostringstream msg;
      msg << "rate floors in slot " << j << " exceed the backhaul capacity " << inst.backhaul[j] << " bps";
      return msg.str();
    }
  }
  return std::nullopt;
}

std::vector<double> average_rates(const BandwidthInstance& inst,
                                  const std::vector<std::vector<double>>& share) {
  std::vector<double> avg(static_cast<std::size_t>(inst.vehicle_count()), 0.0);
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    double sum = 0.0;
    for (int j = 1; j <= inst.slot_count; ++j) sum += inst.coeff[v][j] * share[v][j];
    avg[v] = sum / inst.slot_count;
  }
  return avg;
}

double min_normal_average(const BandwidthInstance& inst, const std::vector<std::vector<double>>& share) {
  const auto avg = average_rates(inst, share);
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    if (!inst.high_speed[v]) best = std::min(best, avg[v]);
  }
  return best;
}

namespace {

BandwidthPlan extract_plan(const BandwidthInstance& inst, const BandwidthLp& lp,
                           const std::vector<double>& x) {
  BandwidthPlan plan;
  plan.share.assign(static_cast<std::size_t>(inst.vehicle_count()),
                    std::vector<double>(static_cast<std::size_t>(inst.slot_count + 1), 0.0));
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    for (int j = 1; j <= inst.slot_count; ++j) {
      const int k = lp.share_var[v][j];
      if (k < 0) continue;
      double kappa = std::clamp(x[static_cast<std::size_t>(k)], 0.0, 1.0);
      if (!inst.high_speed[v] && kappa < kShareSnap) kappa = 0.0;
      plan.share[v][j] = kappa;
    }
  }
  plan.eta = min_normal_average(inst, plan.share);
  return plan;
}

}  // namespace

BandwidthPlan solve_bandwidth(const BandwidthInstance& inst, const convex::SolveOptions& options) {
  if (auto why = bandwidth_infeasibility(inst)) throw InfeasibleError(*why);
  const BandwidthLp lp = build_bandwidth_lp(inst);
  const convex::SolveReport report = convex::solve(lp.program, options);
  if (report.status == convex::SolveStatus::Infeasible) {
    throw InfeasibleError("bandwidth allocation infeasible at '" + report.worst_constraint + "'");
  }
  if (report.status != convex::SolveStatus::Optimal) {
    throw SolverError("bandwidth allocation: " + std::string(convex::to_string(report.status)) + " (" +
                      report.diagnostic + ")");
  }
  return extract_plan(inst, lp, report.x);
}

BandwidthPlan solve_bandwidth(const ScenarioConfig& scenario, const Trajectory& traj,
                              const convex::SolveOptions& options) {
  return solve_bandwidth(make_bandwidth_instance(scenario, traj), options);
}

ElasticPlan solve_bandwidth_elastic(const BandwidthInstance& inst, const convex::SolveOptions& options) {
  BandwidthLp lp = build_bandwidth_lp(inst);
  auto& prog = lp.program;
  double floor_max = 0.0;
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    if (inst.high_speed[v]) floor_max = std::max(floor_max, inst.rate_floor[v] / inst.bandwidth);
  }
  // Rebuild as: minimize shortfall z with every floor row relaxed by z.
  convex::ConvexProgram relaxed(convex::Sense::Minimize);
  for (const auto& var : prog.variables()) relaxed.add_variable(var.name, var.lower, var.upper);
  const int z = relaxed.add_variable("shortfall", 0.0, floor_max + 1.0);
  relaxed.set_objective_coeff(z, 1.0);
  for (const auto& c : prog.constraints()) {
    AffineExpr row = c.lhs;
    if (c.name.rfind("rate floor", 0) == 0) row.add(z, -1.0);
    relaxed.add_linear(std::move(row), c.name);
  }
  std::vector<double> start = prog.start();
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    for (int j = 1; j <= inst.slot_count; ++j) {
      if (lp.share_var[v][j] >= 0) start[static_cast<std::size_t>(lp.share_var[v][j])] *= 0.5;
    }
  }
  start.push_back(floor_max + 0.5);
  relaxed.set_start(std::move(start));
  const convex::SolveReport report = convex::solve(relaxed, options);
  if (report.status != convex::SolveStatus::Optimal) {
    throw SolverError("elastic bandwidth allocation: " + std::string(convex::to_string(report.status)));
  }
  ElasticPlan out;
  out.plan = extract_plan(inst, lp, report.x);
  double shortfall = 0.0;
  for (int v = 0; v < inst.vehicle_count(); ++v) {
    if (!inst.high_speed[v]) continue;
    for (int j = 1; j <= inst.slot_count; ++j) {
      if (!inst.present[v][j]) continue;
      shortfall = std::max(shortfall, inst.rate_floor[v] - inst.coeff[v][j] * out.plan.share[v][j]);
    }
  }
  out.max_shortfall = shortfall;
  return out;
}

}  // namespace uavnet
