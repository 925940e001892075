#include "uavnet/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "uavnet/bandwidth_lp.hpp"

namespace uavnet {

const ConstraintCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::string where;

  void offer(double v, const std::string& w) {
    if (v > value) {
      value = v;
      where = w;
    }
  }
};

std::string at(int v, int j) { return "vehicle " + std::to_string(v) + " slot " + std::to_string(j); }
std::string slot(int j) { return "slot " + std::to_string(j); }

}  // namespace

VerificationReport verify_solution(const ScenarioConfig& s, const Trajectory& traj,
                                   const std::vector<std::vector<double>>& share,
                                   bool enforce_rate_floor) {
  VerificationReport rep;
  const int J = s.slot_count;
  const int V = s.vehicle_count();
  const auto coeff = rate_coefficients(s, traj);
  const auto capacity = backhaul_capacities(s, traj);

  Worst floor, backhaul, power, mobility, box_x, box_y, bounds, simplex, absent;
  double excess = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= J; ++j) {
    double load = 0.0;
    double total = 0.0;
    for (int v = 0; v < V; ++v) {
      const double k = share[v][j];
      const VehicleTrack& track = s.vehicles[v];
      bounds.offer(std::max(-k, k - 1.0), at(v, j));
      total += k;
      if (!track.present[j]) {
        absent.offer(std::abs(k), at(v, j));
        continue;
      }
      const double rate = coeff[v][j] * k;
      load += rate;
      if (track.cls == VehicleClass::HighSpeed && track.rate_floor > 0.0) {
        floor.offer((track.rate_floor - rate) / track.rate_floor, at(v, j));
        const double bound = track.rate_floor / coeff[v][j];
        ++rep.floor_slots;
        if (rate - track.rate_floor <= 1e-3 * track.rate_floor) {
          ++rep.binding_slots;
          const double gap = std::abs(k - bound) / bound;
          rep.max_binding_bound_gap = std::max(rep.max_binding_bound_gap, gap);
          if (gap <= 1e-4) ++rep.tight_slots;
        }
      }
    }
    simplex.offer(total - 1.0, slot(j));
    backhaul.offer((load - capacity[j]) / capacity[j], slot(j));
    excess = std::max(excess, load - capacity[j]);

    const Vec2 p = traj.xy[j];
    const Vec2 q = traj.xy[j - 1];
    const double step = std::hypot(p.x - q.x, p.y - q.y);
    const double speed = step / s.slot_length;
    const double draw = uav_power(speed, s.power_model, s.total_comm_power);
    power.offer((draw - s.power_budget) / s.power_budget, slot(j));
    const double reach = s.uav_max_speed * s.slot_length;
    mobility.offer((step - reach) / reach, slot(j));
    box_x.offer(std::max(-p.x, p.x - s.road_length) / s.road_length, slot(j));
    box_y.offer(std::max(-p.y, p.y - s.road_width) / s.road_width, slot(j));
  }
  for (int v = 0; v < V; ++v) absent.offer(std::abs(share[v][0]), at(v, 0));
  const Vec2 start = traj.xy[0];
  box_x.offer(std::max(-start.x, start.x - s.road_length) / s.road_length, slot(0));
  box_y.offer(std::max(-start.y, start.y - s.road_width) / s.road_width, slot(0));

  auto push = [&](const char* name, const Worst& w, bool enforced) {
    const bool empty = std::isinf(w.value);
    rep.checks.push_back({name, empty ? 0.0 : w.value, empty ? "-" : w.where, enforced});
  };
  push("rate_floor", floor, enforce_rate_floor);
  push("backhaul", backhaul, true);
  push("power", power, true);
  push("mobility", mobility, true);
  push("box_x", box_x, true);
  push("box_y", box_y, true);
  push("share_bounds", bounds, true);
  push("share_simplex", simplex, true);
  push("absent_share", absent, true);
  rep.backhaul_excess_bps = std::isinf(excess) ? 0.0 : excess;

  rep.average_rates.assign(static_cast<std::size_t>(V), 0.0);
  rep.eta = std::numeric_limits<double>::infinity();
  for (int v = 0; v < V; ++v) {
    double sum = 0.0;
    for (int j = 1; j <= J; ++j) sum += coeff[v][j] * share[v][j];
    rep.average_rates[v] = sum / J;
    if (s.vehicles[v].cls == VehicleClass::Normal) rep.eta = std::min(rep.eta, rep.average_rates[v]);
  }

  // Rate derivative against central differences wherever a vehicle is served.
  for (int v = 0; v < V; ++v) {
    for (int j = 1; j <= J; ++j) {
      const double k = share[v][j];
      if (!s.vehicles[v].present[j] || !(k > 0.0)) continue;
      const double d = uav_vehicle_distance(s.vehicles[v].position(j), traj.xy[j], traj.altitude);
      const double h = 1e-4 * d;
      auto rate = [&](double dist) {
        return instantaneous_rate(k, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain,
                                  s.noise_vehicle, dist);
      };
      const double fd = (rate(d + h) - rate(d - h)) / (2.0 * h);
      const double an = rate_distance_derivative(k, s.total_bandwidth, s.comm_power_per_vehicle,
                                                 s.reference_gain, s.noise_vehicle, d);
      ++rep.derivative_probes;
      rep.derivative_max_rel_error = std::max(rep.derivative_max_rel_error, std::abs(fd - an) / std::abs(an));
      if (!(an < 0.0)) rep.derivative_negative = false;
    }
  }
  rep.derivative_ok = rep.derivative_negative && rep.derivative_max_rel_error <= rep.tolerance;

  rep.valid = rep.derivative_ok;
  for (const auto& c : rep.checks) {
    if (c.enforced && !(c.max_violation <= rep.tolerance)) rep.valid = false;
  }
  return rep;
}

std::string render_report(const VerificationReport& rep) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "status %s\ntolerance %.17g\neta_bps %.17g\n",
                rep.valid ? "VALID" : "INVALID", rep.tolerance, rep.eta);
  out += buf;
  for (const auto& c : rep.checks) {
    std::snprintf(buf, sizeof buf, "check %s max_rel_violation %.17g at %s%s%s\n", c.name.c_str(),
                  c.max_violation, c.where.c_str(), c.enforced ? "" : " (not enforced)",
                  c.enforced && !(c.max_violation <= rep.tolerance) ? " VIOLATED" : "");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "backhaul_excess_bps %.17g\n", rep.backhaul_excess_bps);
  out += buf;
  for (std::size_t v = 0; v < rep.average_rates.size(); ++v) {
    std::snprintf(buf, sizeof buf, "average_rate_bps vehicle %zu %.17g\n", v, rep.average_rates[v]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "share_bound floor_slots %d binding %d tight %d max_binding_gap %.17g\n",
                rep.floor_slots, rep.binding_slots, rep.tight_slots, rep.max_binding_bound_gap);
  out += buf;
  std::snprintf(buf, sizeof buf, "rate_derivative probes %d max_rel_error %.17g negative %s %s\n",
                rep.derivative_probes, rep.derivative_max_rel_error,
                rep.derivative_negative ? "yes" : "no", rep.derivative_ok ? "PASS" : "FAIL");
  out += buf;
  return out;
}

}  // namespace uavnet
