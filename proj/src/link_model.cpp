#include "uavnet/link_model.hpp"

#include <cmath>

namespace uavnet {

double uav_vehicle_distance(Vec2 vehicle, Vec2 uav, double altitude) {
  const double dx = vehicle.x - uav.x;
  const double dy = vehicle.y - uav.y;
  return std::sqrt(dx * dx + dy * dy + altitude * altitude);
}

double uav_bs_distance(Vec2 uav, double altitude, Vec3 bs) {
  const double dx = bs.x - uav.x;
  const double dy = bs.y - uav.y;
  const double dz = bs.z - altitude;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double channel_gain(double distance, double reference_gain) {
  return reference_gain / (distance * distance);
}

double spectral_efficiency(double snr_scale, double distance_sq) {
  return std::log1p(snr_scale / distance_sq) * kLog2E;
}

double instantaneous_rate(double share, double bandwidth, double tx_power, double reference_gain,
                          double noise, double distance) {
  if (share == 0.0) return 0.0;
  const double snr_scale = tx_power * reference_gain / noise;
  return bandwidth * share * spectral_efficiency(snr_scale, distance * distance);
}

double rate_distance_derivative(double share, double bandwidth, double tx_power,
                                double reference_gain, double noise, double distance) {
  const double snr = tx_power * reference_gain / (noise * distance * distance);
  return -2.0 * bandwidth * share * snr / (std::numbers::ln2 * distance * (1.0 + snr));
}

double backhaul_capacity(Vec2 uav, double altitude, Vec3 bs, double backhaul_bandwidth,
                         double bs_power, double reference_gain, double noise_uav) {
  const double d = uav_bs_distance(uav, altitude, bs);
  return backhaul_bandwidth * spectral_efficiency(bs_power * reference_gain / noise_uav, d * d);
}

double induced_power_factor(double speed, double hover_induced_speed) {
  const double s0_sq = hover_induced_speed * hover_induced_speed;
  const double u = speed * speed / (2.0 * s0_sq);
  // sqrt(1 + u^2) - u == 1 / (sqrt(1 + u^2) + u)
  return std::sqrt(1.0 / (std::hypot(1.0, u) + u));
}

double uav_power(double speed, const PowerModelParams& params, double comm_power) {
  const double s_sq = speed * speed;
  return comm_power +
         params.blade_profile_power * (1.0 + 3.0 * s_sq / (params.tip_speed * params.tip_speed)) +
         params.induced_power * induced_power_factor(speed, params.hover_induced_speed) +
         params.parasitic_coefficient() * s_sq * speed;
}

double max_speed_within_power(const PowerModelParams& params, double comm_power, double budget) {
  // Locate the power-minimizing speed by golden-section search, then bisect on the
  // increasing branch.
  double lo = 0.0;
  double hi = 200.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - inv_phi * (hi - lo);
    const double b = lo + inv_phi * (hi - lo);
    if (uav_power(a, params, comm_power) < uav_power(b, params, comm_power)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double s_min = 0.5 * (lo + hi);
  if (uav_power(s_min, params, comm_power) > budget) return 0.0;
  lo = s_min;
  hi = s_min + 1.0;
  while (uav_power(hi, params, comm_power) <= budget) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (uav_power(mid, params, comm_power) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::vector<double> uav_speed_profile(const Trajectory& traj, double slot_length) {
  std::vector<double> speeds(traj.xy.size(), 0.0);
  for (std::size_t j = 1; j < traj.xy.size(); ++j) {
    const double dx = traj.xy[j].x - traj.xy[j - 1].x;
    const double dy = traj.xy[j].y - traj.xy[j - 1].y;
    speeds[j] = std::hypot(dx, dy) / slot_length;
  }
  return speeds;
}

}  // namespace uavnet
