#pragma once

#include <numbers>
#include <vector>

namespace uavnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline constexpr double kLog2E = std::numbers::log2e;

/// Rotary-wing propulsion model coefficients. Defaults are a small quadrotor
/// (s0 = 5.4 m/s, P0 = 3.4 W, Ut = 60 m/s, Pi = 118 W).
struct PowerModelParams {
  double hover_induced_speed = 5.4;  // s0, m/s
  double blade_profile_power = 3.4;  // P0, W
  double tip_speed = 60.0;           // Ut, m/s
  double induced_power = 118.0;      // Pi, W
  double fuselage_drag_ratio = 0.6;  // d1
  double air_density = 1.225;        // rho, kg/m^3
  double rotor_solidity = 0.05;      // s_r
  double rotor_disc_area = 0.503;    // A, m^2

  /// Coefficient of the cubic parasitic term, 0.5 * d1 * rho * s_r * A.
  [[nodiscard]] double parasitic_coefficient() const {
    return 0.5 * fuselage_drag_ratio * air_density * rotor_solidity * rotor_disc_area;
  }
};

/// UAV ground-plane path. xy[0] is the fixed start point; xy[j] is the
/// position during slot j = 1..J.
struct Trajectory {
  std::vector<Vec2> xy;
  double altitude = 0.0;

  [[nodiscard]] int slot_count() const { return static_cast<int>(xy.size()) - 1; }
};

double uav_vehicle_distance(Vec2 vehicle, Vec2 uav, double altitude);
double uav_bs_distance(Vec2 uav, double altitude, Vec3 bs);

double channel_gain(double distance, double reference_gain);

/// log2(1 + snr_scale / distance_sq); snr_scale is p * d0 / sigma^2.
double spectral_efficiency(double snr_scale, double distance_sq);

double instantaneous_rate(double share, double bandwidth, double tx_power, double reference_gain,
                          double noise, double distance);

/// Derivative of instantaneous_rate with respect to distance (always negative).
double rate_distance_derivative(double share, double bandwidth, double tx_power,
                                double reference_gain, double noise, double distance);

double backhaul_capacity(Vec2 uav, double altitude, Vec3 bs, double backhaul_bandwidth,
                         double bs_power, double reference_gain, double noise_uav);

/// Induced-power factor (sqrt(1 + S^4/(4 s0^4)) - S^2/(2 s0^2))^(1/2). Evaluated in a
/// cancellation-free form, so the radicand is never negative.
double induced_power_factor(double speed, double hover_induced_speed);

/// Total UAV power draw at flight speed `speed`, communication power included.
double uav_power(double speed, const PowerModelParams& params, double comm_power);

/// Largest speed at which uav_power stays within `budget`. Returns 0 when even the
/// power-minimizing speed exceeds the budget.
double max_speed_within_power(const PowerModelParams& params, double comm_power, double budget);

/// Per-slot speeds S_e[j] = |xy[j] - xy[j-1]| / slot_length, j = 1..J (index 0 is 0).
std::vector<double> uav_speed_profile(const Trajectory& traj, double slot_length);

}  // namespace uavnet
