#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uavnet/link_model.hpp"

namespace uavnet {

enum class VehicleClass { HighSpeed, Normal };

/// One vehicle's kinematics over the flight. Arrays are indexed by slot j = 0..J,
/// where j = 0 is the starting position.
struct VehicleTrack {
  double speed = 0.0;       // m/s, constant
  double lane_y = 0.0;      // m
  double rate_floor = 0.0;  // bps, binding only for HighSpeed vehicles
  VehicleClass cls = VehicleClass::Normal;
  std::vector<double> x;
  std::vector<bool> present;

  [[nodiscard]] Vec2 position(int slot) const { return {x[static_cast<std::size_t>(slot)], lane_y}; }
  [[nodiscard]] bool is_present(int slot) const { return present[static_cast<std::size_t>(slot)]; }
};

/// Barrier interior-point settings shared by both subproblems.
struct BarrierSettings {
  double barrier_mu = 10.0;
  double initial_t = 1.0;
  double feas_tol = 1e-9;
  double gap_tol = 1e-8;
  double newton_tol = 1e-10;
  int max_newton = 5000;
};

struct SolverSettings {
  double epsilon = 1e-4;  // relative objective change that stops both loops
  int max_outer_iterations = 20;
  int max_sca_iterations = 50;
  BarrierSettings barrier;
};

struct ScenarioConfig {
  double road_length = 10000.0;  // E_x, m
  double road_width = 50.0;      // E_y, m
  double flight_duration = 400.0;
  int slot_count = 100;
  double slot_length = 4.0;
  double uav_altitude = 100.0;
  Vec2 uav_initial_xy{0.0, 25.0};
  double uav_max_speed = 60.0;
  double power_budget = 0.0;            // P_U, W
  double comm_power_per_vehicle = 0.1;  // p, W
  double total_comm_power = 0.0;        // P = p V, W
  double total_bandwidth = 1e6;         // B, Hz
  double backhaul_bandwidth = 2e6;      // B_BH, Hz
  Vec3 bs_position{-5000.0, 0.0, 30.0};
  double bs_power = 0.0;       // W
  double noise_vehicle = 0.0;  // W
  double noise_uav = 0.0;      // W
  double reference_gain = 1e-6;
  double rate_floor = 1000.0;  // default R_th, bps
  double speed_limit = 36.0;   // S_V
  double min_speed = 22.0;
  double max_speed = 40.0;
  PowerModelParams power_model;
  SolverSettings solver;
  std::vector<VehicleTrack> vehicles;

  [[nodiscard]] int vehicle_count() const { return static_cast<int>(vehicles.size()); }
  [[nodiscard]] std::vector<int> high_speed_indices() const;
  [[nodiscard]] std::vector<int> normal_indices() const;
  /// p d0 / sigma^2, the access-link SNR at unit squared distance.
  [[nodiscard]] double access_snr_scale() const {
    return comm_power_per_vehicle * reference_gain / noise_vehicle;
  }
  [[nodiscard]] double backhaul_snr_scale() const { return bs_power * reference_gain / noise_uav; }
};

/// Explicit vehicle description as it appears in a scenario file.
struct VehicleSpec {
  double speed = 0.0;
  double initial_x = 0.0;
  std::optional<double> lane_y;
  std::optional<double> rate_floor;
};

/// Random fleet description. Class counts are hit exactly: high-speed speeds come
/// from the truncation to (S_V, max_s], normal speeds from [min_s, S_V].
struct SamplerSpec {
  std::uint64_t seed = 7;
  int high_speed_count = 2;
  int normal_count = 3;
  std::optional<double> mean;    // default (min_s + max_s) / 2
  std::optional<double> stddev;  // default (max_s - min_s) / 4
  std::optional<double> initial_x_max;  // default E_x / 10
  int lanes = 4;
  /// When set, the first high-speed vehicle is drawn from (fastest_min_speed, max_s]
  /// and the others from (S_V, fastest_min_speed].
  std::optional<double> fastest_min_speed;
  /// Rate floor for the first high-speed vehicle; others use the scenario default.
  std::optional<double> fastest_rate_floor;
};

using FleetSpec = std::variant<SamplerSpec, std::vector<VehicleSpec>>;

/// A scenario with its fleet still in declarative form.
struct ScenarioTemplate {
  ScenarioConfig base;  // vehicles empty
  FleetSpec fleet = SamplerSpec{};
};

/// Table-driven defaults: 10 km x 50 m road, 100 slots of 4 s, 2 high-speed + 3 normal.
ScenarioTemplate default_template();

/// Samples `count` speeds from N(mean, stddev^2) truncated to [lo, hi].
std::vector<double> sample_speeds(int count, double lo, double hi, double mean, double stddev,
                                  std::uint64_t seed);

struct Classification {
  std::vector<int> high_speed;
  std::vector<int> normal;
};
Classification classify_vehicles(const std::vector<double>& speeds, double speed_limit);

/// x0 + j * speed * slot_length for j = 1..slot_count.
std::vector<double> propagate_positions(double x0, double speed, double slot_length, int slot_count);

std::vector<bool> presence_mask(const std::vector<double>& x_positions, double road_length);

/// Number of vehicles inside the road segment in each slot (index 0 = start).
std::vector<int> vehicles_present(const ScenarioConfig& scenario);

VehicleTrack make_track(const ScenarioConfig& scenario, double speed, double initial_x,
                        double lane_y, double rate_floor);

/// Builds tracks from the fleet spec and validates the result.
ScenarioConfig realize(const ScenarioTemplate& tmpl);

/// Checks every scenario invariant; throws ScenarioError naming the field.
void validate(const ScenarioConfig& scenario);

ScenarioTemplate parse_scenario(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioTemplate& tmpl);
ScenarioTemplate load_scenario_template(const std::filesystem::path& path);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Sets the communication power per vehicle and keeps P = p V consistent.
void set_comm_power(ScenarioConfig& scenario, double per_vehicle);

}  // namespace uavnet
