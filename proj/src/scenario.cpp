#include "uavnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "uavnet/errors.hpp"
#include "uavnet/units.hpp"

namespace uavnet {
namespace {

using nlohmann::json;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw from N(mean, stddev^2) restricted to [lo, hi].
double draw_truncated_normal(std::mt19937_64& rng, double lo, double hi, double mean,
                             double stddev) {
  const double u = uniform01(rng);
  if (lo == hi) return lo;
  if (stddev == 0.0) {
    if (mean < lo || mean > hi) {
      throw ScenarioError("speed sampler: stddev is 0 and mean lies outside the truncation interval");
    }
    return mean;
  }
  const boost::math::normal standard;
  double a = (lo - mean) / stddev;
  double b = (hi - mean) / stddev;
  // Work in the tail that keeps probabilities away from 1.
  const bool mirrored = a > 0.0;
  if (mirrored) {
    std::swap(a, b);
    a = -a;
    b = -b;
  }
  const double pa = boost::math::cdf(standard, a);
  const double pb = boost::math::cdf(standard, b);
  double z = 0.0;
  if (pb - pa <= 0.0) {
    z = b;  // all remaining mass sits at the endpoint nearest the mean
  } else {
    const double p = pa + u * (pb - pa);
    z = p <= 0.0 ? a : boost::math::quantile(standard, std::min(p, 1.0 - 0x1.0p-53));
  }
  z = std::clamp(z, a, b);
  const double x = mirrored ? mean - z * stddev : mean + z * stddev;
  return std::clamp(x, lo, hi);
}

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw ScenarioError("scenario field '" + field + "': " + what);
}

const json& require(const json& obj, const std::string& parent, const char* key) {
  if (!obj.is_object()) schema_error(parent, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(parent + "." + key, "missing");
  return *it;
}

void reject_unknown(const json& obj, const std::string& parent,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) schema_error(parent + "." + key, "unknown key");
  }
}

double number(const json& obj, const std::string& parent, const char* key) {
  const json& v = require(obj, parent, key);
  if (!v.is_number()) schema_error(parent + "." + key, "expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& parent, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) schema_error(parent + "." + key, "expected a number");
  return it->get<double>();
}

int integer(const json& obj, const std::string& parent, const char* key) {
  const json& v = require(obj, parent, key);
  if (!v.is_number_integer()) schema_error(parent + "." + key, "expected an integer");
  return v.get<int>();
}

/// Power given as {"dbm": x} or {"watts": y}; exactly one.
double power_watts(const json& obj, const std::string& parent, const char* key) {
  const json& v = require(obj, parent, key);
  const std::string field = parent + "." + key;
  if (!v.is_object()) schema_error(field, "expected {\"dbm\": ...} or {\"watts\": ...}");
  reject_unknown(v, field, {"dbm", "watts"});
  const bool has_dbm = v.contains("dbm");
  const bool has_watts = v.contains("watts");
  if (has_dbm == has_watts) schema_error(field, "exactly one of 'dbm' or 'watts' is required");
  return has_dbm ? dbm_to_watt(number(v, field, "dbm")) : number(v, field, "watts");
}

double gain_linear(const json& obj, const std::string& parent, const char* key) {
  const json& v = require(obj, parent, key);
  const std::string field = parent + "." + key;
  if (!v.is_object()) schema_error(field, "expected {\"db\": ...} or {\"linear\": ...}");
  reject_unknown(v, field, {"db", "linear"});
  const bool has_db = v.contains("db");
  const bool has_linear = v.contains("linear");
  if (has_db == has_linear) schema_error(field, "exactly one of 'db' or 'linear' is required");
  return has_db ? db_to_linear(number(v, field, "db")) : number(v, field, "linear");
}

std::vector<double> number_array(const json& obj, const std::string& parent, const char* key,
                                 std::size_t size) {
  const json& v = require(obj, parent, key);
  const std::string field = parent + "." + key;
  if (!v.is_array() || v.size() != size) {
    schema_error(field, "expected an array of " + std::to_string(size) + " numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) schema_error(field, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    schema_error(field, "must be finite and strictly positive (got " + std::to_string(value) + ")");
  }
}

}  // namespace

std::vector<int> ScenarioConfig::high_speed_indices() const {
  std::vector<int> out;
  for (int v = 0; v < vehicle_count(); ++v) {
    if (vehicles[static_cast<std::size_t>(v)].cls == VehicleClass::HighSpeed) out.push_back(v);
  }
  return out;
}

std::vector<int> ScenarioConfig::normal_indices() const {
  std::vector<int> out;
  for (int v = 0; v < vehicle_count(); ++v) {
    if (vehicles[static_cast<std::size_t>(v)].cls == VehicleClass::Normal) out.push_back(v);
  }
  return out;
}

ScenarioTemplate default_template() {
  ScenarioTemplate tmpl;
  ScenarioConfig& s = tmpl.base;
  s.power_budget = dbm_to_watt(57.0);
  s.bs_power = dbm_to_watt(46.0);
  s.noise_vehicle = dbm_to_watt(-113.0);
  s.noise_uav = dbm_to_watt(-110.0);
  s.reference_gain = dbm_to_watt(-30.0);
  tmpl.fleet = SamplerSpec{};
  return tmpl;
}

std::vector<double> sample_speeds(int count, double lo, double hi, double mean, double stddev,
                                  std::uint64_t seed) {
  if (count < 0) throw ScenarioError("speed sampler: negative count");
  if (!(lo <= hi)) throw ScenarioError("speed sampler: min speed exceeds max speed");
  if (!(stddev >= 0.0)) throw ScenarioError("speed sampler: negative stddev");
  if (stddev == 0.0 && lo != hi && (mean < lo || mean > hi)) {
    throw ScenarioError("speed sampler: stddev is 0 and mean lies outside the truncation interval");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> speeds(static_cast<std::size_t>(count));
  for (double& s : speeds) s = draw_truncated_normal(rng, lo, hi, mean, stddev);
  return speeds;
}

Classification classify_vehicles(const std::vector<double>& speeds, double speed_limit) {
  Classification out;
  for (std::size_t v = 0; v < speeds.size(); ++v) {
    (speeds[v] > speed_limit ? out.high_speed : out.normal).push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> propagate_positions(double x0, double speed, double slot_length, int slot_count) {
  std::vector<double> x(static_cast<std::size_t>(std::max(slot_count, 0)));
  for (int j = 1; j <= slot_count; ++j) {
    x[static_cast<std::size_t>(j - 1)] = x0 + j * speed * slot_length;
  }
  return x;
}

std::vector<bool> presence_mask(const std::vector<double>& x_positions, double road_length) {
  std::vector<bool> mask(x_positions.size());
  for (std::size_t j = 0; j < x_positions.size(); ++j) {
    mask[j] = x_positions[j] >= 0.0 && x_positions[j] <= road_length;
  }
  return mask;
}

std::vector<int> vehicles_present(const ScenarioConfig& scenario) {
  std::vector<int> count(static_cast<std::size_t>(scenario.slot_count + 1), 0);
  for (const auto& track : scenario.vehicles) {
    for (std::size_t j = 0; j < count.size(); ++j) count[j] += track.present[j] ? 1 : 0;
  }
  return count;
}

VehicleTrack make_track(const ScenarioConfig& scenario, double speed, double initial_x,
                        double lane_y, double rate_floor) {
  VehicleTrack track;
  track.speed = speed;
  track.lane_y = lane_y;
  track.rate_floor = rate_floor;
  track.cls = speed > scenario.speed_limit ? VehicleClass::HighSpeed : VehicleClass::Normal;
  track.x.push_back(initial_x);
  const auto rest =
      propagate_positions(initial_x, speed, scenario.slot_length, scenario.slot_count);
  track.x.insert(track.x.end(), rest.begin(), rest.end());
  track.present = presence_mask(track.x, scenario.road_length);
  return track;
}

namespace {

double lane_position(const ScenarioConfig& s, int index, int lanes) {
  const int k = index % lanes;
  return s.road_width * (2.0 * k + 1.0) / (2.0 * lanes);
}

std::vector<VehicleTrack> sample_fleet(const ScenarioConfig& s, const SamplerSpec& spec) {
  if (spec.high_speed_count < 0 || spec.normal_count < 0) {
    schema_error("vehicles.sampler", "class counts must be nonnegative");
  }
  if (spec.lanes < 1) schema_error("vehicles.sampler.lanes", "must be at least 1");
  const double mean = spec.mean.value_or(0.5 * (s.min_speed + s.max_speed));
  const double stddev = spec.stddev.value_or(0.25 * (s.max_speed - s.min_speed));
  const double x_max = spec.initial_x_max.value_or(s.road_length / 10.0);
  if (spec.high_speed_count > 0 && !(s.max_speed > s.speed_limit)) {
    schema_error("vehicles.sampler.high_speed_count", "max speed does not exceed the speed limit");
  }
  if (spec.normal_count > 0 && s.speed_limit < s.min_speed) {
    schema_error("vehicles.sampler.normal_count", "speed limit is below the minimum speed");
  }
  std::mt19937_64 rng(spec.seed);
  auto above_limit = [&](double lo, double hi) {
    double v = draw_truncated_normal(rng, lo, hi, mean, stddev);
    if (v <= s.speed_limit) v = std::nextafter(s.speed_limit, hi);
    return v;
  };
  std::vector<double> speeds;
  std::vector<double> floors;
  for (int k = 0; k < spec.high_speed_count; ++k) {
    if (spec.fastest_min_speed) {
      const double split = *spec.fastest_min_speed;
      if (!(split > s.speed_limit && split < s.max_speed)) {
        schema_error("vehicles.sampler.fastest_min_speed", "must lie strictly inside (S_V, max_s)");
      }
      double v = k == 0 ? draw_truncated_normal(rng, split, s.max_speed, mean, stddev)
                        : above_limit(s.speed_limit, split);
      if (k == 0 && v <= split) v = std::nextafter(split, s.max_speed);
      speeds.push_back(v);
    } else {
      speeds.push_back(above_limit(s.speed_limit, s.max_speed));
    }
    floors.push_back(k == 0 && spec.fastest_rate_floor ? *spec.fastest_rate_floor : s.rate_floor);
  }
  for (int k = 0; k < spec.normal_count; ++k) {
    speeds.push_back(draw_truncated_normal(rng, s.min_speed, s.speed_limit, mean, stddev));
    floors.push_back(s.rate_floor);
  }
  std::vector<VehicleTrack> tracks;
  for (std::size_t v = 0; v < speeds.size(); ++v) {
    const double x0 = uniform01(rng) * x_max;
    tracks.push_back(make_track(s, speeds[v], x0, lane_position(s, static_cast<int>(v), spec.lanes),
                                floors[v]));
  }
  return tracks;
}

}  // namespace

void set_comm_power(ScenarioConfig& scenario, double per_vehicle) {
  scenario.comm_power_per_vehicle = per_vehicle;
  scenario.total_comm_power = per_vehicle * scenario.vehicle_count();
}

ScenarioConfig realize(const ScenarioTemplate& tmpl) {
  ScenarioConfig s = tmpl.base;
  s.vehicles.clear();
  if (const auto* spec = std::get_if<SamplerSpec>(&tmpl.fleet)) {
    s.vehicles = sample_fleet(s, *spec);
  } else {
    const auto& specs = std::get<std::vector<VehicleSpec>>(tmpl.fleet);
    for (std::size_t v = 0; v < specs.size(); ++v) {
      const auto& vs = specs[v];
      s.vehicles.push_back(make_track(s, vs.speed, vs.initial_x,
                                      vs.lane_y.value_or(lane_position(s, static_cast<int>(v), 4)),
                                      vs.rate_floor.value_or(s.rate_floor)));
    }
  }
  set_comm_power(s, s.comm_power_per_vehicle);
  validate(s);
  return s;
}

void validate(const ScenarioConfig& s) {
  check_positive(s.road_length, "road.length_m");
  check_positive(s.road_width, "road.width_m");
  check_positive(s.flight_duration, "time.flight_duration_s");
  check_positive(s.slot_length, "time.slot_length_s");
  if (s.slot_count < 1) schema_error("time.slot_count", "must be at least 1");
  const double product = s.slot_count * s.slot_length;
  if (std::abs(s.flight_duration - product) > 1e-9 * s.flight_duration) {
    std::ostringstream msg;
    msg << "T_D != J * slot length (" << s.flight_duration << " != " << s.slot_count << " * "
        << s.slot_length << ")";
    schema_error("time.flight_duration_s", msg.str());
  }
  check_positive(s.uav_altitude, "uav.altitude_m");
  check_positive(s.uav_max_speed, "uav.max_speed_mps");
  check_positive(s.power_budget, "uav.power_budget");
  check_positive(s.comm_power_per_vehicle, "link.tx_power_per_vehicle");
  check_positive(s.total_bandwidth, "link.bandwidth_hz");
  check_positive(s.backhaul_bandwidth, "link.backhaul_bandwidth_hz");
  check_positive(s.bs_power, "bs.power");
  check_positive(s.noise_vehicle, "link.noise_vehicle");
  check_positive(s.noise_uav, "link.noise_uav");
  check_positive(s.reference_gain, "link.reference_gain");
  if (!(s.rate_floor >= 0.0)) schema_error("link.rate_floor_bps", "must be nonnegative");
  check_positive(s.speed_limit, "vehicles.speed_limit_mps");
  check_positive(s.min_speed, "vehicles.min_speed_mps");
  check_positive(s.max_speed, "vehicles.max_speed_mps");
  if (s.min_speed > s.max_speed) {
    schema_error("vehicles.max_speed_mps", "max speed is below min speed");
  }
  const PowerModelParams& pm = s.power_model;
  check_positive(pm.hover_induced_speed, "power_model.hover_induced_speed_mps");
  check_positive(pm.blade_profile_power, "power_model.blade_profile_power_w");
  check_positive(pm.tip_speed, "power_model.tip_speed_mps");
  check_positive(pm.induced_power, "power_model.induced_power_w");
  check_positive(pm.fuselage_drag_ratio, "power_model.fuselage_drag_ratio");
  check_positive(pm.air_density, "power_model.air_density_kg_m3");
  check_positive(pm.rotor_solidity, "power_model.rotor_solidity");
  check_positive(pm.rotor_disc_area, "power_model.rotor_disc_area_m2");
  if (s.uav_initial_xy.x < 0.0 || s.uav_initial_xy.x > s.road_length || s.uav_initial_xy.y < 0.0 ||
      s.uav_initial_xy.y > s.road_width) {
    schema_error("uav.initial_xy_m", "outside the road box");
  }
  const bool bs_over_road = s.bs_position.x >= 0.0 && s.bs_position.x <= s.road_length &&
                            s.bs_position.y >= 0.0 && s.bs_position.y <= s.road_width;
  if (bs_over_road && s.bs_position.z == s.uav_altitude) {
    schema_error("bs.position_m", "base station can coincide with the UAV");
  }
  if (!(s.solver.epsilon >= 0.0)) schema_error("solver.epsilon", "must be nonnegative");
  if (s.solver.max_outer_iterations < 1) schema_error("solver.max_outer_iterations", "must be >= 1");
  if (s.solver.max_sca_iterations < 1) schema_error("solver.max_sca_iterations", "must be >= 1");
  const BarrierSettings& b = s.solver.barrier;
  if (!(b.barrier_mu > 1.0)) schema_error("solver.barrier.mu", "must exceed 1");
  check_positive(b.initial_t, "solver.barrier.initial_t");
  check_positive(b.gap_tol, "solver.barrier.gap_tol");
  check_positive(b.newton_tol, "solver.barrier.newton_tol");
  check_positive(b.feas_tol, "solver.barrier.feas_tol");
  if (b.max_newton < 1) schema_error("solver.barrier.max_newton", "must be >= 1");

  if (s.vehicles.empty()) schema_error("vehicles", "no vehicles");
  const double expected_total = s.comm_power_per_vehicle * s.vehicle_count();
  if (std::abs(s.total_comm_power - expected_total) > 1e-12 * expected_total) {
    schema_error("link.tx_power_per_vehicle", "total communication power must equal p * V");
  }
  const auto slots = static_cast<std::size_t>(s.slot_count + 1);
  bool any_normal = false;
  for (std::size_t v = 0; v < s.vehicles.size(); ++v) {
    const auto& t = s.vehicles[v];
    const std::string field = "vehicles[" + std::to_string(v) + "]";
    const double slack = 1e-12 * s.max_speed;
    if (t.speed < s.min_speed - slack || t.speed > s.max_speed + slack) {
      schema_error(field + ".speed_mps", "outside [min_speed, max_speed]");
    }
    if ((t.speed > s.speed_limit) != (t.cls == VehicleClass::HighSpeed)) {
      schema_error(field, "class disagrees with the speed limit");
    }
    if (t.x.size() != slots || t.present.size() != slots) {
      schema_error(field, "track length does not match slot_count + 1");
    }
    if (t.lane_y < 0.0 || t.lane_y > s.road_width) schema_error(field + ".lane_y_m", "off the road");
    if (!(t.rate_floor >= 0.0)) schema_error(field + ".rate_floor_bps", "must be nonnegative");
    if (t.cls == VehicleClass::Normal) {
      any_normal = true;
      bool ever_present = false;
      for (std::size_t j = 1; j < slots; ++j) ever_present = ever_present || t.present[j];
      if (!ever_present) schema_error(field, "normal-speed vehicle never enters the road segment");
    }
  }
  if (!any_normal) {
    schema_error("vehicles", "no normal-speed vehicles; the max-min objective is undefined");
  }
}

ScenarioTemplate parse_scenario(const json& doc) {
  if (!doc.is_object()) schema_error("<root>", "expected a JSON object");
  reject_unknown(doc, "<root>", {"road", "time", "uav", "bs", "link", "power_model", "vehicles", "solver"});
  ScenarioTemplate tmpl;
  ScenarioConfig& s = tmpl.base;

  const json& road = require(doc, "<root>", "road");
  reject_unknown(road, "road", {"length_m", "width_m"});
  s.road_length = number(road, "road", "length_m");
  s.road_width = number(road, "road", "width_m");

  const json& time = require(doc, "<root>", "time");
  reject_unknown(time, "time", {"flight_duration_s", "slot_count", "slot_length_s"});
  s.flight_duration = number(time, "time", "flight_duration_s");
  s.slot_count = integer(time, "time", "slot_count");
  s.slot_length = number(time, "time", "slot_length_s");

  const json& uav = require(doc, "<root>", "uav");
  reject_unknown(uav, "uav", {"altitude_m", "initial_xy_m", "max_speed_mps", "power_budget"});
  s.uav_altitude = number(uav, "uav", "altitude_m");
  const auto xy = number_array(uav, "uav", "initial_xy_m", 2);
  s.uav_initial_xy = {xy[0], xy[1]};
  s.uav_max_speed = number(uav, "uav", "max_speed_mps");
  s.power_budget = power_watts(uav, "uav", "power_budget");

  const json& bs = require(doc, "<root>", "bs");
  reject_unknown(bs, "bs", {"position_m", "power"});
  const auto bpos = number_array(bs, "bs", "position_m", 3);
  s.bs_position = {bpos[0], bpos[1], bpos[2]};
  s.bs_power = power_watts(bs, "bs", "power");

  const json& link = require(doc, "<root>", "link");
  reject_unknown(link, "link", {"bandwidth_hz", "backhaul_bandwidth_hz", "tx_power_per_vehicle",
                                "noise_vehicle", "noise_uav", "reference_gain", "rate_floor_bps"});
  s.total_bandwidth = number(link, "link", "bandwidth_hz");
  s.backhaul_bandwidth = number(link, "link", "backhaul_bandwidth_hz");
  s.comm_power_per_vehicle = power_watts(link, "link", "tx_power_per_vehicle");
  s.noise_vehicle = power_watts(link, "link", "noise_vehicle");
  s.noise_uav = power_watts(link, "link", "noise_uav");
  s.reference_gain = gain_linear(link, "link", "reference_gain");
  s.rate_floor = number(link, "link", "rate_floor_bps");

  const json& pm = require(doc, "<root>", "power_model");
  reject_unknown(pm, "power_model",
                 {"hover_induced_speed_mps", "blade_profile_power_w", "tip_speed_mps",
                  "induced_power_w", "fuselage_drag_ratio", "air_density_kg_m3", "rotor_solidity",
                  "rotor_disc_area_m2"});
  s.power_model.hover_induced_speed = number(pm, "power_model", "hover_induced_speed_mps");
  s.power_model.blade_profile_power = number(pm, "power_model", "blade_profile_power_w");
  s.power_model.tip_speed = number(pm, "power_model", "tip_speed_mps");
  s.power_model.induced_power = number(pm, "power_model", "induced_power_w");
  s.power_model.fuselage_drag_ratio = number(pm, "power_model", "fuselage_drag_ratio");
  s.power_model.air_density = number(pm, "power_model", "air_density_kg_m3");
  s.power_model.rotor_solidity = number(pm, "power_model", "rotor_solidity");
  s.power_model.rotor_disc_area = number(pm, "power_model", "rotor_disc_area_m2");

  const json& veh = require(doc, "<root>", "vehicles");
  reject_unknown(veh, "vehicles", {"speed_limit_mps", "min_speed_mps", "max_speed_mps", "sampler", "tracks"});
  s.speed_limit = number(veh, "vehicles", "speed_limit_mps");
  s.min_speed = number(veh, "vehicles", "min_speed_mps");
  s.max_speed = number(veh, "vehicles", "max_speed_mps");
  const bool has_sampler = veh.contains("sampler");
  const bool has_tracks = veh.contains("tracks");
  if (has_sampler == has_tracks) {
    schema_error("vehicles", "exactly one of 'sampler' or 'tracks' is required");
  }
  if (has_sampler) {
    const json& sj = veh.at("sampler");
    const std::string f = "vehicles.sampler";
    reject_unknown(sj, f, {"seed", "high_speed_count", "normal_count", "mean_mps", "stddev_mps",
                           "initial_x_max_m", "lanes", "fastest_min_speed_mps",
                           "fastest_rate_floor_bps"});
    SamplerSpec spec;
    const json& seed = require(sj, f, "seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      schema_error(f + ".seed", "expected a nonnegative integer");
    }
    spec.seed = seed.get<std::uint64_t>();
    spec.high_speed_count = integer(sj, f, "high_speed_count");
    spec.normal_count = integer(sj, f, "normal_count");
    spec.mean = optional_number(sj, f, "mean_mps");
    spec.stddev = optional_number(sj, f, "stddev_mps");
    spec.initial_x_max = optional_number(sj, f, "initial_x_max_m");
    if (sj.contains("lanes")) spec.lanes = integer(sj, f, "lanes");
    spec.fastest_min_speed = optional_number(sj, f, "fastest_min_speed_mps");
    spec.fastest_rate_floor = optional_number(sj, f, "fastest_rate_floor_bps");
    if (spec.stddev && *spec.stddev < 0.0) schema_error(f + ".stddev_mps", "must be nonnegative");
    tmpl.fleet = spec;
  } else {
    const json& tj = veh.at("tracks");
    if (!tj.is_array()) schema_error("vehicles.tracks", "expected an array");
    std::vector<VehicleSpec> specs;
    for (std::size_t i = 0; i < tj.size(); ++i) {
      const std::string f = "vehicles.tracks[" + std::to_string(i) + "]";
      reject_unknown(tj[i], f, {"speed_mps", "initial_x_m", "lane_y_m", "rate_floor_bps"});
      VehicleSpec vs;
      vs.speed = number(tj[i], f, "speed_mps");
      vs.initial_x = number(tj[i], f, "initial_x_m");
      vs.lane_y = optional_number(tj[i], f, "lane_y_m");
      vs.rate_floor = optional_number(tj[i], f, "rate_floor_bps");
      specs.push_back(vs);
    }
    tmpl.fleet = specs;
  }

  const json& solver = require(doc, "<root>", "solver");
  reject_unknown(solver, "solver", {"epsilon", "max_outer_iterations", "max_sca_iterations", "barrier"});
  if (auto v = optional_number(solver, "solver", "epsilon")) s.solver.epsilon = *v;
  if (solver.contains("max_outer_iterations")) {
    s.solver.max_outer_iterations = integer(solver, "solver", "max_outer_iterations");
  }
  if (solver.contains("max_sca_iterations")) {
    s.solver.max_sca_iterations = integer(solver, "solver", "max_sca_iterations");
  }
  if (solver.contains("barrier")) {
    const json& bj = solver.at("barrier");
    const std::string f = "solver.barrier";
    reject_unknown(bj, f, {"mu", "initial_t", "feas_tol", "gap_tol", "newton_tol", "max_newton"});
    BarrierSettings& b = s.solver.barrier;
    if (auto v = optional_number(bj, f, "mu")) b.barrier_mu = *v;
    if (auto v = optional_number(bj, f, "initial_t")) b.initial_t = *v;
    if (auto v = optional_number(bj, f, "feas_tol")) b.feas_tol = *v;
    if (auto v = optional_number(bj, f, "gap_tol")) b.gap_tol = *v;
    if (auto v = optional_number(bj, f, "newton_tol")) b.newton_tol = *v;
    if (bj.contains("max_newton")) b.max_newton = integer(bj, f, "max_newton");
  }
  // Cross-field invariants are only checkable on a realized fleet.
  (void)realize(tmpl);
  return tmpl;
}

json to_json(const ScenarioTemplate& tmpl) {
  const ScenarioConfig& s = tmpl.base;
  const PowerModelParams& pm = s.power_model;
  json doc;
  doc["road"] = {{"length_m", s.road_length}, {"width_m", s.road_width}};
  doc["time"] = {{"flight_duration_s", s.flight_duration},
                 {"slot_count", s.slot_count},
                 {"slot_length_s", s.slot_length}};
  doc["uav"] = {{"altitude_m", s.uav_altitude},
                {"initial_xy_m", {s.uav_initial_xy.x, s.uav_initial_xy.y}},
                {"max_speed_mps", s.uav_max_speed},
                {"power_budget", {{"watts", s.power_budget}}}};
  doc["bs"] = {{"position_m", {s.bs_position.x, s.bs_position.y, s.bs_position.z}},
               {"power", {{"watts", s.bs_power}}}};
  doc["link"] = {{"bandwidth_hz", s.total_bandwidth},
                 {"backhaul_bandwidth_hz", s.backhaul_bandwidth},
                 {"tx_power_per_vehicle", {{"watts", s.comm_power_per_vehicle}}},
                 {"noise_vehicle", {{"watts", s.noise_vehicle}}},
                 {"noise_uav", {{"watts", s.noise_uav}}},
                 {"reference_gain", {{"linear", s.reference_gain}}},
                 {"rate_floor_bps", s.rate_floor}};
  doc["power_model"] = {{"hover_induced_speed_mps", pm.hover_induced_speed},
                        {"blade_profile_power_w", pm.blade_profile_power},
                        {"tip_speed_mps", pm.tip_speed},
                        {"induced_power_w", pm.induced_power},
                        {"fuselage_drag_ratio", pm.fuselage_drag_ratio},
                        {"air_density_kg_m3", pm.air_density},
                        {"rotor_solidity", pm.rotor_solidity},
                        {"rotor_disc_area_m2", pm.rotor_disc_area}};
  json veh = {{"speed_limit_mps", s.speed_limit},
              {"min_speed_mps", s.min_speed},
              {"max_speed_mps", s.max_speed}};
  if (const auto* spec = std::get_if<SamplerSpec>(&tmpl.fleet)) {
    json sj = {{"seed", spec->seed},
               {"high_speed_count", spec->high_speed_count},
               {"normal_count", spec->normal_count},
               {"lanes", spec->lanes}};
    if (spec->mean) sj["mean_mps"] = *spec->mean;
    if (spec->stddev) sj["stddev_mps"] = *spec->stddev;
    if (spec->initial_x_max) sj["initial_x_max_m"] = *spec->initial_x_max;
    if (spec->fastest_min_speed) sj["fastest_min_speed_mps"] = *spec->fastest_min_speed;
    if (spec->fastest_rate_floor) sj["fastest_rate_floor_bps"] = *spec->fastest_rate_floor;
    veh["sampler"] = sj;
  } else {
    json tracks = json::array();
    for (const auto& vs : std::get<std::vector<VehicleSpec>>(tmpl.fleet)) {
      json t = {{"speed_mps", vs.speed}, {"initial_x_m", vs.initial_x}};
      if (vs.lane_y) t["lane_y_m"] = *vs.lane_y;
      if (vs.rate_floor) t["rate_floor_bps"] = *vs.rate_floor;
      tracks.push_back(t);
    }
    veh["tracks"] = tracks;
  }
  doc["vehicles"] = veh;
  const BarrierSettings& b = s.solver.barrier;
  doc["solver"] = {{"epsilon", s.solver.epsilon},
                   {"max_outer_iterations", s.solver.max_outer_iterations},
                   {"max_sca_iterations", s.solver.max_sca_iterations},
                   {"barrier",
                    {{"mu", b.barrier_mu},
                     {"initial_t", b.initial_t},
                     {"feas_tol", b.feas_tol},
                     {"gap_tol", b.gap_tol},
                     {"newton_tol", b.newton_tol},
                     {"max_newton", b.max_newton}}}};
  return doc;
}

ScenarioTemplate load_scenario_template(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return realize(load_scenario_template(path));
}

}  // namespace uavnet
