#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "uavnet/link_model.hpp"
#include "uavnet/units.hpp"

using namespace uavnet;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Big big_log2(const Big& x) { return log(x) / log(Big(2)); }

Big big_power(const Big& speed, const PowerModelParams& p, const Big& comm) {
  const Big s0 = p.hover_induced_speed;
  const Big induced = sqrt(sqrt(1 + pow(speed, 4) / (4 * pow(s0, 4))) - speed * speed / (2 * s0 * s0));
  return comm + Big(p.blade_profile_power) * (1 + 3 * speed * speed / (Big(p.tip_speed) * p.tip_speed)) +
         Big(p.induced_power) * induced +
         Big(0.5) * p.fuselage_drag_ratio * p.air_density * p.rotor_solidity * p.rotor_disc_area * pow(speed, 3);
}

double rel(double value, const Big& exact) {
  return static_cast<double>(abs((Big(value) - exact) / exact));
}

}  // namespace

TEST_SUITE("link_model") {

TEST_CASE("distances and rates agree with 50-digit evaluation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xpos(-6000.0, 12000.0), ypos(0.0, 50.0), height(50.0, 300.0);
  std::uniform_real_distribution<double> share(0.001, 1.0), dbm(-40.0, 30.0), gain_db(-60.0, -20.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 veh{xpos(rng), ypos(rng)};
    const Vec2 uav{xpos(rng), ypos(rng)};
    const double H = height(rng);
    const double k = share(rng);
    const double p = dbm_to_watt(dbm(rng));
    const double d0 = db_to_linear(gain_db(rng));
    const double noise = dbm_to_watt(-113.0);
    const Vec3 bs{-5000.0, 0.0, 30.0};

    const Big dx = Big(veh.x) - uav.x, dy = Big(veh.y) - uav.y;
    const Big d = sqrt(dx * dx + dy * dy + Big(H) * H);
    worst = std::max(worst, rel(uav_vehicle_distance(veh, uav, H), d));
    worst = std::max(worst, rel(channel_gain(static_cast<double>(d), d0), Big(d0) / (d * d)));
    const Big rate = Big(k) * 1e6 * big_log2(1 + Big(p) * d0 / (Big(noise) * d * d));
    worst = std::max(worst, rel(instantaneous_rate(k, 1e6, p, d0, noise, static_cast<double>(d)), rate));

    const Big bx = Big(bs.x) - uav.x, by = Big(bs.y) - uav.y, bz = Big(bs.z) - H;
    const Big db = sqrt(bx * bx + by * by + bz * bz);
    worst = std::max(worst, rel(uav_bs_distance(uav, H, bs), db));
    const Big cap = Big(2e6) * big_log2(1 + Big(dbm_to_watt(46.0)) * d0 / (Big(dbm_to_watt(-110.0)) * db * db));
    worst = std::max(worst, rel(backhaul_capacity(uav, H, bs, 2e6, dbm_to_watt(46.0), d0, dbm_to_watt(-110.0)), cap));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("propulsion power agrees with 50-digit evaluation") {
  const PowerModelParams params;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> speed(0.0, 80.0), comm(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = speed(rng);
    const double c = comm(rng);
    worst = std::max(worst, rel(uav_power(s, params, c), big_power(s, params, c)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("hover power is blade profile plus induced plus communication power") {
  const PowerModelParams params;
  CHECK(uav_power(0.0, params, 0.5) == doctest::Approx(121.9).epsilon(1e-15));
  CHECK(induced_power_factor(0.0, 5.4) == 1.0);
}

TEST_CASE("power at cruise speeds and the budget-limited top speed") {
  const PowerModelParams params;
  CHECK(static_cast<double>(big_power(30, params, 0.5)) == doctest::Approx(277.23).epsilon(1e-5));
  CHECK(induced_power_factor(30.0, 5.4) == doctest::Approx(0.17991).epsilon(1e-4));
  const double top = max_speed_within_power(params, 0.5, dbm_to_watt(57.0));
  CHECK(top == doctest::Approx(37.2116).epsilon(1e-5));
  CHECK(uav_power(top, params, 0.5) <= dbm_to_watt(57.0));
  CHECK(uav_power(top * (1 + 1e-9), params, 0.5) > dbm_to_watt(57.0));
  CHECK(max_speed_within_power(params, 0.5, 50.0) == 0.0);
}

TEST_CASE("induced factor stays finite and positive at extreme speeds") {
  for (double s : {1e-8, 1.0, 100.0, 1e4, 1e8}) {
    const double f = induced_power_factor(s, 5.4);
    CHECK(std::isfinite(f));
    CHECK(f > 0.0);
    CHECK(f <= 1.0);
  }
  // Large-speed asymptote s0 / S.
  CHECK(induced_power_factor(1e6, 5.4) == doctest::Approx(5.4e-6).epsilon(1e-9));
}

TEST_CASE("overhead rate at reference gain 1e-3") {
  const double rate = instantaneous_rate(1.0, 1e6, 0.1, 1e-3, dbm_to_watt(-113.0), 100.0);
  CHECK(rate == doctest::Approx(2.0928e7).epsilon(1e-4));
  CHECK(backhaul_capacity({0.0, 25.0}, 100.0, {-5000.0, 0.0, 30.0}, 2e6, dbm_to_watt(46.0), 1e-3,
                          dbm_to_watt(-110.0)) == doctest::Approx(3.456e7).epsilon(1e-3));
}

TEST_CASE("rate derivative matches central differences and is negative") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(100.0, 8000.0), share(0.01, 1.0), gain(-60.0, -30.0);
  for (int i = 0; i < 100; ++i) {
    const double d = dist(rng), k = share(rng), d0 = db_to_linear(gain(rng));
    const double noise = dbm_to_watt(-113.0);
    const double h = 1e-4 * d;
    const double fd = (instantaneous_rate(k, 1e6, 0.1, d0, noise, d + h) -
                       instantaneous_rate(k, 1e6, 0.1, d0, noise, d - h)) / (2 * h);
    const double analytic = rate_distance_derivative(k, 1e6, 0.1, d0, noise, d);
    CHECK(analytic < 0.0);
    CHECK(std::abs(analytic - fd) <= 1e-6 * std::abs(analytic));
  }
}

TEST_CASE("speed profile is step length over slot length") {
  Trajectory traj;
  traj.xy = {{0, 25}, {30, 65}, {30, 65}, {-90, 25}};
  const auto s = uav_speed_profile(traj, 4.0);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == doctest::Approx(12.5));
  CHECK(s[2] == 0.0);
  CHECK(s[3] == doctest::Approx(std::hypot(120.0, 40.0) / 4.0));
}

}  // TEST_SUITE
