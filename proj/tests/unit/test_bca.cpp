#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "support/fixtures.hpp"
#include "uavnet/bca.hpp"
#include "uavnet/errors.hpp"
#include "uavnet/experiments.hpp"
#include "uavnet/link_model.hpp"
#include "uavnet/trajectory_sca.hpp"
#include "uavnet/verification.hpp"

using namespace uavnet;

namespace {

const ScenarioConfig& short_scenario() {
  static const ScenarioConfig s = realize(testing::short_template(20, 7));
  return s;
}

const Solution& short_solution() {
  static const Solution sol = run_bca(short_scenario());
  return sol;
}

}  // namespace

TEST_SUITE("bca_driver") {

TEST_CASE("alternating optimization returns a verified, monotone solution") {
  const ScenarioConfig& s = short_scenario();
  const Solution& sol = short_solution();
  CHECK(sol.verification.valid);
  CHECK(sol.outer_iterations >= 1);
  CHECK(sol.outer_iterations <= s.solver.max_outer_iterations);
  double prev = sol.initial_objective;
  for (double eta : sol.outer_trace) {
    CHECK(eta >= prev - 1e-9 * std::abs(prev));
    prev = eta;
  }
  for (const auto& inner : sol.inner_traces) {
    for (std::size_t k = 1; k < inner.size(); ++k) CHECK(inner[k] >= inner[k - 1] - 1e-9 * std::abs(inner[k - 1]));
  }
  double min_normal = 1e300;
  for (int v : s.normal_indices()) min_normal = std::min(min_normal, sol.per_vehicle_avg_rates[v]);
  CHECK(sol.eta == doctest::Approx(min_normal).epsilon(1e-12));
  CHECK(sol.eta >= sol.initial_objective);
  const auto* floor = sol.verification.find("rate_floor");
  REQUIRE(floor != nullptr);
  CHECK(floor->max_violation <= 1e-6);
}

TEST_CASE("infinite epsilon runs exactly one outer iteration") {
  ScenarioConfig s = short_scenario();
  s.solver.epsilon = std::numeric_limits<double>::infinity();
  const Solution sol = run_bca(s);
  CHECK(sol.outer_iterations == 1);
  CHECK(sol.outer_trace.size() == 1u);
}

TEST_CASE("center hover keeps the UAV still at the road center") {
  const ScenarioConfig& s = short_scenario();
  const Solution sol = run_baseline(s, Mode::CenterHover);
  CHECK(sol.verification.valid);
  for (const Vec2& p : sol.trajectory.xy) {
    CHECK(p.x == 5000.0);
    CHECK(p.y == 25.0);
  }
  CHECK(uav_power(0.0, s.power_model, s.total_comm_power) == doctest::Approx(121.9));
  CHECK(sol.eta < short_solution().eta);
}

TEST_CASE("equal bandwidth splits evenly and reports floors without enforcing them") {
  const ScenarioConfig& s = short_scenario();
  const Solution sol = run_baseline(s, Mode::EqualBandwidth);
  CHECK(sol.verification.valid);
  const double even = 1.0 / s.vehicle_count();
  for (int v = 0; v < s.vehicle_count(); ++v) {
    for (int j = 1; j <= s.slot_count; ++j) {
      if (!sol.repaired) CHECK(sol.plan.at(v, j) == (s.vehicles[v].present[j] ? even : 0.0));
    }
  }
  const auto* floor = sol.verification.find("rate_floor");
  REQUIRE(floor != nullptr);
  CHECK_FALSE(floor->enforced);
  CHECK(sol.eta < short_solution().eta);
}

TEST_CASE("a single vehicle is shadowed and its rate approaches the overhead bound") {
  ScenarioTemplate tmpl = testing::tracked_template({30.0}, {0.0}, 20);
  tmpl.base.reference_gain = 1e-3;
  tmpl.base.backhaul_bandwidth = 2e7;
  const ScenarioConfig s = realize(tmpl);
  const double overhead = instantaneous_rate(1.0, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain,
                                             s.noise_vehicle, s.uav_altitude);
  CHECK(overhead == doctest::Approx(2.09e7).epsilon(2e-3));
  const Solution sol = run_bca(s);
  CHECK(sol.verification.valid);
  CHECK(sol.eta <= overhead);
  CHECK(sol.per_slot_rates[0][s.slot_count] >= 0.999 * overhead);
}

TEST_CASE("backhaul repair scales overloaded slots down to capacity") {
  const ScenarioConfig& s = short_scenario();
  const Trajectory traj = initial_trajectory(s);
  std::vector<std::vector<double>> share(s.vehicles.size(), std::vector<double>(21, 0.0));
  for (int v = 0; v < s.vehicle_count(); ++v) {
    for (int j = 1; j <= 20; ++j) share[v][j] = s.vehicles[v].present[j] ? 1.0 / s.vehicle_count() : 0.0;
  }
  ScenarioConfig starved = s;
  starved.backhaul_bandwidth = 1e4;
  CHECK(repair_backhaul(starved, traj, share));
  const VerificationReport rep = verify_solution(starved, traj, share, false);
  CHECK(rep.find("backhaul")->max_violation <= 1e-12);
  CHECK_FALSE(repair_backhaul(starved, traj, share));
}

TEST_CASE("verification flags planted violations with their size") {
  const ScenarioConfig& s = short_scenario();
  const Solution& sol = short_solution();
  const int fast = s.high_speed_indices().front();
  int slot = 1;
  while (!s.vehicles[fast].present[slot]) ++slot;

  auto share = sol.plan.share;
  const double coeff = sol.per_slot_rates[fast][slot] / share[fast][slot];
  share[fast][slot] = 0.5 * s.vehicles[fast].rate_floor / coeff;
  VerificationReport rep = verify_solution(s, sol.trajectory, share);
  CHECK_FALSE(rep.valid);
  CHECK(rep.find("rate_floor")->max_violation == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(render_report(rep).find("VIOLATED") != std::string::npos);

  Trajectory jump = sol.trajectory;
  jump.xy[5].x += 2.0 * s.uav_max_speed * s.slot_length;
  rep = verify_solution(s, jump, sol.plan.share);
  CHECK_FALSE(rep.valid);
  CHECK(rep.find("mobility")->max_violation > 0.0);
  CHECK(render_report(rep) == render_report(verify_solution(s, jump, sol.plan.share)));
}

TEST_CASE("share lower bound is tight wherever a floor binds") {
  const VerificationReport& rep = short_solution().verification;
  CHECK(rep.floor_slots > 0);
  CHECK(rep.tight_slots == rep.binding_slots);
  CHECK(rep.max_binding_bound_gap <= 1e-4);
  CHECK(rep.derivative_ok);
}

}  // TEST_SUITE

TEST_SUITE("experiments") {

TEST_CASE("one trial reproduces the single run with zero spread") {
  const ScenarioTemplate tmpl = testing::short_template(12, 7);
  const MonteCarloReport rep = monte_carlo(tmpl, 1, 7, {Mode::CenterHover});
  REQUIRE(rep.modes.size() == 1u);
  const Solution sol = run_baseline(realize(tmpl), Mode::CenterHover);
  CHECK(rep.modes[0].mean == sol.eta);
  CHECK(rep.modes[0].stddev == 0.0);
  CHECK(rep.modes[0].completed == 1);
}

TEST_CASE("aggregates are reproducible and independent of thread count") {
  const ScenarioTemplate tmpl = testing::short_template(12, 1);
  ::setenv("UAVNET_THREADS", "1", 1);
  const MonteCarloReport serial = monte_carlo(tmpl, 3, 40, {Mode::CenterHover, Mode::Proposed});
  ::setenv("UAVNET_THREADS", "3", 1);
  const MonteCarloReport parallel = monte_carlo(tmpl, 3, 40, {Mode::CenterHover, Mode::Proposed});
  ::unsetenv("UAVNET_THREADS");
  CHECK(serial.seeds == std::vector<std::uint64_t>{40, 41, 42});
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(serial.modes[m].mean == parallel.modes[m].mean);
    CHECK(serial.modes[m].stddev == parallel.modes[m].stddev);
    for (std::size_t k = 0; k < 3; ++k) CHECK(serial.modes[m].trials[k].eta == parallel.modes[m].trials[k].eta);
  }
  const auto* proposed = serial.find(Mode::Proposed);
  REQUIRE(proposed != nullptr);
  double sum = 0.0, ss = 0.0;
  for (const auto& t : proposed->trials) sum += t.eta;
  for (const auto& t : proposed->trials) ss += (t.eta - sum / 3) * (t.eta - sum / 3);
  CHECK(proposed->mean == doctest::Approx(sum / 3).epsilon(1e-14));
  CHECK(proposed->stddev == doctest::Approx(std::sqrt(ss / 2)).epsilon(1e-12));
}

TEST_CASE("infeasible trials are counted and excluded") {
  ScenarioTemplate tmpl = testing::short_template(12, 1);
  std::get<SamplerSpec>(tmpl.fleet).fastest_rate_floor = 1e9;
  std::get<SamplerSpec>(tmpl.fleet).fastest_min_speed = 38.0;
  const MonteCarloReport rep = monte_carlo(tmpl, 2, 1, {Mode::CenterHover});
  CHECK(rep.modes[0].infeasible == 2);
  CHECK(rep.modes[0].completed == 0);
  CHECK(rep.modes[0].mean == 0.0);
}

TEST_CASE("sweep values reshape the template") {
  const ScenarioTemplate tmpl = default_template();
  const auto grown = apply_sweep_value(tmpl, SweepParam::VehicleCount, 9.0);
  CHECK(std::get<SamplerSpec>(grown.fleet).high_speed_count == 4);
  CHECK(std::get<SamplerSpec>(grown.fleet).normal_count == 5);
  CHECK_THROWS_AS(apply_sweep_value(tmpl, SweepParam::VehicleCount, 6.0), ScenarioError);
  CHECK_THROWS_AS(apply_sweep_value(tmpl, SweepParam::VehicleCount, 3.0), ScenarioError);

  const auto loud = apply_sweep_value(tmpl, SweepParam::TransmitPower, 0.06);
  CHECK(realize(loud).total_comm_power == doctest::Approx(0.3));

  const auto strict = apply_sweep_value(tmpl, SweepParam::RateFloor, 1e5);
  CHECK(std::get<SamplerSpec>(strict.fleet).fastest_rate_floor == 1e5);
  CHECK(std::get<SamplerSpec>(strict.fleet).fastest_min_speed == 38.0);

  CHECK_THROWS_AS(sweep(tmpl, SweepParam::RateFloor, {1e4, 1e3}, 1, 1, {Mode::Proposed}), ScenarioError);
  CHECK(parse_sweep_param("rth") == SweepParam::RateFloor);
  CHECK_FALSE(parse_sweep_param("speed").has_value());
}

TEST_CASE("monte carlo needs a sampled fleet") {
  CHECK_THROWS_AS(monte_carlo(testing::tracked_template({30.0}, {0.0}), 1, 1, {Mode::Proposed}), ScenarioError);
  CHECK_THROWS_AS(monte_carlo(default_template(), 0, 1, {Mode::Proposed}), ScenarioError);
}

TEST_CASE("transmit power sweep raises every mode's mean rate") {
  const ScenarioTemplate tmpl = testing::short_template(12, 3);
  const SweepResult res = sweep(tmpl, SweepParam::TransmitPower, {0.02, 0.06, 0.1}, 2, 3,
                                {Mode::Proposed, Mode::CenterHover, Mode::EqualBandwidth});
  REQUIRE(res.points.size() == 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t i = 1; i < 3; ++i) {
      CHECK(res.points[i].report.modes[m].mean >= res.points[i - 1].report.modes[m].mean);
    }
  }
}

}  // TEST_SUITE
