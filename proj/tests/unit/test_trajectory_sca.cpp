#include <doctest.h>

#include <cmath>
#include <random>

#include "support/fixtures.hpp"
#include "uavnet/bandwidth_lp.hpp"
#include "uavnet/convex/solver.hpp"
#include "uavnet/link_model.hpp"
#include "uavnet/trajectory_sca.hpp"

using namespace uavnet;

TEST_SUITE("trajectory_sca") {

TEST_CASE("rate tangent touches at the expansion point and stays below") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> log_t(-3.0, 2.0), log_a(-4.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::pow(10.0, log_a(rng));
    const double t_r = std::pow(10.0, log_t(rng));
    const RateTangent tg = linearize_rate(t_r, a);
    const double exact_r = std::log2(1.0 + a / t_r);
    CHECK(std::abs(tg.at(t_r, t_r) - exact_r) <= 1e-10 * exact_r);
    const double t = std::pow(10.0, log_t(rng));
    CHECK(tg.at(t, t_r) <= std::log2(1.0 + a / t) + 1e-12 * std::log2(1.0 + a / t));
  }
}

TEST_CASE("power tangent is a global lower bound tight at its point") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 1.5), s(0.0, 60.0);
  const double s0 = 5.4;
  for (int i = 0; i < 2000; ++i) {
    const double dr = d(rng), sr = s(rng);
    const PowerTangent tg = linearize_power_rhs(dr, sr, s0);
    const double at_r = dr * dr + sr * sr / (s0 * s0);
    CHECK(std::abs(tg.at(dr, sr) - at_r) <= 1e-10 * std::max(at_r, 1.0));
    const double dd = d(rng), ss = s(rng);
    CHECK(tg.at(dd, ss) <= dd * dd + ss * ss / (s0 * s0) + 1e-12);
  }
}

TEST_CASE("straight start trajectory follows the road center at a feasible speed") {
  const ScenarioConfig s = realize(testing::short_template(20));
  const Trajectory traj = initial_trajectory(s);
  REQUIRE(traj.xy.size() == 21u);
  const auto speed = uav_speed_profile(traj, s.slot_length);
  for (int j = 1; j <= s.slot_count; ++j) {
    CHECK(traj.xy[j].y == doctest::Approx(25.0));
    CHECK(speed[j] <= s.uav_max_speed);
    CHECK(uav_power(speed[j], s.power_model, s.total_comm_power) <= s.power_budget);
  }
}

TEST_CASE("true objective is the smallest normal-vehicle average rate") {
  const ScenarioConfig s = realize(testing::short_template(20, 2));
  const Trajectory traj = initial_trajectory(s);
  std::vector<std::vector<double>> share(s.vehicles.size(), std::vector<double>(21, 0.2));
  double expected = 1e300;
  for (int v : s.normal_indices()) {
    double sum = 0.0;
    for (int j = 1; j <= 20; ++j) {
      if (!s.vehicles[v].present[j]) continue;
      const double d = uav_vehicle_distance(s.vehicles[v].position(j), traj.xy[j], s.uav_altitude);
      sum += instantaneous_rate(0.2, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain,
                                s.noise_vehicle, d);
    }
    expected = std::min(expected, sum / 20.0);
  }
  CHECK(true_objective(s, traj, share) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("local point is feasible for its own subproblem") {
  const ScenarioConfig s = realize(testing::short_template(20, 5));
  const Trajectory traj = initial_trajectory(s);
  const BandwidthPlan plan = solve_bandwidth(s, traj, solve_options(s.solver));
  const ScaLocalPoint local = init_local_point(s, traj);
  const TrajectorySubproblem sub = build_trajectory_subproblem(s, plan.share, local, true);
  const auto x = local_point_vector(sub, s, plan.share, local);
  const auto [violation, name] = sub.program.max_violation(x);
  CHECK_MESSAGE(violation <= 1e-9, name);
  // The convexified objective at the local point equals the exact one.
  CHECK(x[sub.eta_var] * s.total_bandwidth == doctest::Approx(true_objective(s, traj, plan.share)).epsilon(1e-12));
}

TEST_CASE("successive approximation never lowers the exact objective") {
  const ScenarioConfig s = realize(testing::short_template(20, 5));
  const Trajectory traj = initial_trajectory(s);
  const BandwidthPlan plan = solve_bandwidth(s, traj, solve_options(s.solver));
  const ScaResult res = optimize_trajectory(s, plan.share, traj, s.solver, true);
  REQUIRE(res.trace.size() >= 2u);
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    CHECK(res.trace[k] >= res.trace[k - 1] - 1e-9 * std::abs(res.trace[k - 1]));
  }
  CHECK(res.eta >= res.trace.front());
  const auto speed = uav_speed_profile(res.traj, s.slot_length);
  for (int j = 1; j <= s.slot_count; ++j) {
    CHECK(speed[j] <= s.uav_max_speed * (1 + 1e-9));
    CHECK(uav_power(speed[j], s.power_model, s.total_comm_power) <= s.power_budget * (1 + 1e-6));
    CHECK(res.traj.xy[j].x >= -1e-9);
    CHECK(res.traj.xy[j].x <= s.road_length + 1e-9);
    CHECK(res.traj.xy[j].y >= -1e-9);
    CHECK(res.traj.xy[j].y <= s.road_width + 1e-9);
  }
}

TEST_CASE("convergence test is relative and an infinite threshold always stops") {
  CHECK(objective_converged(1e6, 1e6 + 50.0, 1e-4));
  CHECK_FALSE(objective_converged(1e6, 1e6 + 200.0, 1e-4));
  CHECK(objective_converged(0.0, 5e-5, 1e-4));
  CHECK(objective_converged(1.0, 1e9, std::numeric_limits<double>::infinity()));
}

}  // TEST_SUITE
