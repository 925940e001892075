// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "support/lp_oracle.hpp"
#include "support/tiny_instances.hpp"
#include "uavnet/bandwidth_lp.hpp"
#include "uavnet/bca.hpp"
#include "uavnet/cli/artifacts.hpp"
#include "uavnet/experiments.hpp"
#include "uavnet/link_model.hpp"
#include "uavnet/trajectory_sca.hpp"
#include "uavnet/units.hpp"

using namespace uavnet;
namespace fs = std::filesystem;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double rel(double value, const Big& exact) { return static_cast<double>(abs((Big(value) - exact) / exact)); }
Big big_log2(const Big& x) { return log(x) / log(Big(2)); }

bool nondecreasing(const std::vector<double>& trace, double tol) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k] < trace[k - 1] - tol * std::abs(trace[k - 1])) return false;
  }
  return true;
}

const Solution& golden() {
  static const Solution sol = run_bca(realize(default_template()));
  return sol;
}

Outcome model_formulas() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xpos(-6000.0, 12000.0), ypos(0.0, 50.0), height(50.0, 300.0);
  std::uniform_real_distribution<double> share(0.001, 1.0), tx_dbm(-20.0, 30.0), speed(0.0, 70.0);
  const ScenarioConfig s = realize(default_template());
  const PowerModelParams& pm = s.power_model;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 veh{xpos(rng), ypos(rng)}, uav{xpos(rng), ypos(rng)};
    const double H = height(rng), k = share(rng), p = dbm_to_watt(tx_dbm(rng)), S = speed(rng);
    const Big dx = Big(veh.x) - uav.x, dy = Big(veh.y) - uav.y;
    const Big d = sqrt(dx * dx + dy * dy + Big(H) * H);
    const double dd = uav_vehicle_distance(veh, uav, H);
    worst = std::max(worst, rel(dd, d));
    worst = std::max(worst, rel(channel_gain(dd, s.reference_gain), Big(s.reference_gain) / (d * d)));
    const Big rate = Big(k) * s.total_bandwidth * big_log2(1 + Big(p) * s.reference_gain / (Big(s.noise_vehicle) * d * d));
    worst = std::max(worst, rel(instantaneous_rate(k, s.total_bandwidth, p, s.reference_gain, s.noise_vehicle, dd), rate));
    const Big bx = Big(s.bs_position.x) - uav.x, by = Big(s.bs_position.y) - uav.y, bz = Big(s.bs_position.z) - H;
    const Big db = sqrt(bx * bx + by * by + bz * bz);
    const Big cap = Big(s.backhaul_bandwidth) * big_log2(1 + Big(s.bs_power) * s.reference_gain / (Big(s.noise_uav) * db * db));
    worst = std::max(worst, rel(backhaul_capacity(uav, H, s.bs_position, s.backhaul_bandwidth, s.bs_power,
                                                  s.reference_gain, s.noise_uav), cap));
    const Big s0 = pm.hover_induced_speed, BS = S;
    const Big power = Big(s.total_comm_power) + Big(pm.blade_profile_power) * (1 + 3 * BS * BS / (Big(pm.tip_speed) * pm.tip_speed)) +
                      Big(pm.induced_power) * sqrt(sqrt(1 + pow(BS, 4) / (4 * pow(s0, 4))) - BS * BS / (2 * s0 * s0)) +
                      Big(0.5) * pm.fuselage_drag_ratio * pm.air_density * pm.rotor_solidity * pm.rotor_disc_area * pow(BS, 3);
    worst = std::max(worst, rel(uav_power(S, pm, s.total_comm_power), power));
  }
  const double hover = uav_power(0.0, pm, s.total_comm_power);
  const bool hover_ok = std::abs(hover - 121.9) <= 1e-12 * 121.9;
  return {worst <= 1e-12 && hover_ok, fmt("max rel error %.3g over 1000 inputs (limit 1e-12), hover power %.15g W", worst, hover)};
}

Outcome tangent_bounds() {
  const ScenarioConfig s = realize(default_template());
  const double L2 = kLengthScale * kLengthScale;
  const double access = s.access_snr_scale() / L2;
  const double backhaul = s.backhaul_snr_scale() / L2;
  const double s0 = s.power_model.hover_induced_speed;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> log_t(-2.5, 2.0), induced(1e-6, 1.5), speed(0.0, 60.0);
  double tight = 0.0;
  double above = -1.0;
  for (int i = 0; i < 10000; ++i) {
    for (double a : {access, backhaul}) {
      const double t_r = std::pow(10.0, log_t(rng)), t = std::pow(10.0, log_t(rng));
      const RateTangent tg = linearize_rate(t_r, a);
      const double exact_r = std::log1p(a / t_r) * kLog2E;
      const double exact = std::log1p(a / t) * kLog2E;
      tight = std::max(tight, std::abs(tg.at(t_r, t_r) - exact_r) / exact_r);
      above = std::max(above, (tg.at(t, t_r) - exact) / exact);
    }
    const double dr = induced(rng), sr = speed(rng), d = induced(rng), sp = speed(rng);
    const PowerTangent pt = linearize_power_rhs(dr, sr, s0);
    const double at_r = dr * dr + sr * sr / (s0 * s0);
    const double exact = d * d + sp * sp / (s0 * s0);
    tight = std::max(tight, std::abs(pt.at(dr, sr) - at_r) / at_r);
    above = std::max(above, (pt.at(d, sp) - exact) / exact);
  }
  // Bounds may touch from below only up to rounding.
  return {tight <= 1e-10 && above <= 1e-14,
          fmt("tangency error %.3g (limit 1e-10), largest excess over the true function %.3g relative", tight, above)};
}

Outcome lp_oracle() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const BandwidthInstance inst = testing::random_tiny_instance(rng);
    const auto exact = testing::oracle_max_min_rate(inst);
    if (!exact.feasible) return {false, fmt("oracle found instance %d infeasible", i)};
    const BandwidthPlan plan = solve_bandwidth(inst, {});
    worst = std::max(worst, std::abs(plan.eta - exact.eta) / std::max(exact.eta, 1e-300));
  }
  return {worst <= 1e-6, fmt("max rel eta error %.3g over 50 instances (limit 1e-6)", worst)};
}

Outcome monotone_traces() {
  const Solution& sol = golden();
  std::vector<double> outer{sol.initial_objective};
  outer.insert(outer.end(), sol.outer_trace.begin(), sol.outer_trace.end());
  bool inner_ok = true;
  for (const auto& t : sol.inner_traces) inner_ok = inner_ok && nondecreasing(t, 1e-9);
  const bool ok = nondecreasing(outer, 1e-9) && inner_ok && sol.outer_iterations <= 20;
  return {ok, fmt("outer trace %s, %zu inner traces %s, %d outer iterations (limit 20), eta %.6g bps",
                  nondecreasing(outer, 1e-9) ? "nondecreasing" : "DECREASES", sol.inner_traces.size(),
                  inner_ok ? "nondecreasing" : "DECREASE", sol.outer_iterations, sol.eta)};
}

Outcome constraints() {
  const VerificationReport& rep = golden().verification;
  double worst = -1e300;
  std::string name;
  for (const auto& c : rep.checks) {
    if (c.name == "backhaul") continue;
    if (c.max_violation > worst) {
      worst = c.max_violation;
      name = c.name;
    }
  }
  const double backhaul = rep.find("backhaul")->max_violation;
  const bool ok = rep.valid && worst <= 1e-6 && backhaul <= 0.01;
  return {ok, fmt("worst exact violation %.3g (%s, limit 1e-6), backhaul excess %.3g of capacity (limit 0.01), %s",
                  worst, name.c_str(), backhaul, rep.valid ? "VALID" : "INVALID")};
}

Outcome ordering(int seeds) {
  ScenarioTemplate tmpl = default_template();
  tmpl.base.comm_power_per_vehicle = 0.06;
  const MonteCarloReport rep = monte_carlo(tmpl, seeds, 1, {Mode::Proposed, Mode::EqualBandwidth, Mode::CenterHover});
  const ModeAggregate& prop = *rep.find(Mode::Proposed);
  const ModeAggregate& equal = *rep.find(Mode::EqualBandwidth);
  const ModeAggregate& hover = *rep.find(Mode::CenterHover);
  int reversals = 0;
  for (int k = 0; k < seeds; ++k) {
    if (prop.trials[k].eta < equal.trials[k].eta || prop.trials[k].eta < hover.trials[k].eta) ++reversals;
  }
  const int complete = std::min({prop.completed, equal.completed, hover.completed});
  const double r_equal = prop.mean / equal.mean;
  const double r_hover = prop.mean / hover.mean;
  const bool ok = complete == seeds && prop.mean > equal.mean && equal.mean > hover.mean && r_equal >= 1.3 &&
                  r_equal <= 3.0 && r_hover >= 3.0 && r_hover <= 10.0;
  return {ok, fmt("%d seeds at p = 0.06 W: mean eta proposed %.4g, equal-bandwidth %.4g, center-hover %.4g bps; "
                  "ratios %.3f (band [1.3, 3]) and %.3f (band [3, 10]); %d single-seed reversals; %d/%d complete",
                  seeds, prop.mean, equal.mean, hover.mean, r_equal, r_hover, reversals, complete, seeds)};
}

Outcome rate_floor_trend() {
  const std::vector<double> floors{1e3, 1e4, 1e5, 1e6};
  const SweepResult res = sweep(default_template(), SweepParam::RateFloor, floors, 3, 1, {Mode::Proposed});
  bool ok = true;
  std::string means;
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const ModeAggregate& agg = res.points[i].report.modes[0];
    ok = ok && agg.completed == 3;
    means += fmt("%s%.4g", i ? ", " : "", agg.mean);
    if (i == 0) continue;
    const ModeAggregate& prev = res.points[i - 1].report.modes[0];
    for (std::size_t k = 0; k < agg.trials.size(); ++k) {
      ok = ok && agg.trials[k].eta <= prev.trials[k].eta * (1 + 1e-9);
    }
  }
  return {ok, "mean eta over 3 paired seeds for floors 1e3..1e6 bps: " + means};
}

Outcome sensitivity() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> xpos(-2000.0, 12000.0), ypos(0.0, 50.0), share(0.01, 1.0);
  const ScenarioConfig s = realize(default_template());
  double worst = 0.0;
  bool negative = true;
  for (int i = 0; i < 100; ++i) {
    const double d = uav_vehicle_distance({xpos(rng), ypos(rng)}, {xpos(rng), ypos(rng)}, s.uav_altitude);
    const double k = share(rng);
    auto rate = [&](double dist) {
      return instantaneous_rate(k, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain, s.noise_vehicle, dist);
    };
    const double h = 1e-4 * d;
    const double fd = (rate(d + h) - rate(d - h)) / (2 * h);
    const double an = rate_distance_derivative(k, s.total_bandwidth, s.comm_power_per_vehicle, s.reference_gain,
                                               s.noise_vehicle, d);
    negative = negative && an < 0.0;
    worst = std::max(worst, std::abs(an - fd) / std::abs(an));
  }
  const VerificationReport& rep = golden().verification;
  const bool tight = rep.binding_slots > 0 && rep.tight_slots == rep.binding_slots && rep.max_binding_bound_gap <= 1e-4;
  return {worst <= 1e-6 && negative && tight,
          fmt("derivative rel error %.3g at 100 geometries (limit 1e-6), %s; share bound tight at %d of %d binding "
              "slots, max gap %.3g (limit 1e-4)",
              worst, negative ? "all negative" : "NOT all negative", rep.tight_slots, rep.binding_slots,
              rep.max_binding_bound_gap)};
}

Outcome determinism(const std::string& tool, const std::string& scenario) {
  const fs::path root = fs::temp_directory_path() / ("uavnet_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + tool + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const std::string base = "solve --scenario \"" + scenario + "\" --mode proposed --seed 7 --out \"";
  const int a = run(base + (root / "a").string() + "\"");
  const int b = run(base + (root / "b").string() + "\"");
  bool same = a == 0 && b == 0;
  for (const char* f : {"trajectory.csv", "rates.csv", "allocation.csv", "convergence.csv"}) {
    same = same && fs::exists(root / "a" / f) && cli::read_file(root / "a" / f) == cli::read_file(root / "b" / f);
  }
  const int v = run("validate --dir \"" + (root / "a").string() + "\"");
  fs::remove_all(root);
  return {same && v == 0, fmt("solve exits %d and %d, CSVs %s, validate exits %d", a, b,
                              same ? "byte-identical" : "DIFFER", v)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string tool = "uavnet";
  std::string scenario;
  std::vector<int> only;
  bool smoke = false;
  app.add_option("--tool", tool, "Path to the uavnet executable");
  app.add_option("--scenario", scenario, "Golden scenario file for the determinism check");
  app.add_option("--only", only, "Run only these criteria");
  app.add_flag("--smoke", smoke, "Three seeds instead of ten for the ordering criterion");
  CLI11_PARSE(app, argc, argv);

  if (scenario.empty()) {
    scenario = (fs::temp_directory_path() / "uavnet_default_scenario.json").string();
    cli::write_file_atomic(scenario, to_json(default_template()).dump(2) + "\n");
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"model formulas against 50-digit evaluation", model_formulas},
      {"tangent bounds tight and global", tangent_bounds},
      {"allocation LP against exact simplex", lp_oracle},
      {"monotone traces on the default scenario", monotone_traces},
      {"golden solution satisfies every constraint", constraints},
      {"mode ordering over paired seeds", [&] { return ordering(smoke ? 3 : 10); }},
      {"rate floor sweep nonincreasing", rate_floor_trend},
      {"rate sensitivity and share bound tightness", sensitivity},
      {"deterministic artifacts", [&] { return determinism(tool, scenario); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s | %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
