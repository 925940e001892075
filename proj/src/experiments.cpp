#include "uavnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "uavnet/errors.hpp"

namespace uavnet {

const ModeAggregate* MonteCarloReport::find(Mode mode) const {
  for (const auto& m : modes) {
    if (m.mode == mode) return &m;
  }
  return nullptr;
}

int worker_count(int tasks) {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("UAVNET_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) workers = std::min(workers, static_cast<int>(cap));
  }
  return std::max(1, std::min(workers, tasks));
}

void parallel_for(int count, const std::function<void(int)>& task) {
  if (count <= 0) return;
  const int workers = worker_count(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

TrialOutcome run_trial(const ScenarioTemplate& tmpl, std::uint64_t seed, Mode mode) {
  TrialOutcome out;
  out.seed = seed;
  try {
    ScenarioTemplate t = tmpl;
    std::get<SamplerSpec>(t.fleet).seed = seed;
    const Solution sol = run_mode(realize(t), mode);
    out.eta = sol.eta;
    out.status = sol.verification.valid ? TrialStatus::Valid : TrialStatus::Failed;
    if (!sol.verification.valid) out.diagnostic = "solution failed verification";
  } catch (const InfeasibleError& e) {
    out.status = TrialStatus::Infeasible;
    out.diagnostic = e.what();
  } catch (const SolverError& e) {
    out.status = TrialStatus::Failed;
    out.diagnostic = e.what();
  }
  return out;
}

void aggregate(ModeAggregate& agg) {
  std::vector<double> etas;
  for (const auto& t : agg.trials) {
    if (t.status == TrialStatus::Valid) etas.push_back(t.eta);
    agg.infeasible += t.status == TrialStatus::Infeasible;
    agg.failed += t.status == TrialStatus::Failed;
  }
  agg.completed = static_cast<int>(etas.size());
  if (etas.empty()) return;
  double sum = 0.0;
  for (double e : etas) sum += e;
  agg.mean = sum / static_cast<double>(etas.size());
  if (etas.size() < 2) return;
  double ss = 0.0;
  for (double e : etas) ss += (e - agg.mean) * (e - agg.mean);
  agg.stddev = std::sqrt(ss / static_cast<double>(etas.size() - 1));
}

void require_sampler(const ScenarioTemplate& tmpl) {
  if (!std::holds_alternative<SamplerSpec>(tmpl.fleet)) {
    throw ScenarioError("Monte Carlo runs need a sampled fleet, not explicit vehicle tracks");
  }
}

MonteCarloReport empty_report(int trials, std::uint64_t base_seed, const std::vector<Mode>& modes) {
  if (trials < 1) throw ScenarioError("trial count must be at least 1");
  if (modes.empty()) throw ScenarioError("at least one mode is required");
  MonteCarloReport report;
  for (int k = 0; k < trials; ++k) report.seeds.push_back(base_seed + static_cast<std::uint64_t>(k));
  for (Mode m : modes) {
    ModeAggregate agg;
    agg.mode = m;
    agg.trials.resize(static_cast<std::size_t>(trials));
    report.modes.push_back(std::move(agg));
  }
  return report;
}

}  // namespace

MonteCarloReport monte_carlo(const ScenarioTemplate& tmpl, int trials, std::uint64_t base_seed,
                             const std::vector<Mode>& modes) {
  require_sampler(tmpl);
  MonteCarloReport report = empty_report(trials, base_seed, modes);
  const int per_trial = static_cast<int>(modes.size());
  // Results land in fixed slots, so completion order never affects the report.
  parallel_for(trials * per_trial, [&](int i) {
    const int k = i / per_trial;
    auto& agg = report.modes[static_cast<std::size_t>(i % per_trial)];
    agg.trials[static_cast<std::size_t>(k)] = run_trial(tmpl, report.seeds[static_cast<std::size_t>(k)], agg.mode);
  });
  for (auto& agg : report.modes) aggregate(agg);
  return report;
}

std::string_view sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::VehicleCount:
      return "vehicles";
    case SweepParam::TransmitPower:
      return "power";
    case SweepParam::RateFloor:
      return "rth";
  }
  return "unknown";
}

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::VehicleCount, SweepParam::TransmitPower, SweepParam::RateFloor}) {
    if (sweep_param_name(p) == name) return p;
  }
  return std::nullopt;
}

ScenarioTemplate apply_sweep_value(const ScenarioTemplate& tmpl, SweepParam param, double value) {
  require_sampler(tmpl);
  ScenarioTemplate out = tmpl;
  auto& sampler = std::get<SamplerSpec>(out.fleet);
  switch (param) {
    case SweepParam::VehicleCount: {
      const int base = sampler.high_speed_count + sampler.normal_count;
      const double extra = value - base;
      if (value != std::floor(value) || extra < 0.0 || std::fmod(extra, 2.0) != 0.0) {
        throw ScenarioError("vehicle count " + std::to_string(value) + " must be " + std::to_string(base) +
                            " plus an even number");
      }
      sampler.high_speed_count += static_cast<int>(extra) / 2;
      sampler.normal_count += static_cast<int>(extra) / 2;
      break;
    }
    case SweepParam::TransmitPower:
      if (!(value > 0.0)) throw ScenarioError("transmit power must be positive");
      out.base.comm_power_per_vehicle = value;
      break;
    case SweepParam::RateFloor:
      if (!(value > 0.0)) throw ScenarioError("rate floor must be positive");
      sampler.fastest_rate_floor = value;
      if (!sampler.fastest_min_speed) sampler.fastest_min_speed = 38.0;
      break;
  }
  return out;
}

SweepResult sweep(const ScenarioTemplate& tmpl, SweepParam param, const std::vector<double>& values,
                  int trials, std::uint64_t base_seed, const std::vector<Mode>& modes) {
  if (values.empty()) throw ScenarioError("sweep needs at least one value");
  if (!std::is_sorted(values.begin(), values.end())) throw ScenarioError("sweep values must be sorted ascending");
  SweepResult result;
  result.param = param;
  for (double v : values) {
    SweepPoint point;
    point.value = v;
    point.tmpl = apply_sweep_value(tmpl, param, v);
    point.report = empty_report(trials, base_seed, modes);
    result.points.push_back(std::move(point));
  }
  const int per_point = trials * static_cast<int>(modes.size());
  parallel_for(static_cast<int>(values.size()) * per_point, [&](int i) {
    SweepPoint& point = result.points[static_cast<std::size_t>(i / per_point)];
    const int within = i % per_point;
    const int k = within / static_cast<int>(modes.size());
    auto& agg = point.report.modes[static_cast<std::size_t>(within % static_cast<int>(modes.size()))];
    agg.trials[static_cast<std::size_t>(k)] =
        run_trial(point.tmpl, point.report.seeds[static_cast<std::size_t>(k)], agg.mode);
  });
  for (auto& point : result.points) {
    for (auto& agg : point.report.modes) aggregate(agg);
  }
  return result;
}

}  // namespace uavnet
