#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavnet/bca.hpp"
#include "uavnet/scenario.hpp"

namespace uavnet {

enum class TrialStatus { Valid, Infeasible, Failed };

struct TrialOutcome {
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::Failed;
  double eta = 0.0;  // bps, meaningful only when Valid
  std::string diagnostic;
};

/// Aggregate over the Valid trials of one mode. Invalid and failed trials are
/// counted but excluded from mean and stddev.
struct ModeAggregate {
  Mode mode = Mode::Proposed;
  std::vector<TrialOutcome> trials;  // in seed order, paired across modes
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev, 0 for fewer than two values
  int completed = 0;
  int infeasible = 0;
  int failed = 0;
};

struct MonteCarloReport {
  std::vector<std::uint64_t> seeds;
  std::vector<ModeAggregate> modes;  // same order as requested

  [[nodiscard]] const ModeAggregate* find(Mode mode) const;
};

/// Trial k realizes the template with sampler seed base_seed + k, k = 0..trials-1,
/// and runs every mode on that same fleet. Requires a sampled fleet.
MonteCarloReport monte_carlo(const ScenarioTemplate& tmpl, int trials, std::uint64_t base_seed,
                             const std::vector<Mode>& modes);

enum class SweepParam { VehicleCount, TransmitPower, RateFloor };

std::string_view sweep_param_name(SweepParam param);
std::optional<SweepParam> parse_sweep_param(std::string_view name);

/// VehicleCount adds (value - V0) / 2 normal and as many high-speed vehicles.
/// TransmitPower sets p in W. RateFloor sets the fastest vehicle's floor in bps and
/// draws it from above 38 m/s unless the template already says otherwise.
ScenarioTemplate apply_sweep_value(const ScenarioTemplate& tmpl, SweepParam param, double value);

struct SweepPoint {
  double value = 0.0;
  ScenarioTemplate tmpl;
  MonteCarloReport report;
};

struct SweepResult {
  SweepParam param = SweepParam::TransmitPower;
  std::vector<SweepPoint> points;
};

/// `values` must be sorted ascending. Every point uses the same seeds.
SweepResult sweep(const ScenarioTemplate& tmpl, SweepParam param, const std::vector<double>& values,
                  int trials, std::uint64_t base_seed, const std::vector<Mode>& modes);

/// Worker count: hardware concurrency, capped by UAVNET_THREADS when set.
int worker_count(int tasks);

/// Runs task(i) for i in [0, count) on worker_count(count) threads. Each index runs once.
void parallel_for(int count, const std::function<void(int)>& task);

}  // namespace uavnet
