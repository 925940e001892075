#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uavnet/bca.hpp"
#include "uavnet/experiments.hpp"

namespace uavnet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,       // I/O, schema, or argument error
  kExitInfeasible = 2,
  kExitSolver = 3,      // solver failure or a solution that fails verification
  kExitMismatch = 4,    // stored artifacts disagree with recomputation
};

struct SolveArgs {
  std::optional<std::filesystem::path> scenario;  // built-in defaults when empty
  Mode mode = Mode::Proposed;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  std::optional<double> epsilon;
  std::optional<int> max_outer_iterations;
};

struct SweepArgs {
  std::optional<std::filesystem::path> scenario;
  SweepParam param = SweepParam::TransmitPower;
  std::vector<double> values;
  int trials = 5;
  std::vector<Mode> modes{Mode::Proposed, Mode::CenterHover, Mode::EqualBandwidth};
  std::optional<std::uint64_t> seed;  // base seed; the scenario's sampler seed otherwise
  std::filesystem::path out_dir = "sweep_out";
};

/// Writes trajectory.csv, rates.csv, allocation.csv, convergence.csv, verify.txt and
/// manifest.json. Returns kExitOk only for a VALID solution.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);

/// Writes sweep.csv, manifest.json and one manifest per sweep point under points/.
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

/// Recomputes the verification report from the CSVs and the manifest's scenario.
/// kExitOk iff it equals verify.txt byte for byte and is VALID.
int cmd_validate(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// `uavnet {solve|sweep|validate} [flags]`.
int run(int argc, char** argv);

}  // namespace uavnet::cli
