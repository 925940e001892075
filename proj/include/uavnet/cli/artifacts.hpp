#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavnet/bca.hpp"
#include "uavnet/experiments.hpp"

namespace uavnet::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits; parsing the text gives back the same double.
std::string format_number(double value);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string trajectory_csv(const ScenarioConfig& scenario, const Trajectory& traj);
std::string rates_csv(const ScenarioConfig& scenario, const Solution& solution);
std::string allocation_csv(const std::vector<std::vector<double>>& share);
std::string convergence_csv(const Solution& solution);
std::string sweep_csv(const SweepResult& result);

/// Inverse of trajectory_csv and allocation_csv. Throws std::runtime_error on
/// malformed rows or a slot count that disagrees with the scenario.
Trajectory parse_trajectory_csv(const std::string& text, const ScenarioConfig& scenario);
std::vector<std::vector<double>> parse_allocation_csv(const std::string& text, const ScenarioConfig& scenario);

}  // namespace uavnet::cli
