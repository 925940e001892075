#include "uavnet/cli/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uavnet/link_model.hpp"

namespace uavnet::cli {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

template <typename... Cells>
void row(std::string& out, const Cells&... cells) {
  bool first = true;
  auto put = [&](const auto& cell) {
    if (!first) out += ',';
    first = false;
    if constexpr (std::is_arithmetic_v<std::decay_t<decltype(cell)>>) {
      out += format_number(static_cast<double>(cell));
    } else {
      out += cell;
    }
  };
  (put(cells), ...);
  out += '\n';
}

std::string vehicle_columns(const std::string& prefix, int count) {
  std::string cols;
  for (int v = 0; v < count; ++v) cols += "," + prefix + std::to_string(v);
  return cols;
}

std::vector<std::vector<double>> parse_table(const std::string& text, const std::string& what,
                                             std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(what + ": missing header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty()) {
        throw std::runtime_error(what + ": bad number '" + cell + "' in row " + std::to_string(rows.size() + 1));
      }
      cells.push_back(v);
    }
    if (cells.size() != columns) {
      throw std::runtime_error(what + ": row " + std::to_string(rows.size() + 1) + " has " +
                               std::to_string(cells.size()) + " columns, expected " + std::to_string(columns));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

void check_slots(const std::vector<std::vector<double>>& rows, std::size_t expected, const std::string& what) {
  if (rows.size() != expected) {
    throw std::runtime_error(what + ": " + std::to_string(rows.size()) + " rows, expected " + std::to_string(expected));
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j][0] != static_cast<double>(j)) throw std::runtime_error(what + ": slots out of order at row " + std::to_string(j + 1));
  }
}

}  // namespace

std::string trajectory_csv(const ScenarioConfig& s, const Trajectory& traj) {
  std::string out = "slot,x_m,y_m,speed_mps,power_w\n";
  const auto speed = uav_speed_profile(traj, s.slot_length);
  for (std::size_t j = 0; j < traj.xy.size(); ++j) {
    const double power = j == 0 ? 0.0 : uav_power(speed[j], s.power_model, s.total_comm_power);
    row(out, static_cast<double>(j), traj.xy[j].x, traj.xy[j].y, speed[j], power);
  }
  return out;
}

std::string rates_csv(const ScenarioConfig& s, const Solution& sol) {
  std::string out = "slot" + vehicle_columns("rate_bps_v", s.vehicle_count()) + ",backhaul_capacity_bps,backhaul_load_bps\n";
  for (int j = 1; j <= s.slot_count; ++j) {
    out += std::to_string(j);
    double load = 0.0;
    for (const auto& rates : sol.per_slot_rates) {
      out += ',' + format_number(rates[j]);
      load += rates[j];
    }
    out += ',' + format_number(sol.backhaul_capacity[j]) + ',' + format_number(load) + '\n';
  }
  return out;
}

std::string allocation_csv(const std::vector<std::vector<double>>& share) {
  const int V = static_cast<int>(share.size());
  std::string out = "slot" + vehicle_columns("share_v", V) + '\n';
  const std::size_t slots = share.empty() ? 0 : share.front().size();
  for (std::size_t j = 0; j < slots; ++j) {
    out += std::to_string(j);
    for (const auto& s : share) out += ',' + format_number(s[j]);
    out += '\n';
  }
  return out;
}

std::string convergence_csv(const Solution& sol) {
  std::string out = "iteration,eta_bps\n";
  row(out, 0.0, sol.initial_objective);
  for (std::size_t r = 0; r < sol.outer_trace.size(); ++r) row(out, static_cast<double>(r + 1), sol.outer_trace[r]);
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "param,value,mode,mean_eta_bps,stddev_eta_bps,completed,infeasible,failed\n";
  const std::string param(sweep_param_name(result.param));
  for (const auto& point : result.points) {
    for (const auto& agg : point.report.modes) {
      row(out, param, point.value, std::string(mode_name(agg.mode)), agg.mean, agg.stddev,
          std::to_string(agg.completed), std::to_string(agg.infeasible), std::to_string(agg.failed));
    }
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text, const ScenarioConfig& s) {
  const auto rows = parse_table(text, "trajectory.csv", 5);
  check_slots(rows, static_cast<std::size_t>(s.slot_count + 1), "trajectory.csv");
  Trajectory traj;
  traj.altitude = s.uav_altitude;
  for (const auto& r : rows) traj.xy.push_back({r[1], r[2]});
  return traj;
}

std::vector<std::vector<double>> parse_allocation_csv(const std::string& text, const ScenarioConfig& s) {
  const auto rows = parse_table(text, "allocation.csv", static_cast<std::size_t>(s.vehicle_count() + 1));
  check_slots(rows, static_cast<std::size_t>(s.slot_count + 1), "allocation.csv");
  std::vector<std::vector<double>> share(static_cast<std::size_t>(s.vehicle_count()),
                                         std::vector<double>(rows.size(), 0.0));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t v = 0; v < share.size(); ++v) share[v][j] = rows[j][v + 1];
  }
  return share;
}

}  // namespace uavnet::cli
