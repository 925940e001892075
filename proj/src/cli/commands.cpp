#include "uavnet/cli/commands.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavnet/cli/artifacts.hpp"
#include "uavnet/errors.hpp"

namespace uavnet::cli {

using nlohmann::json;

namespace {

ScenarioTemplate load_template(const std::optional<std::filesystem::path>& path) {
  return path ? load_scenario_template(*path) : default_template();
}

void set_seed(ScenarioTemplate& tmpl, std::uint64_t seed) {
  auto* sampler = std::get_if<SamplerSpec>(&tmpl.fleet);
  if (!sampler) throw ScenarioError("--seed needs a sampled fleet; this scenario lists explicit tracks");
  sampler->seed = seed;
}

std::optional<std::uint64_t> sampler_seed(const ScenarioTemplate& tmpl) {
  if (const auto* sampler = std::get_if<SamplerSpec>(&tmpl.fleet)) return sampler->seed;
  return std::nullopt;
}

json path_or_null(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> failing_checks(const VerificationReport& report) {
  std::vector<std::string> names;
  for (const auto& c : report.checks) {
    if (c.enforced && c.max_violation > report.tolerance) names.push_back(c.name + " (" + c.where + ")");
  }
  return names;
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioTemplate tmpl = load_template(args.scenario);
    json overrides = json::object();
    if (args.seed) set_seed(tmpl, *args.seed);
    if (args.epsilon) {
      tmpl.base.solver.epsilon = *args.epsilon;
      overrides["epsilon"] = *args.epsilon;
    }
    if (args.max_outer_iterations) {
      tmpl.base.solver.max_outer_iterations = *args.max_outer_iterations;
      overrides["max_outer_iterations"] = *args.max_outer_iterations;
    }
    const ScenarioConfig scenario = realize(tmpl);
    const Solution sol = run_mode(scenario, args.mode);

    std::filesystem::create_directories(args.out_dir);
    write_file_atomic(args.out_dir / "trajectory.csv", trajectory_csv(scenario, sol.trajectory));
    write_file_atomic(args.out_dir / "rates.csv", rates_csv(scenario, sol));
    write_file_atomic(args.out_dir / "allocation.csv", allocation_csv(sol.plan.share));
    write_file_atomic(args.out_dir / "convergence.csv", convergence_csv(sol));
    write_file_atomic(args.out_dir / "verify.txt", render_report(sol.verification));

    json manifest;
    manifest["command"] = "solve";
    manifest["tool_version"] = kToolVersion;
    manifest["scenario_path"] = path_or_null(args.scenario);
    manifest["seed"] = sampler_seed(tmpl) ? json(*sampler_seed(tmpl)) : json(nullptr);
    manifest["mode"] = std::string(mode_name(args.mode));
    manifest["overrides"] = overrides;
    manifest["output_dir"] = args.out_dir.string();
    manifest["valid"] = sol.verification.valid;
    manifest["eta_bps"] = sol.eta;
    manifest["outer_iterations"] = sol.outer_iterations;
    manifest["duration_s"] = seconds_since(start);
    manifest["scenario"] = to_json(tmpl);
    write_file_atomic(args.out_dir / "manifest.json", manifest.dump(2) + "\n");

    out << mode_name(args.mode) << ": eta " << format_number(sol.eta) << " bps after " << sol.outer_iterations
        << " outer iterations, " << (sol.verification.valid ? "VALID" : "INVALID") << "\n";
    if (!sol.verification.valid) {
      for (const auto& name : failing_checks(sol.verification)) err << "violated: " << name << "\n";
      return kExitSolver;
    }
    return kExitOk;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioTemplate tmpl = load_template(args.scenario);
    if (args.seed) set_seed(tmpl, *args.seed);
    const auto base_seed = sampler_seed(tmpl);
    if (!base_seed) throw ScenarioError("sweeps need a sampled fleet");
    const SweepResult result = sweep(tmpl, args.param, args.values, args.trials, *base_seed, args.modes);

    std::filesystem::create_directories(args.out_dir / "points");
    write_file_atomic(args.out_dir / "sweep.csv", sweep_csv(result));
    json modes = json::array();
    for (Mode m : args.modes) modes.push_back(std::string(mode_name(m)));
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      const SweepPoint& point = result.points[i];
      json pm;
      pm["param"] = std::string(sweep_param_name(args.param));
      pm["value"] = point.value;
      pm["seeds"] = point.report.seeds;
      pm["modes"] = modes;
      json trials = json::object();
      for (const auto& agg : point.report.modes) {
        json rows = json::array();
        for (const auto& t : agg.trials) {
          const char* status = t.status == TrialStatus::Valid        ? "valid"
                               : t.status == TrialStatus::Infeasible ? "infeasible"
                                                                     : "failed";
          rows.push_back({{"seed", t.seed}, {"status", status}, {"eta_bps", t.eta}, {"diagnostic", t.diagnostic}});
        }
        trials[std::string(mode_name(agg.mode))] = rows;
      }
      pm["trials"] = trials;
      pm["scenario"] = to_json(point.tmpl);
      write_file_atomic(args.out_dir / "points" / ("point_" + std::to_string(i) + ".json"), pm.dump(2) + "\n");
    }
    json manifest;
    manifest["command"] = "sweep";
    manifest["tool_version"] = kToolVersion;
    manifest["scenario_path"] = path_or_null(args.scenario);
    manifest["seed"] = *base_seed;
    manifest["param"] = std::string(sweep_param_name(args.param));
    manifest["values"] = args.values;
    manifest["trials"] = args.trials;
    manifest["modes"] = modes;
    manifest["output_dir"] = args.out_dir.string();
    manifest["duration_s"] = seconds_since(start);
    manifest["scenario"] = to_json(tmpl);
    write_file_atomic(args.out_dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << result.points.size() * args.modes.size() << " aggregate rows to "
        << (args.out_dir / "sweep.csv").string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_validate(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  VerificationReport report;
  std::string stored;
  try {
    const json manifest = json::parse(read_file(dir / "manifest.json"));
    const auto mode = parse_mode(manifest.at("mode").get<std::string>());
    if (!mode) throw ScenarioError("manifest names an unknown mode");
    const ScenarioConfig scenario = realize(parse_scenario(manifest.at("scenario")));
    const Trajectory traj = parse_trajectory_csv(read_file(dir / "trajectory.csv"), scenario);
    const auto share = parse_allocation_csv(read_file(dir / "allocation.csv"), scenario);
    report = verify_solution(scenario, traj, share, *mode != Mode::EqualBandwidth);
    stored = read_file(dir / "verify.txt");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  bool ok = true;
  if (render_report(report) != stored) {
    err << "mismatch: recomputed report differs from verify.txt\n";
    ok = false;
  }
  for (const auto& name : failing_checks(report)) {
    err << "violated: " << name << "\n";
    ok = false;
  }
  if (!report.valid && ok) {
    err << "mismatch: recomputed report is not VALID\n";
    ok = false;
  }
  if (!ok) return kExitMismatch;
  out << "VALID: artifacts in " << dir.string() << " reproduce verify.txt\n";
  return kExitOk;
}

namespace {

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
    if (used != item.size()) throw CLI::ValidationError("--values", "bad number '" + item + "'");
  }
  return values;
}

Mode mode_from(const std::string& name) {
  const auto mode = parse_mode(name);
  if (!mode) throw CLI::ValidationError("--mode", "unknown mode '" + name + "'");
  return *mode;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"UAV relay trajectory and bandwidth optimizer"};
  app.require_subcommand(1);

  SolveArgs solve;
  std::string solve_mode = "proposed";
  std::string solve_scenario;
  std::uint64_t solve_seed = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Optimize one scenario and write artifacts");
  solve_cmd->add_option("--scenario", solve_scenario, "Scenario JSON file (built-in defaults if omitted)");
  solve_cmd->add_option("--mode", solve_mode, "proposed | center-hover | equal-bandwidth");
  auto* solve_seed_opt = solve_cmd->add_option("--seed", solve_seed, "Vehicle sampler seed");
  solve_cmd->add_option("--out", solve.out_dir, "Output directory");
  double epsilon = 0.0;
  int max_outer = 0;
  auto* eps_opt = solve_cmd->add_option("--epsilon", epsilon, "Relative convergence threshold");
  auto* outer_opt = solve_cmd->add_option("--max-outer", max_outer, "Outer iteration cap");

  SweepArgs sweep_args;
  std::string sweep_param = "power";
  std::string sweep_values;
  std::string sweep_modes = "proposed,center-hover,equal-bandwidth";
  std::string sweep_scenario;
  std::uint64_t sweep_seed = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over one parameter");
  sweep_cmd->add_option("--scenario", sweep_scenario, "Scenario JSON file (built-in defaults if omitted)");
  sweep_cmd->add_option("--param", sweep_param, "vehicles | power | rth")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated ascending values")->required();
  sweep_cmd->add_option("--trials", sweep_args.trials, "Trials per value");
  sweep_cmd->add_option("--modes", sweep_modes, "Comma-separated modes");
  auto* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Base seed; trial k uses seed + k");
  sweep_cmd->add_option("--out", sweep_args.out_dir, "Output directory");

  std::filesystem::path validate_dir = "out";
  auto* validate_cmd = app.add_subcommand("validate", "Recheck stored solve artifacts");
  validate_cmd->add_option("--dir", validate_dir, "Directory written by solve");

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) {
      solve.mode = mode_from(solve_mode);
      if (!solve_scenario.empty()) solve.scenario = solve_scenario;
      if (*solve_seed_opt) solve.seed = solve_seed;
      if (*eps_opt) solve.epsilon = epsilon;
      if (*outer_opt) solve.max_outer_iterations = max_outer;
      return cmd_solve(solve, std::cout, std::cerr);
    }
    if (sweep_cmd->parsed()) {
      const auto param = parse_sweep_param(sweep_param);
      if (!param) throw CLI::ValidationError("--param", "unknown parameter '" + sweep_param + "'");
      sweep_args.param = *param;
      sweep_args.values = parse_values(sweep_values);
      sweep_args.modes.clear();
      std::istringstream in(sweep_modes);
      for (std::string m; std::getline(in, m, ',');) sweep_args.modes.push_back(mode_from(m));
      if (!sweep_scenario.empty()) sweep_args.scenario = sweep_scenario;
      if (*sweep_seed_opt) sweep_args.seed = sweep_seed;
      return cmd_sweep(sweep_args, std::cout, std::cerr);
    }
    return cmd_validate(validate_dir, std::cout, std::cerr);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace uavnet::cli
