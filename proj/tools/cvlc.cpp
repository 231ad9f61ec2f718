// Command-line front end: evasion check, single-trial simulation, sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cvlc/error.hpp"
#include "cvlc/evasion.hpp"
#include "cvlc/planner.hpp"
#include "cvlc/scenario.hpp"
#include "cvlc/sim.hpp"
#include "cvlc/sweep.hpp"

using namespace cvlc;

namespace {

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int Fail(std::string_view code, const std::string& message) {
  std::cerr << "error code=" << code << " message=" << Quote(message) << "\n";
  return 2;
}

std::string_view ConstraintName(LimitingConstraint c) {
  switch (c) {
    case LimitingConstraint::kNone: return "none";
    case LimitingConstraint::kLeader: return "leader";
    case LimitingConstraint::kFollower: return "follower";
    case LimitingConstraint::kLateralInfeasible: return "lateral";
  }
  return "?";
}

std::string_view ModelName(FollowerModel m) {
  switch (m) {
    case FollowerModel::kAggressive: return "aggressive";
    case FollowerModel::kCollaborative: return "collaborative";
    case FollowerModel::kAbsent: return "absent";
  }
  return "?";
}

std::string Num(double v) {
  if (v == kInf) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int RunCheck(const std::string& scenario_path, const std::string& mode_name) {
  const PlannerMode mode = ParsePlannerMode(mode_name);
  const ScenarioConfig cfg = ValidateScenario(LoadScenario(scenario_path));
  const WorldSnapshot world = InitialSnapshot(cfg);
  const ChainResult chain = WorldChain(world, cfg);
  const MaskedView view =
      MaskObservation(mode, world, chain, AggressivenessLabel::kUnknown, cfg);
  const CertificationInput& in = view.certification;
  const EvasionCheck c =
      EvasionExists(world.ego, in.leader, in.leader_decel, in.follower, in.follower_model, in.ctx);

  std::cout << "mode=" << ToString(mode) << "\n";
  std::cout << "leader_decel=" << Num(in.leader_decel) << "\n";
  std::cout << "follower_model=" << ModelName(in.follower_model) << "\n";
  std::cout << "evasion_exists=" << (c.exists ? "true" : "false") << "\n";
  std::cout << "limiting_constraint=" << ConstraintName(c.limiting_constraint) << "\n";
  std::cout << "t_1=" << Num(c.lateral.t_1) << "\n";
  std::cout << "t_y_f=" << Num(c.lateral.t_y_f) << "\n";
  if (c.longitudinal) {
    const LongitudinalPlan& lon = *c.longitudinal;
    std::cout << "case=" << lon.case_id << "\n";
    std::cout << "t_x_1=" << Num(lon.t_x_1) << "\n";
    std::cout << "t_x_2=" << Num(lon.t_x_2) << "\n";
    std::cout << "tau_1=" << Num(lon.tau_1) << "\n";
    std::cout << "tau_2=" << Num(lon.tau_2) << "\n";
  }
  return 0;
}

int RunSimulate(const std::string& scenario_path, const std::string& mode_name,
                const std::string& weights, std::uint64_t seed, const std::string& out_path) {
  const PlannerMode mode = ParsePlannerMode(mode_name);
  const ScenarioConfig cfg = LoadScenario(scenario_path);
  PlannerSpec spec;
  if (!weights.empty()) {
    spec.kind = PlannerKind::kNetwork;
    spec.network = LoadNetworkWeights(weights);
  }
  SimOptions opt;
  opt.record_trajectory = true;
  const TrialResult r = RunTrial(cfg, mode, spec, seed, opt);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + out_path + "' for writing");
  WriteTrajectoryCsv(r.trajectory, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write to '" + out_path + "' failed");

  std::cout << "success=" << (r.success ? "true" : "false")
            << " collision=" << (r.collision ? "true" : "false")
            << " completion_time=" << (r.completion_time ? Num(*r.completion_time) : "nan")
            << " aborts=" << r.abort_count << "\n";
  return 0;
}

int RunSweepCommand(const std::string& config_path, const std::string& out_path,
                    std::optional<int> parallel, std::optional<int> trials,
                    std::optional<std::uint64_t> seed) {
  SweepConfig sweep = LoadSweepConfig(config_path);
  if (trials) sweep.trials_per_cell = *trials;
  if (seed) sweep.seed = *seed;
  ValidateSweep(sweep);
  const int threads =
      parallel ? *parallel : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (threads < 1) throw Error(ErrorCode::kInvalidConfig, "--parallel must be >= 1");
  const auto rows = RunSweep(sweep, threads);
  WriteResults(rows, out_path);
  int collisions = 0;
  for (const SweepRow& r : rows) collisions += r.collisions;
  std::cout << "cells=" << rows.size() << " trials_per_cell=" << sweep.trials_per_cell
            << " collisions=" << collisions << " out=" << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-change safety engine and Monte Carlo harness"};
  app.require_subcommand(1);

  std::string scenario, mode = "CV_all", weights, out, config;
  std::uint64_t seed = 0;
  std::optional<int> parallel, trials;
  std::optional<std::uint64_t> sweep_seed;

  auto* check = app.add_subcommand("check", "Evasion check at the scenario's initial state");
  check->add_option("--scenario", scenario, "Scenario JSON")->required();
  check->add_option("--mode", mode, "CV_all, CV_follow, CV_none or No_agg_assess");

  auto* simulate = app.add_subcommand("simulate", "Run one trial and write its trajectory");
  simulate->add_option("--scenario", scenario, "Scenario JSON")->required();
  simulate->add_option("--mode", mode, "Planner mode")->required();
  simulate->add_option("--planner", weights, "Network weights JSON");
  simulate->add_option("--seed", seed, "Trial seed")->required();
  simulate->add_option("--out", out, "Trajectory CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a grid sweep and write aggregated rows");
  sweep->add_option("--config", config, "Sweep JSON")->required();
  sweep->add_option("--out", out, "Results CSV")->required();
  sweep->add_option("--parallel", parallel, "Worker threads");
  sweep->add_option("--trials", trials, "Trials per cell");
  sweep->add_option("--seed", sweep_seed, "Sweep seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("Usage", e.what());
  }

  try {
    if (check->parsed()) return RunCheck(scenario, mode);
    if (simulate->parsed()) return RunSimulate(scenario, mode, weights, seed, out);
    return RunSweepCommand(config, out, parallel, trials, sweep_seed);
  } catch (const Error& e) {
    return Fail(ToString(e.code()), e.what());
  } catch (const std::exception& e) {
    return Fail("Internal", e.what());
  }
}
