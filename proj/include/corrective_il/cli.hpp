// Copyright 2026 The Corrective IL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. RunCli is the whole program minus process setup,
// so it can be exercised in-process.
//
// Exit codes: 0 success, 1 invalid input (flags, config, data), 2 runtime
// failure.

#ifndef CORRECTIVE_IL_CLI_HPP_
#define CORRECTIVE_IL_CLI_HPP_

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "corrective_il/artifacts.hpp"
#include "corrective_il/config.hpp"
#include "corrective_il/demo_io.hpp"
#include "corrective_il/experiment.hpp"
#include "corrective_il/report.hpp"
#include "corrective_il/teleop_server.hpp"

namespace corrective_il {

inline constexpr const char* kOutEnvVar = "CORRECTIVE_IL_OUT";

struct CliStreams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace cli_detail {

struct CommonFlags {
  std::string config;
  std::string out;
  int budget_iters = -1;
  int jobs = 1;
  bool force = false;
};

inline RunConfig LoadWithOverrides(const CommonFlags& f) {
  if (!fs::exists(f.config)) throw ValidationError("config file not found: " + f.config);
  RunConfig cfg = LoadRunConfig(f.config);
  if (f.budget_iters >= 0) cfg.train.iterations = f.budget_iters;
  if (f.jobs < 1) throw ValidationError("--jobs must be >= 1");
  cfg.Validate();
  return cfg;
}

// --out, then $CORRECTIVE_IL_OUT, then the config's output dir.
inline fs::path OutRoot(const CommonFlags& f, const RunConfig& cfg) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv(kOutEnvVar); env && *env) return env;
  return cfg.out_dir;
}

inline std::vector<std::string> ParsePlans(const std::string& arg) {
  if (arg == "all") return {kPlanLabels.begin(), kPlanLabels.end()};
  std::vector<std::string> plans = config_detail::Split(arg, ',');
  for (const auto& p : plans) CountsForLabel(p);
  return plans;
}

inline int GenDemos(const CommonFlags& f, CliStreams io) {
  const RunConfig cfg = LoadWithOverrides(f);
  const fs::path dir = f.out.empty() ? OutRoot(f, cfg) / "demos" : fs::path(f.out);
  const std::uint64_t hash = ConfigHash(cfg);
  if (!f.force && IsComplete(dir / "gen.json", hash)) {
    io.out << "up to date: " << dir.string() << "\n";
    return 0;
  }
  ClaimRunDir(dir, cfg, f.force);
  DemoSet set = GenerateOracleDemos(cfg.demos.region, cfg.demos.count, cfg.demos.seed, 0, cfg.env);
  if (cfg.demos.degraded) {
    int ok = 0;
    for (auto& d : set.demos) {
      d = Degrade(d, cfg.noise, cfg.env);
      ok += d.success ? 1 : 0;
    }
    io.out << "degraded demos still successful on replay: " << ok << "/" << set.demos.size()
           << "\n";
  }
  SaveDemoSet(set, dir, hash);
  detail::WriteJson(dir / "gen.json", {{"status", "complete"},
                                       {"config_hash", HashHex(hash)},
                                       {"label", set.label},
                                       {"count", set.demos.size()}});
  io.out << "wrote " << set.demos.size() << " demos (" << set.label << ") to " << dir.string()
         << "\n";
  return 0;
}

inline int TrainCmd(const CommonFlags& f, const std::string& demos_dir,
                    const std::string& region_name, CliStreams io) {
  RunConfig cfg = LoadWithOverrides(f);
  const Region region = ParseRegion(region_name);
  const fs::path dir = f.out.empty() ? OutRoot(f, cfg) / "train" : fs::path(f.out);
  const std::uint64_t hash = ConfigHash(cfg);
  const json invocation = {{"demos", demos_dir}, {"region", region_name}};
  if (!f.force && IsComplete(dir / "train.json", hash)) {
    if (ReadJsonFile(dir / "train.json")->value("invocation", json()) == invocation) {
      io.out << "up to date: " << dir.string() << "\n";
      return 0;
    }
  }
  DemoSet demos;
  if (!demos_dir.empty()) demos = LoadDemoSet(demos_dir);
  ClaimRunDir(dir, cfg, f.force);
  detail::WriteJson(dir / "train.json", {{"status", "running"}, {"config_hash", HashHex(hash)}});

  TrainConfig tc = cfg.train;
  tc.threads = f.jobs;
  const auto result = Train(tc, demos, region, cfg.env, [&](int it, const GaussianPolicy& p) {
    SaveCheckpoint(dir / ("policy-iter" + std::to_string(it) + ".ckpt"), p, hash);
  });
  SaveCheckpoint(dir / "policy.ckpt", result.policy, hash);
  WriteTrainLogCsv(dir / "trainlog.csv", result.log, hash);
  const double last = result.log.records.empty() ? 0.0 : result.log.records.back().success_ratio;
  detail::WriteJson(dir / "train.json", {{"status", "complete"},
                                         {"config_hash", HashHex(hash)},
                                         {"invocation", invocation},
                                         {"iterations", tc.iterations},
                                         {"bc_loss_before", result.log.bc_loss_before},
                                         {"bc_loss_after", result.log.bc_loss_after},
                                         {"final_training_success", last}});
  io.out << "trained " << tc.iterations << " iterations; final training success " << last
         << "; wrote " << dir.string() << "\n";
  return 0;
}

inline int EvalCmd(const CommonFlags& f, const std::string& policy_path,
                   const std::string& region_name, int triage, CliStreams io) {
  const RunConfig cfg = LoadWithOverrides(f);
  if (policy_path.empty()) throw ValidationError("--policy is required");
  const Checkpoint ckpt = LoadCheckpoint(policy_path);
  const std::uint64_t hash = ConfigHash(cfg);
  if (ckpt.config_hash != hash) {
    io.err << "note: checkpoint config " << HashHex(ckpt.config_hash) << " differs from "
           << HashHex(hash) << "\n";
  }
  const Region region = ParseRegion(region_name);
  EvalReport report;
  if (region == Region::kFull) {
    report = Evaluate(ckpt.policy, BuildEvalSet(cfg.experiment.eval_seed, cfg.env), cfg.env,
                      fs::path(policy_path).filename().string(), f.jobs);
  } else {
    // A region-restricted evaluation set, same size and id block.
    Rng rng = MakeRng(DeriveSeed(cfg.experiment.eval_seed, "eval-" + region_name));
    std::vector<TaskInstance> tasks;
    for (int i = 0; i < kEvalSetSize; ++i) {
      tasks.push_back(SampleTask(region, rng, kEvalIdBase + i, cfg.env));
    }
    report = Evaluate(ckpt.policy, tasks, cfg.env, fs::path(policy_path).filename().string(),
                      cfg.experiment.eval_seed, f.jobs);
  }
  const fs::path dir = f.out.empty() ? OutRoot(f, cfg) / "eval" : fs::path(f.out);
  fs::create_directories(dir);
  detail::WriteReportCsv(dir / ("eval_" + region_name + ".csv"), report, hash);
  json summary = {{"status", "complete"},
                  {"config_hash", HashHex(hash)},
                  {"policy", policy_path},
                  {"region", region_name},
                  {"eval_seed", cfg.experiment.eval_seed},
                  {"success_ratio", report.success_ratio}};
  if (triage > 0) {
    json tasks = json::array();
    for (const auto& fc : TriageFailures(report, static_cast<std::size_t>(triage))) {
      tasks.push_back({{"task", TaskToJson(fc.task)}, {"score", fc.score}});
    }
    detail::WriteJson(dir / "triage.json", {{"config_hash", HashHex(hash)},
                                            {"eval_seed", cfg.experiment.eval_seed},
                                            {"tasks", tasks}});
  }
  detail::WriteJson(dir / ("eval_" + region_name + ".json"), summary);
  io.out << region_name << " success ratio " << report.success_ratio << "\n";
  return 0;
}

inline int ExperimentCmd(const CommonFlags& f, const std::string& plans_arg, int seeds,
                         CliStreams io) {
  RunConfig cfg = LoadWithOverrides(f);
  if (!plans_arg.empty()) cfg.experiment.plans = ParsePlans(plans_arg);
  if (seeds > 0) {
    cfg.experiment.seeds.clear();
    for (int s = 1; s <= seeds; ++s) cfg.experiment.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  cfg.Validate();
  const fs::path out = OutRoot(f, cfg);
  ExperimentOptions opts{cfg.experiment.plans, cfg.experiment.seeds, f.jobs, f.force};
  const auto outcome = RunExperiment(cfg, out, opts, [&](const std::string& line) {
    io.err << line << "\n";
  });
  io.out << "cells run: " << outcome.cells_run << ", reused: " << outcome.cells_reused << "\n";
  if (outcome.summary) {
    const Summary& s = *outcome.summary;
    if (s.h2) io.out << "H2 " << (s.h2_supported ? "supported" : "not supported") << "\n";
    if (s.h3) io.out << "H3 " << (s.h3_supported ? "supported" : "not supported") << "\n";
  }
  io.out << "summary: " << (out / "summary.json").string() << "\n";
  return 0;
}

inline int ReportCmd(const std::string& runs, const std::string& out_arg, CliStreams io) {
  const fs::path out = out_arg.empty() ? fs::path(runs) / "report" : fs::path(out_arg);
  const ReportPaths paths = WriteReport(runs, out);
  io.out << "wrote " << paths.aggregate_csv.string() << ", " << paths.curves_svg.string() << "\n";
  return 0;
}

inline int ServeTeleop(const CommonFlags& f, int port, const std::string& triage_from,
                       bool keep_failures, CliStreams io) {
  const RunConfig cfg = LoadWithOverrides(f);
  if (port < 0 || port > 65535) throw ValidationError("--port must lie in [0, 65535]");
  TeleopOptions opts;
  opts.env = cfg.env;
  opts.keep_failures = keep_failures;
  opts.region = cfg.demos.region;
  opts.seed = cfg.demos.seed;
  if (!triage_from.empty()) opts.queue = LoadTriageQueue(triage_from);
  const fs::path root = f.out.empty() ? OutRoot(f, cfg) / "teleop" : fs::path(f.out);
  fs::create_directories(root);
  DemoStore store(root, ConfigHash(cfg));

  // Route SIGINT/SIGTERM to a waiter thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  TeleopServer server(opts, store, [&](const std::string& line) { io.err << line << std::endl; });
  const std::uint16_t bound = server.Listen(static_cast<std::uint16_t>(port));
  io.out << "listening on 127.0.0.1:" << bound << " (schema " << kTeleopSchemaVersion
         << ", queue " << opts.queue.size() << ", demos under " << root.string() << ")"
         << std::endl;
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  server.Serve();
  return 0;
}

}  // namespace cli_detail

inline int RunCli(int argc, const char* const* argv, CliStreams io = {}) {
  using namespace cli_detail;
  CLI::App app{"Corrective demonstrations for demo-augmented policy gradient", "corrective_il"};
  app.require_subcommand(1, 1);
  CommonFlags f;
  auto common = [&f](CLI::App* sub, bool with_budget) {
    sub->add_option("--config", f.config, "Experiment config file (INI)")->required();
    sub->add_option("--out", f.out, "Output directory (default: $CORRECTIVE_IL_OUT or config)");
    sub->add_flag("--force", f.force, "Redo work even if outputs are up to date");
    sub->add_option("--jobs", f.jobs, "Parallel workers")->default_val(1);
    if (with_budget) sub->add_option("--budget-iters", f.budget_iters, "Override iterations");
  };

  auto* gen = app.add_subcommand("gen-demos", "Generate oracle (optionally degraded) demos");
  common(gen, false);

  std::string demos_dir;
  std::string region = "full";
  auto* train = app.add_subcommand("train", "BC pretraining then demo-augmented NPG");
  common(train, true);
  train->add_option("--demos", demos_dir, "Demo set directory (omit for pure RL)");
  train->add_option("--region", region, "Rollout region: restrictive|full|full_extension");

  std::string policy;
  std::string eval_region = "full";
  int triage = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the evaluation set");
  common(eval, false);
  eval->add_option("--policy", policy, "Checkpoint file")->required();
  eval->add_option("--region", eval_region, "full (the evaluation set) or a single region");
  eval->add_option("--triage", triage, "Also write the N lowest-scoring tasks to triage.json");

  std::string plans;
  int seeds = 0;
  auto* exp = app.add_subcommand("experiment", "Run the plan x seed matrix");
  common(exp, true);
  exp->add_option("--plans", plans, "'all' or comma-separated plan labels");
  exp->add_option("--seeds", seeds, "Use seeds 1..N");

  std::string runs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Aggregate CSV and learning-curve plots");
  report->add_option("runs", runs, "Experiment output directory")->required();
  report->add_option("--out", report_out, "Report directory (default: <runs>/report)");

  int port = 8765;
  std::string triage_from;
  bool keep_failures = false;
  auto* serve = app.add_subcommand("serve-teleop", "Host teleoperation sessions");
  common(serve, false);
  serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 = any free port)");
  serve->add_option("--triage-from", triage_from, "Run dir or triage.json with tasks to correct");
  serve->add_flag("--keep-failures", keep_failures, "Also record unsuccessful episodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) return GenDemos(f, io);
    if (train->parsed()) return TrainCmd(f, demos_dir, region, io);
    if (eval->parsed()) return EvalCmd(f, policy, eval_region, triage, io);
    if (exp->parsed()) return ExperimentCmd(f, plans, seeds, io);
    if (report->parsed()) return ReportCmd(runs, report_out, io);
    if (serve->parsed()) return ServeTeleop(f, port, triage_from, keep_failures, io);
  } catch (const ValidationError& e) {
    io.err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    io.err << "failed: " << e.what() << "\n";
    return 2;
  }
  io.err << app.help();
  return 1;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_CLI_HPP_
