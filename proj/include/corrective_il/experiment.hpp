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

// Run-directory orchestration: the (plan, seed) experiment matrix with
// resumable cells, plus the single-run helpers behind the CLI.

#ifndef CORRECTIVE_IL_EXPERIMENT_HPP_
#define CORRECTIVE_IL_EXPERIMENT_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrective_il/artifacts.hpp"
#include "corrective_il/config.hpp"
#include "corrective_il/harness.hpp"
#include "corrective_il/parallel.hpp"

namespace corrective_il {

using LogFn = std::function<void(const std::string&)>;

inline std::optional<json> ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

// True when `path` is a completed artifact written under `config_hash`.
inline bool IsComplete(const fs::path& path, std::uint64_t config_hash) {
  const auto j = ReadJsonFile(path);
  return j && j->value("status", "") == "complete" &&
         j->value("config_hash", "") == HashHex(config_hash);
}

// Writes config.ini into `dir`. A directory already holding a different
// configuration is only overwritten with `force`.
inline void ClaimRunDir(const fs::path& dir, const RunConfig& cfg, bool force) {
  fs::create_directories(dir);
  const fs::path ini = dir / "config.ini";
  const std::uint64_t hash = ConfigHash(cfg);
  if (fs::exists(ini) && !force) {
    std::uint64_t existing = 0;
    try {
      existing = ConfigHash(LoadRunConfig(ini));
    } catch (const ValidationError&) {
      throw ValidationError(ini.string() + " is unreadable; use --force to overwrite");
    }
    if (existing != hash) {
      throw ValidationError(dir.string() + " holds a run with config " + HashHex(existing) +
                            ", not " + HashHex(hash) + "; use --force to overwrite");
    }
  }
  std::ofstream(ini) << "# config_hash=" << HashHex(hash) << "\n" << ConfigFileText(cfg);
}

struct ExperimentOptions {
  std::vector<std::string> plans;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  bool force = false;
};

struct ExperimentOutcome {
  std::vector<CellSummary> cells;
  int cells_run = 0;
  int cells_reused = 0;
  std::optional<Summary> summary;
};

// Runs every (plan, seed) cell under out/<plan>/<seed>/ with up to `jobs`
// cells in parallel, then writes out/summary.json. Completed cells with the
// same config hash are reused unless `force`.
inline ExperimentOutcome RunExperiment(const RunConfig& cfg, const fs::path& out,
                                       const ExperimentOptions& opts, const LogFn& log = {}) {
  cfg.Validate();
  if (opts.plans.empty()) throw ValidationError("no plans selected");
  if (opts.seeds.empty()) throw ValidationError("no seeds selected");
  std::vector<ExperimentPlan> plans;
  for (const auto& label : opts.plans) plans.push_back(MakePlan(label, cfg.train));
  ClaimRunDir(out, cfg, opts.force);
  const std::uint64_t hash = ConfigHash(cfg);
  const EvalSet eval = BuildEvalSet(cfg.experiment.eval_seed, cfg.env);

  struct Job {
    const ExperimentPlan* plan;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : plans) {
    for (auto s : opts.seeds) jobs.push_back({&p, s});
  }

  ExperimentOutcome outcome;
  outcome.cells.resize(jobs.size());
  std::vector<char> reused(jobs.size(), 0);
  std::mutex log_mu;
  ParallelFor(jobs.size(), opts.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const fs::path dir = out / job.plan->label / std::to_string(job.seed);
    const fs::path cell_file = dir / "cell.json";
    if (!opts.force && IsComplete(cell_file, hash)) {
      outcome.cells[i] = CellFromJson(*ReadJsonFile(cell_file));
      reused[i] = 1;
      return;
    }
    if (opts.force && fs::exists(dir)) fs::remove_all(dir);
    const auto t0 = std::chrono::steady_clock::now();
    ConditionOptions copts{dir, hash, 1};
    const ConditionResult r = RunCondition(*job.plan, job.seed, eval, cfg.env, copts);
    outcome.cells[i] = Summarize(r);
    detail::WriteJson(cell_file, CellJson(outcome.cells[i], hash, r.total_iterations));
    if (log) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::ostringstream line;
      line << "cell " << job.plan->label << "/" << job.seed << ": final success "
           << r.final_report.success_ratio << " (" << secs << " s)";
      std::lock_guard lock(log_mu);
      log(line.str());
    }
  });
  for (char r : reused) (r ? outcome.cells_reused : outcome.cells_run)++;

  json summary = {{"config_hash", HashHex(hash)}, {"status", "complete"}};
  std::set<std::string> distinct(opts.plans.begin(), opts.plans.end());
  if (distinct.size() >= 2) {
    outcome.summary = Compare(outcome.cells);
    summary.update(SummaryJson(*outcome.summary));
  } else {
    summary["eval_seed"] = eval.seed;
    summary["verdicts"] = json::object();
  }
  detail::WriteJson(out / "summary.json", summary);
  return outcome;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_EXPERIMENT_HPP_
