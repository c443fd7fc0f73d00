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

#ifndef CORRECTIVE_IL_HARNESS_HPP_
#define CORRECTIVE_IL_HARNESS_HPP_

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrective_il/artifacts.hpp"
#include "corrective_il/dapg.hpp"
#include "corrective_il/demo.hpp"
#include "corrective_il/demo_io.hpp"
#include "corrective_il/env.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/parallel.hpp"
#include "corrective_il/rng.hpp"

namespace corrective_il {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kEvalSetSize = 1000;

// Fixed held-out tasks from the full operating space. Ids start at
// kEvalIdBase so training code can recognise and refuse them.
struct EvalSet {
  std::vector<TaskInstance> tasks;
  std::uint64_t seed = 0;

  bool operator==(const EvalSet&) const = default;
};

inline EvalSet BuildEvalSet(std::uint64_t seed, const EnvConfig& env = {}) {
  EvalSet set;
  set.seed = seed;
  Rng rng = MakeRng(DeriveSeed(seed, "eval-set"));
  set.tasks.reserve(kEvalSetSize);
  for (int i = 0; i < kEvalSetSize; ++i) {
    set.tasks.push_back(SampleTask(Region::kFull, rng, kEvalIdBase + i, env));
  }
  return set;
}

struct TaskOutcome {
  TaskInstance task;
  bool success = false;
  double final_distance = 0;

  bool operator==(const TaskOutcome&) const = default;
};

struct EvalReport {
  std::string checkpoint_id;
  std::uint64_t eval_seed = 0;
  std::vector<TaskOutcome> outcomes;
  double success_ratio = 0;  // successes / number of tasks

  bool operator==(const EvalReport&) const = default;
};

// Deterministic rollouts with the policy mean on every task.
template <typename Policy>
EvalReport Evaluate(const Policy& policy, const std::vector<TaskInstance>& tasks,
                    const EnvConfig& env, std::string checkpoint_id = {},
                    std::uint64_t eval_seed = 0, int threads = 1) {
  EvalReport report;
  report.checkpoint_id = std::move(checkpoint_id);
  report.eval_seed = eval_seed;
  report.outcomes.resize(tasks.size());
  ParallelFor(tasks.size(), threads, [&](std::size_t i) {
    EnvState s = Reset(tasks[i], env);
    while (!IsDone(s, env)) {
      const Eigen::VectorXd u = policy.MeanAction(Observe(s));
      s = Step(s, ToEnvAction(PolicyAction(u), env), env).next;
    }
    report.outcomes[i] = {tasks[i], IsSuccess(s, env), BallGoalDistance(s)};
  });
  int wins = 0;
  for (const auto& o : report.outcomes) wins += o.success ? 1 : 0;
  report.success_ratio =
      tasks.empty() ? 0.0 : static_cast<double>(wins) / static_cast<double>(tasks.size());
  return report;
}

template <typename Policy>
EvalReport Evaluate(const Policy& policy, const EvalSet& set, const EnvConfig& env,
                    std::string checkpoint_id = {}, int threads = 1) {
  return Evaluate(policy, set.tasks, env, std::move(checkpoint_id), set.seed, threads);
}

// Distance at which a failed rollout's score bottoms out at 0.
inline constexpr double kFailureDistanceNorm = 0.5;

struct FailureCase {
  TaskInstance task;
  double score = 0;  // 1 on success, else 1 - min(1, distance / d_norm)
};

inline double FailureScore(const TaskOutcome& o, double d_norm = kFailureDistanceNorm) {
  if (o.success) return 1.0;
  return 1.0 - std::min(1.0, o.final_distance / d_norm);
}

// The n lowest-scoring tasks, ordered by (score, task_id) ascending.
inline std::vector<FailureCase> TriageFailures(const EvalReport& report, std::size_t n) {
  if (n > report.outcomes.size()) {
    throw ContractError("triage: n exceeds the number of evaluated tasks");
  }
  std::vector<FailureCase> cases;
  cases.reserve(report.outcomes.size());
  for (const auto& o : report.outcomes) cases.push_back({o.task, FailureScore(o)});
  std::partial_sort(cases.begin(), cases.begin() + static_cast<std::ptrdiff_t>(n), cases.end(),
                    [](const FailureCase& a, const FailureCase& b) {
                      if (a.score != b.score) return a.score < b.score;
                      return a.task.task_id < b.task.task_id;
                    });
  cases.resize(n);
  return cases;
}

// --- Experiment plans ------------------------------------------------------

struct PlanCounts {
  int restrictive_original = 0;
  int full_random = 0;
  int full_corrective = 0;

  int total() const { return restrictive_original + full_random + full_corrective; }
  bool operator==(const PlanCounts&) const = default;
};

inline constexpr int kPlanDemoTotal = 30;
inline constexpr std::array<std::string_view, 5> kPlanLabels = {
    "30-O", "10-O+20-R", "10-O+20-C", "20-O+10-R", "20-O+10-C"};

// Demo sources for each named policy.
inline PlanCounts CountsForLabel(std::string_view label) {
  if (label == "30-O") return {30, 0, 0};
  if (label == "10-O+20-R") return {10, 20, 0};
  if (label == "10-O+20-C") return {10, 0, 20};
  if (label == "20-O+10-R") return {20, 10, 0};
  if (label == "20-O+10-C") return {20, 0, 10};
  throw ValidationError("unknown plan '" + std::string(label) + "'");
}

struct ExperimentPlan {
  std::string label;
  PlanCounts counts;
  TrainConfig train;
  std::vector<std::uint64_t> seeds;

  bool corrective() const { return counts.full_corrective > 0; }

  void Validate() const {
    if (counts.total() != kPlanDemoTotal) {
      throw ValidationError("plan " + label + " does not total " +
                            std::to_string(kPlanDemoTotal) + " demos");
    }
    if (counts != CountsForLabel(label)) {
      throw ValidationError("plan " + label + " counts disagree with its label");
    }
    if (counts.full_random > 0 && counts.full_corrective > 0) {
      throw ValidationError("plan mixes random and corrective demos");
    }
    train.Validate();
  }
};

inline ExperimentPlan MakePlan(std::string_view label, const TrainConfig& train,
                               std::vector<std::uint64_t> seeds = {}) {
  ExperimentPlan p{std::string(label), CountsForLabel(label), train, std::move(seeds)};
  p.Validate();
  return p;
}

// Task-id blocks for the demo pools of one cell; all below kEvalIdBase.
inline constexpr TaskId kOriginalIdBase = 0;
inline constexpr TaskId kRandomIdBase = 100'000;
inline constexpr TaskId kCorrectiveIdBase = 200'000;

inline DemoSet OriginalDemos(int count, std::uint64_t seed, const EnvConfig& env) {
  return GenerateOracleDemos(Region::kRestrictive, count, DeriveSeed(seed, "original-demos"),
                             kOriginalIdBase, env);
}

inline DemoSet RandomDemos(int count, std::uint64_t seed, const EnvConfig& env) {
  return GenerateOracleDemos(Region::kFull, count, DeriveSeed(seed, "random-demos"),
                             kRandomIdBase, env);
}

// Oracle demonstrations on copies of the triaged tasks. Each copy gets a
// fresh training id; corrective_of keeps the evaluation id it came from.
inline DemoSet CorrectiveDemos(const std::vector<FailureCase>& triaged, const EnvConfig& env) {
  DemoSet set;
  for (std::size_t j = 0; j < triaged.size(); ++j) {
    TaskInstance task = triaged[j].task;
    task.task_id = kCorrectiveIdBase + static_cast<TaskId>(j);
    Demonstration d = OracleDemo(task, env);
    d.corrective_of = triaged[j].task.task_id;
    set.demos.push_back(std::move(d));
  }
  set.label = MakeLabel(CountKinds(set.demos));
  return set;
}

struct CheckpointEval {
  int iteration = 0;
  double success_ratio = 0;

  bool operator==(const CheckpointEval&) const = default;
};

struct ConditionResult {
  std::string plan;
  std::uint64_t seed = 0;
  std::uint64_t eval_seed = 0;
  int total_iterations = 0;
  DemoSet final_demos;
  TrainLog final_log;
  std::vector<CheckpointEval> checkpoints;
  EvalReport final_report;
  // Condition A only.
  std::optional<TrainLog> pilot_log;
  std::optional<EvalReport> pilot_report;
  std::vector<FailureCase> triaged;
};

struct ConditionOptions {
  std::optional<fs::path> out_dir;  // runs/<plan>/<seed>
  std::uint64_t config_hash = 0;
  int threads = 1;
};

namespace detail {

inline void WriteReportCsv(const fs::path& path, const EvalReport& r, std::uint64_t hash) {
  std::ofstream out(path, std::ios::trunc);
  out << "# config_hash=" << HashHex(hash) << " eval_seed=" << r.eval_seed
      << " checkpoint=" << r.checkpoint_id << " success_ratio=" << std::setprecision(17)
      << r.success_ratio << "\n"
      << "task_id,ball_x,goal_x,goal_y,success,final_distance\n";
  for (const auto& o : r.outcomes) {
    out << o.task.task_id << ',' << o.task.ball_start.x() << ',' << o.task.goal.x() << ','
        << o.task.goal.y() << ',' << (o.success ? 1 : 0) << ',' << o.final_distance << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void MarkStage(const fs::path& stage_dir, std::string_view stage, std::string_view status,
                      std::uint64_t hash) {
  WriteJson(stage_dir / "stage.json",
            {{"stage", stage}, {"status", status}, {"config_hash", HashHex(hash)}});
}

}  // namespace detail

// Trains `train` on `demos` in the full space, evaluating every checkpoint on
// the evaluation set.
inline TrainResult TrainAndTrack(const TrainConfig& train, const DemoSet& demos,
                                 const EvalSet& eval, const EnvConfig& env,
                                 std::vector<CheckpointEval>* checkpoints,
                                 EvalReport* final_report, int threads) {
  TrainConfig cfg = train;
  cfg.threads = threads;
  const int last = cfg.iterations;
  auto on_checkpoint = [&](int it, const GaussianPolicy& policy) {
    if (!checkpoints && it != last) return;
    EvalReport r = Evaluate(policy, eval, env, "iter-" + std::to_string(it), threads);
    if (checkpoints) checkpoints->push_back({it, r.success_ratio});
    if (it == last && final_report) *final_report = std::move(r);
  };
  TrainResult result = Train(cfg, demos, Region::kFull, env, on_checkpoint);
  if (final_report && final_report->checkpoint_id.empty()) {
    *final_report = Evaluate(result.policy, eval, env, "iter-" + std::to_string(last), threads);
  }
  return result;
}

// One (plan, seed) cell.
//  Condition A (corrective): train pi0 on the original demos, evaluate it on
//  the evaluation set, triage the worst `full_corrective` tasks, record
//  oracle demos on them, merge, and retrain from scratch.
//  Condition B and 30-O: a single run on original (+ random) demos.
// All training happens in the full operating space.
inline ConditionResult RunCondition(const ExperimentPlan& plan, std::uint64_t seed,
                                    const EvalSet& eval, const EnvConfig& env,
                                    const ConditionOptions& opts = {}) {
  plan.Validate();
  ConditionResult result;
  result.plan = plan.label;
  result.seed = seed;
  result.eval_seed = eval.seed;

  const DemoSet original = OriginalDemos(plan.counts.restrictive_original, seed, env);
  TrainConfig final_cfg = plan.train;
  final_cfg.seed = DeriveSeed(seed, "final-train");

  std::optional<fs::path> stage1_dir;
  std::optional<fs::path> stage2_dir;
  if (opts.out_dir) {
    stage1_dir = *opts.out_dir / "stage1";
    fs::create_directories(*stage1_dir);
    detail::MarkStage(*stage1_dir, "stage1", "running", opts.config_hash);
  }

  DemoSet demos;
  if (plan.corrective()) {
    TrainConfig pilot_cfg = plan.train;
    pilot_cfg.seed = DeriveSeed(seed, "pilot-train");
    EvalReport pilot_report;
    TrainResult pilot =
        TrainAndTrack(pilot_cfg, original, eval, env, nullptr, &pilot_report, opts.threads);
    result.triaged =
        TriageFailures(pilot_report, static_cast<std::size_t>(plan.counts.full_corrective));
    const DemoSet corrective = CorrectiveDemos(result.triaged, env);
    demos = Merge(original, corrective, plan.label);
    result.pilot_log = pilot.log;
    result.pilot_report = pilot_report;
    if (stage1_dir) {
      SaveDemoSet(original, *stage1_dir / "demos", opts.config_hash);
      WriteTrainLogCsv(*stage1_dir / "trainlog.csv", pilot.log, opts.config_hash);
      SaveCheckpoint(*stage1_dir / "policy.ckpt", pilot.policy, opts.config_hash);
      detail::WriteReportCsv(*stage1_dir / "eval_final.csv", pilot_report, opts.config_hash);
      json triage = json::array();
      for (const auto& f : result.triaged) {
        triage.push_back({{"task", TaskToJson(f.task)}, {"score", f.score}});
      }
      detail::WriteJson(*stage1_dir / "triage.json",
                        {{"config_hash", HashHex(opts.config_hash)},
                         {"eval_seed", eval.seed},
                         {"tasks", triage}});
      detail::MarkStage(*stage1_dir, "stage1", "complete", opts.config_hash);
      stage2_dir = *opts.out_dir / "stage2";
      fs::create_directories(*stage2_dir);
      detail::MarkStage(*stage2_dir, "stage2", "running", opts.config_hash);
    }
    result.total_iterations += pilot_cfg.iterations;
  } else if (plan.counts.full_random > 0) {
    demos = Merge(original, RandomDemos(plan.counts.full_random, seed, env), plan.label);
  } else {
    demos = original;
    demos.label = plan.label;
    ValidateLabel(demos);
  }

  EvalReport final_report;
  TrainResult final_run =
      TrainAndTrack(final_cfg, demos, eval, env, &result.checkpoints, &final_report,
                    opts.threads);
  result.total_iterations += final_cfg.iterations;
  result.final_demos = std::move(demos);
  result.final_log = std::move(final_run.log);
  result.final_report = std::move(final_report);

  if (opts.out_dir) {
    const fs::path dir = stage2_dir ? *stage2_dir : *stage1_dir;
    SaveDemoSet(result.final_demos, dir / "demos", opts.config_hash);
    WriteTrainLogCsv(dir / "trainlog.csv", result.final_log, opts.config_hash);
    SaveCheckpoint(dir / "policy.ckpt", final_run.policy, opts.config_hash);
    detail::WriteReportCsv(dir / "eval_final.csv", result.final_report, opts.config_hash);
    detail::MarkStage(dir, stage2_dir ? "stage2" : "stage1", "complete", opts.config_hash);
  }
  return result;
}

// --- Comparison ------------------------------------------------------------

// Per-cell numbers needed for comparison and reporting.
struct CellSummary {
  std::string plan;
  std::uint64_t seed = 0;
  std::uint64_t eval_seed = 0;
  std::vector<CheckpointEval> checkpoints;

  bool operator==(const CellSummary&) const = default;
};

inline CellSummary Summarize(const ConditionResult& r) {
  return {r.plan, r.seed, r.eval_seed, r.checkpoints};
}

inline json CellJson(const CellSummary& c, std::uint64_t config_hash, int total_iterations) {
  json cps = json::array();
  for (const auto& cp : c.checkpoints) {
    cps.push_back({{"iteration", cp.iteration}, {"success_ratio", cp.success_ratio}});
  }
  return {{"plan", c.plan},
          {"seed", c.seed},
          {"eval_seed", c.eval_seed},
          {"config_hash", HashHex(config_hash)},
          {"total_iterations", total_iterations},
          {"status", "complete"},
          {"checkpoints", cps}};
}

inline CellSummary CellFromJson(const json& j) {
  CellSummary c;
  c.plan = j.at("plan").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.eval_seed = j.at("eval_seed").get<std::uint64_t>();
  for (const auto& cp : j.at("checkpoints")) {
    c.checkpoints.push_back({cp.at("iteration").get<int>(), cp.at("success_ratio").get<double>()});
  }
  return c;
}

// P(X >= wins) for X ~ Binomial(n, 1/2): the one-sided sign-test p-value.
inline double SignTestPValue(int wins, int n) {
  if (n <= 0) return 1.0;
  double p = 0;
  double binom = 1;  // C(n, 0)
  for (int i = 0; i <= n; ++i) {
    if (i >= wins) p += binom;
    binom = binom * (n - i) / (i + 1);
  }
  return p / std::pow(2.0, n);
}

struct CompareConfig {
  double alpha = 0.05;
  // Fewer paired seeds than this cannot reach significance at alpha with a
  // sign test; such comparisons fall back to a unanimous-direction rule.
  int min_seeds_for_test = 5;
  // Differences in mean success ratio within this margin count as equal.
  double equivalence_margin = 0.03;
};

struct PairVerdict {
  std::string a;
  std::string b;
  int checkpoint_index = 0;
  int wins = 0;
  int losses = 0;
  int ties = 0;
  double mean_diff = 0;  // mean over seeds of a - b
  double p_value = 1;
  std::string method;    // "sign-test" or "unanimous"
  std::string relation;  // "better", "worse", "equivalent", "inconclusive"

  bool operator==(const PairVerdict&) const = default;
};

struct PlanStats {
  std::vector<int> iterations;
  std::vector<double> mean;
  std::vector<double> sd;  // sample sd; 0 with one seed
  int n_seeds = 0;

  bool operator==(const PlanStats&) const = default;
};

struct Summary {
  std::uint64_t eval_seed = 0;
  std::map<std::string, PlanStats> plans;
  std::optional<PairVerdict> h2;   // 10-O+20-C vs 10-O+20-R, first checkpoint
  std::optional<PairVerdict> h3;   // 20-O+10-C vs 20-O+10-R, last checkpoint
  std::map<std::string, bool> dominates_30o;
  std::map<std::string, double> dominance_p_value;
  bool h2_supported = false;
  bool h3_supported = false;
  bool all_dominate_30o = false;

  bool operator==(const Summary&) const = default;
};

namespace detail {

inline std::map<std::uint64_t, const CellSummary*> BySeed(const std::vector<CellSummary>& cells,
                                                          std::string_view plan) {
  std::map<std::uint64_t, const CellSummary*> out;
  for (const auto& c : cells) {
    if (c.plan == plan) out[c.seed] = &c;
  }
  return out;
}

}  // namespace detail

// Paired comparison of plan a against plan b at checkpoint index idx (-1
// means the last checkpoint), over seeds present in both.
inline PairVerdict ComparePlans(const std::vector<CellSummary>& cells, std::string_view a,
                                std::string_view b, int idx, const CompareConfig& cfg = {}) {
  const auto sa = detail::BySeed(cells, a);
  const auto sb = detail::BySeed(cells, b);
  PairVerdict v;
  v.a = a;
  v.b = b;
  v.checkpoint_index = idx;
  int n = 0;
  for (const auto& [seed, ca] : sa) {
    auto it = sb.find(seed);
    if (it == sb.end()) continue;
    const CellSummary* cb = it->second;
    if (ca->checkpoints.empty() || ca->checkpoints.size() != cb->checkpoints.size()) {
      throw ValidationError("plans " + std::string(a) + " and " + std::string(b) +
                            " have mismatched checkpoints");
    }
    const std::size_t k = idx < 0 ? ca->checkpoints.size() - 1 : static_cast<std::size_t>(idx);
    if (k >= ca->checkpoints.size()) throw ValidationError("checkpoint index out of range");
    const double d = ca->checkpoints[k].success_ratio - cb->checkpoints[k].success_ratio;
    v.mean_diff += d;
    if (d > 0) ++v.wins;
    else if (d < 0) ++v.losses;
    else ++v.ties;
    ++n;
  }
  if (n == 0) {
    throw ValidationError("no common seeds for " + std::string(a) + " vs " + std::string(b));
  }
  v.mean_diff /= n;
  const int decided = v.wins + v.losses;
  v.p_value = SignTestPValue(v.wins, decided);
  const double p_rev = SignTestPValue(v.losses, decided);
  bool better;
  bool worse;
  if (n >= cfg.min_seeds_for_test) {
    v.method = "sign-test";
    better = decided > 0 && v.p_value <= cfg.alpha;
    worse = decided > 0 && p_rev <= cfg.alpha;
  } else {
    v.method = "unanimous";
    better = v.wins > 0 && v.losses == 0 && v.mean_diff > cfg.equivalence_margin;
    worse = v.losses > 0 && v.wins == 0 && -v.mean_diff > cfg.equivalence_margin;
  }
  if (better) v.relation = "better";
  else if (worse) v.relation = "worse";
  else if (std::abs(v.mean_diff) <= cfg.equivalence_margin) v.relation = "equivalent";
  else v.relation = "inconclusive";
  return v;
}

inline Summary Compare(const std::vector<CellSummary>& cells, const CompareConfig& cfg = {}) {
  if (cells.empty()) throw ValidationError("nothing to compare");
  Summary s;
  s.eval_seed = cells.front().eval_seed;
  for (const auto& c : cells) {
    if (c.eval_seed != s.eval_seed) {
      throw ValidationError("cells were evaluated on different evaluation sets (seeds " +
                            std::to_string(s.eval_seed) + " and " +
                            std::to_string(c.eval_seed) + ")");
    }
  }
  std::map<std::string, std::vector<const CellSummary*>> by_plan;
  for (const auto& c : cells) by_plan[c.plan].push_back(&c);
  if (by_plan.size() < 2) throw ValidationError("compare needs at least two plans");
  for (auto& [plan, list] : by_plan) {
    std::sort(list.begin(), list.end(),
              [](const CellSummary* x, const CellSummary* y) { return x->seed < y->seed; });
    PlanStats st;
    st.n_seeds = static_cast<int>(list.size());
    const std::size_t nk = list.front()->checkpoints.size();
    for (std::size_t k = 0; k < nk; ++k) {
      double sum = 0;
      for (const auto* c : list) {
        if (c->checkpoints.size() != nk) {
          throw ValidationError("plan " + plan + " has cells with different checkpoints");
        }
        sum += c->checkpoints[k].success_ratio;
      }
      const double mean = sum / st.n_seeds;
      double ss = 0;
      for (const auto* c : list) ss += std::pow(c->checkpoints[k].success_ratio - mean, 2);
      st.iterations.push_back(list.front()->checkpoints[k].iteration);
      st.mean.push_back(mean);
      st.sd.push_back(st.n_seeds > 1 ? std::sqrt(ss / (st.n_seeds - 1)) : 0.0);
    }
    s.plans[plan] = std::move(st);
  }
  if (s.plans.contains("10-O+20-C") && s.plans.contains("10-O+20-R")) {
    s.h2 = ComparePlans(cells, "10-O+20-C", "10-O+20-R", 0, cfg);
    s.h2_supported = s.h2->relation == "better";
  }
  if (s.plans.contains("20-O+10-C") && s.plans.contains("20-O+10-R")) {
    s.h3 = ComparePlans(cells, "20-O+10-C", "20-O+10-R", -1, cfg);
    s.h3_supported = s.h3->relation == "better";
  }
  if (s.plans.contains("30-O")) {
    const PlanStats& base = s.plans.at("30-O");
    s.all_dominate_30o = true;
    for (const auto& [plan, st] : s.plans) {
      if (plan == "30-O") continue;
      bool dom = st.mean.size() == base.mean.size();
      for (std::size_t k = 0; dom && k < st.mean.size(); ++k) dom = st.mean[k] >= base.mean[k];
      s.dominates_30o[plan] = dom;
      s.dominance_p_value[plan] = ComparePlans(cells, plan, "30-O", -1, cfg).p_value;
      s.all_dominate_30o = s.all_dominate_30o && dom;
    }
  }
  return s;
}

inline json VerdictJson(const PairVerdict& v) {
  return {{"a", v.a},           {"b", v.b},
          {"checkpoint_index", v.checkpoint_index},
          {"wins", v.wins},     {"losses", v.losses},
          {"ties", v.ties},     {"mean_diff", v.mean_diff},
          {"p_value", v.p_value}, {"method", v.method},
          {"relation", v.relation}};
}

inline json SummaryJson(const Summary& s) {
  json plans = json::object();
  for (const auto& [plan, st] : s.plans) {
    plans[plan] = {{"iterations", st.iterations},
                   {"mean", st.mean},
                   {"sd", st.sd},
                   {"n_seeds", st.n_seeds}};
  }
  json j = {{"eval_seed", s.eval_seed}, {"plans", plans}};
  json verdicts = json::object();
  if (s.h2) {
    verdicts["H2"] = VerdictJson(*s.h2);
    verdicts["H2"]["supported"] = s.h2_supported;
  }
  if (s.h3) {
    verdicts["H3"] = VerdictJson(*s.h3);
    verdicts["H3"]["supported"] = s.h3_supported;
  }
  if (!s.dominates_30o.empty()) {
    verdicts["dominates_30-O"] = {{"per_plan", s.dominates_30o},
                                  {"final_p_value", s.dominance_p_value},
                                  {"all", s.all_dominate_30o}};
  }
  j["verdicts"] = verdicts;
  return j;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_HARNESS_HPP_
