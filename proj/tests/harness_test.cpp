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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "corrective_il/harness.hpp"
#include "test_util.hpp"

namespace corrective_il {
namespace {

TEST(EvalSet, HasExactlyOneThousandHeldOutFullSpaceTasks) {
  const EvalSet set = BuildEvalSet(2022);
  ASSERT_EQ(set.tasks.size(), 1000u);
  EnvConfig env;
  for (std::size_t i = 0; i < set.tasks.size(); ++i) {
    EXPECT_EQ(set.tasks[i].task_id, kEvalIdBase + static_cast<TaskId>(i));
    EXPECT_EQ(set.tasks[i].region, Region::kFull);
    EXPECT_NO_THROW(ValidateTask(set.tasks[i], env));
  }
}

TEST(EvalSet, RegeneratesIdentically) {
  EXPECT_EQ(BuildEvalSet(2022), BuildEvalSet(2022));
  EXPECT_NE(BuildEvalSet(2022), BuildEvalSet(2023));
}

TEST(Evaluate, IsDeterministicAndThreadIndependent) {
  EnvConfig env;
  const EvalSet set = BuildEvalSet(5);
  const OraclePolicy oracle{env, {}};
  const EvalReport a = Evaluate(oracle, set, env, "x", 1);
  const EvalReport b = Evaluate(oracle, set, env, "x", 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.success_ratio, 1.0);
  const EvalReport none = Evaluate(NoOpPolicy{}, set, env);
  EXPECT_EQ(none.success_ratio, 0.0);
  for (std::size_t i = 0; i < none.outcomes.size(); ++i) {
    EXPECT_DOUBLE_EQ(none.outcomes[i].final_distance,
                     (set.tasks[i].ball_start - set.tasks[i].goal).norm());
  }
}

EvalReport RandomReport(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 0.8);
  std::bernoulli_distribution win(0.4);
  std::uniform_int_distribution<int> coarse(0, 4);
  EvalReport r;
  for (int i = 0; i < n; ++i) {
    TaskOutcome o;
    o.task.task_id = kEvalIdBase + (i * 7919) % n;  // ids not in index order
    o.success = win(rng);
    // Coarse distances force ties, both below and beyond the saturation point.
    o.final_distance = coarse(rng) == 0 ? 0.1 * coarse(rng) + 0.3 : dist(rng);
    r.outcomes.push_back(o);
  }
  return r;
}

TEST(Triage, MatchesBruteForceSortOnRandomReports) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 60;
    const EvalReport report = RandomReport(rng, n);
    const std::size_t k = static_cast<std::size_t>(trial % (n + 1));

    // Oracle: score every task independently and fully sort.
    std::vector<std::pair<double, TaskId>> all;
    for (const auto& o : report.outcomes) {
      const double score = o.success ? 1.0 : std::max(0.0, 1.0 - o.final_distance / 0.5);
      all.emplace_back(score, o.task.task_id);
    }
    std::sort(all.begin(), all.end());

    const auto got = TriageFailures(report, k);
    ASSERT_EQ(got.size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(got[i].task.task_id, all[i].second);
      EXPECT_DOUBLE_EQ(got[i].score, all[i].first);
    }
  }
}

TEST(Triage, SuccessesScoreOneAndDistancesSaturate) {
  EXPECT_EQ(FailureScore({{}, true, 10.0}), 1.0);
  EXPECT_EQ(FailureScore({{}, false, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(FailureScore({{}, false, 0.25}), 0.5);
  EXPECT_EQ(FailureScore({{}, false, 0.5}), 0.0);
  EXPECT_EQ(FailureScore({{}, false, 3.0}), 0.0);
}

TEST(Triage, RejectsOversizedRequests) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(TriageFailures(RandomReport(rng, 3), 4), ContractError);
}

TEST(Plans, DemoCountsMatchTheSourceTable) {
  const std::map<std::string, PlanCounts> table = {
      {"30-O", {30, 0, 0}},       {"10-O+20-R", {10, 20, 0}}, {"10-O+20-C", {10, 0, 20}},
      {"20-O+10-R", {20, 10, 0}}, {"20-O+10-C", {20, 0, 10}},
  };
  ASSERT_EQ(kPlanLabels.size(), table.size());
  for (auto label : kPlanLabels) {
    const ExperimentPlan plan = MakePlan(label, TrainConfig{});
    EXPECT_EQ(plan.counts, table.at(std::string(label))) << label;
    EXPECT_EQ(plan.counts.total(), 30);
    const KindCounts parsed = ParseLabel(label);
    EXPECT_EQ(parsed.contains('O') ? parsed.at('O') : 0, plan.counts.restrictive_original);
    EXPECT_EQ(parsed.contains('R') ? parsed.at('R') : 0, plan.counts.full_random);
    EXPECT_EQ(parsed.contains('C') ? parsed.at('C') : 0, plan.counts.full_corrective);
  }
  EXPECT_THROW(MakePlan("10-O+10-R", TrainConfig{}), ValidationError);
}

TEST(Plans, NonCorrectiveDemoPoolsHaveTheirLabelledSizes) {
  EnvConfig env;
  EXPECT_EQ(OriginalDemos(10, 1, env).label, "10-O");
  EXPECT_EQ(RandomDemos(20, 1, env).label, "20-R");
  EXPECT_EQ(Merge(OriginalDemos(10, 1, env), RandomDemos(20, 1, env), "10-O+20-R").demos.size(),
            30u);
}

TEST(Plans, CorrectiveDemosPointBackAtTriagedTasks) {
  EnvConfig env;
  const EvalSet set = BuildEvalSet(3);
  const EvalReport report = Evaluate(NoOpPolicy{}, set, env);
  const auto triaged = TriageFailures(report, 20);
  const DemoSet c = CorrectiveDemos(triaged, env);
  EXPECT_EQ(c.label, "20-C");
  std::set<TaskId> ids;
  for (std::size_t i = 0; i < c.demos.size(); ++i) {
    EXPECT_EQ(*c.demos[i].corrective_of, triaged[i].task.task_id);
    EXPECT_LT(c.demos[i].task.task_id, kEvalIdBase);
    EXPECT_EQ(c.demos[i].task.ball_start, triaged[i].task.ball_start);
    EXPECT_EQ(c.demos[i].task.goal, triaged[i].task.goal);
    EXPECT_TRUE(c.demos[i].success);
    ids.insert(c.demos[i].task.task_id);
  }
  EXPECT_EQ(ids.size(), 20u);
}

TEST(RunCondition, CorrectivePlanProducesProvenanceAndArtifacts) {
  TrainConfig train;
  train.iterations = 2;
  train.rollouts_per_iter = 4;
  train.bc_epochs = 1;
  train.arch.hidden = {8};
  train.baseline.hidden = {8};
  EnvConfig env;
  EvalSet eval = BuildEvalSet(7);
  eval.tasks.resize(50);
  test::TempDir dir;
  const ConditionResult r =
      RunCondition(MakePlan("10-O+20-C", train), 1, eval, env, {dir.path(), 42, 1});
  EXPECT_EQ(r.final_demos.label, "10-O+20-C");
  EXPECT_EQ(r.total_iterations, 4);
  ASSERT_TRUE(r.pilot_report);
  std::set<TaskId> triaged;
  for (const auto& f : r.triaged) triaged.insert(f.task.task_id);
  for (const auto& d : r.final_demos.demos) {
    if (d.corrective_of) EXPECT_TRUE(triaged.contains(*d.corrective_of));
  }
  for (const char* f : {"stage1/triage.json", "stage1/policy.ckpt", "stage1/demos/demos.jsonl",
                        "stage2/policy.ckpt", "stage2/demos/manifest.json",
                        "stage2/eval_final.csv", "stage2/trainlog.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  }
  EXPECT_EQ(LoadDemoSet(dir.path() / "stage2" / "demos"), r.final_demos);
}

TEST(RunCondition, IsReproducible) {
  TrainConfig train;
  train.iterations = 2;
  train.rollouts_per_iter = 4;
  train.bc_epochs = 1;
  train.arch.hidden = {8};
  train.baseline.hidden = {8};
  EnvConfig env;
  EvalSet eval = BuildEvalSet(7);
  eval.tasks.resize(30);
  const auto a = RunCondition(MakePlan("20-O+10-R", train), 4, eval, env);
  const auto b = RunCondition(MakePlan("20-O+10-R", train), 4, eval, env, {std::nullopt, 0, 2});
  EXPECT_EQ(Summarize(a), Summarize(b));
  EXPECT_EQ(a.final_log, b.final_log);
}

// --- Statistics -------------------------------------------------------------

TEST(SignTest, MatchesBinomialTail) {
  EXPECT_DOUBLE_EQ(SignTestPValue(5, 5), 1.0 / 32);
  EXPECT_DOUBLE_EQ(SignTestPValue(4, 5), 6.0 / 32);
  EXPECT_DOUBLE_EQ(SignTestPValue(0, 5), 1.0);
  EXPECT_DOUBLE_EQ(SignTestPValue(8, 10), 56.0 / 1024);
  EXPECT_DOUBLE_EQ(SignTestPValue(0, 0), 1.0);
  for (int n = 1; n < 20; ++n) {
    for (int w = 1; w <= n; ++w) EXPECT_LT(SignTestPValue(w, n), SignTestPValue(w - 1, n));
  }
}

std::vector<CellSummary> CellsFromTable(
    const std::map<std::string, std::vector<std::vector<double>>>& table,
    const std::vector<int>& iterations, std::uint64_t eval_seed = 1) {
  std::vector<CellSummary> cells;
  for (const auto& [plan, per_seed] : table) {
    for (std::size_t s = 0; s < per_seed.size(); ++s) {
      CellSummary c{plan, s + 1, eval_seed, {}};
      for (std::size_t k = 0; k < iterations.size(); ++k) {
        c.checkpoints.push_back({iterations[k], per_seed[s][k]});
      }
      cells.push_back(c);
    }
  }
  return cells;
}

TEST(Compare, ReachesTheExpectedVerdictsOnThePublishedTable) {
  // Published success ratios (one aggregate per plan) at 200/400/600/800
  // iterations.
  const auto cells = CellsFromTable(
      {{"30-O", {{0.011, 0.212, 0.726, 0.880}}},
       {"10-O+20-R", {{0.070, 0.360, 0.756, 0.939}}},
       {"10-O+20-C", {{0.666, 0.927, 0.979, 0.993}}},
       {"20-O+10-R", {{0.032, 0.594, 0.960, 0.992}}},
       {"20-O+10-C", {{0.027, 0.558, 0.984, 1.000}}}},
      {200, 400, 600, 800});
  const Summary s = Compare(cells);
  EXPECT_TRUE(s.h2_supported);
  EXPECT_EQ(s.h2->relation, "better");
  EXPECT_FALSE(s.h3_supported);
  EXPECT_EQ(s.h3->relation, "equivalent");
  EXPECT_TRUE(s.all_dominate_30o);
  EXPECT_EQ(s.plans.at("30-O").iterations, (std::vector<int>{200, 400, 600, 800}));
}

TEST(Compare, IdenticalPlansAreEquivalent) {
  const std::vector<std::vector<double>> seeds = {
      {0.1, 0.5}, {0.2, 0.6}, {0.3, 0.7}, {0.4, 0.8}, {0.5, 0.9}};
  const auto cells = CellsFromTable({{"10-O+20-C", seeds}, {"10-O+20-R", seeds}}, {10, 20});
  const Summary s = Compare(cells);
  EXPECT_EQ(s.h2->relation, "equivalent");
  EXPECT_EQ(s.h2->ties, 5);
  EXPECT_FALSE(s.h2_supported);
}

TEST(Compare, SignTestNeedsFourOfFiveAtTheFivePercentLevel) {
  // 5/5 wins: p = 1/32 supports; 4/5 wins: p = 6/32 does not.
  const auto five = CellsFromTable({{"10-O+20-C", {{.9}, {.9}, {.9}, {.9}, {.9}}},
                                    {"10-O+20-R", {{.5}, {.5}, {.5}, {.5}, {.5}}}},
                                   {10});
  EXPECT_EQ(Compare(five).h2->method, "sign-test");
  EXPECT_TRUE(Compare(five).h2_supported);
  const auto four = CellsFromTable({{"10-O+20-C", {{.9}, {.9}, {.9}, {.9}, {.1}}},
                                    {"10-O+20-R", {{.5}, {.5}, {.5}, {.5}, {.5}}}},
                                   {10});
  EXPECT_EQ(Compare(four).h2->wins, 4);
  EXPECT_NEAR(Compare(four).h2->p_value, 6.0 / 32, 1e-15);
  EXPECT_FALSE(Compare(four).h2_supported);
}

TEST(Compare, MeanAndSampleSdPerCheckpoint) {
  const auto cells = CellsFromTable({{"30-O", {{0.2}, {0.4}, {0.9}}}, {"10-O+20-R", {{1}, {1}, {1}}}},
                                    {5});
  const Summary s = Compare(cells);
  EXPECT_NEAR(s.plans.at("30-O").mean[0], 0.5, 1e-15);
  EXPECT_NEAR(s.plans.at("30-O").sd[0], std::sqrt((0.09 + 0.01 + 0.16) / 2), 1e-15);
  EXPECT_EQ(s.plans.at("30-O").n_seeds, 3);
  EXPECT_TRUE(s.dominates_30o.at("10-O+20-R"));
}

TEST(Compare, RejectsMismatchedEvalSetsAndSinglePlans) {
  auto cells = CellsFromTable({{"30-O", {{0.2}}}, {"10-O+20-R", {{0.3}}}}, {5});
  cells[1].eval_seed = 99;
  EXPECT_THROW(Compare(cells), ValidationError);
  EXPECT_THROW(Compare(CellsFromTable({{"30-O", {{0.2}}}}, {5})), ValidationError);
  EXPECT_THROW(Compare({}), ValidationError);
}

TEST(Compare, IsAPureFunctionWithStableOutput) {
  const auto cells = CellsFromTable({{"30-O", {{0.2, 0.3}, {0.25, 0.35}}},
                                     {"10-O+20-C", {{0.6, 0.9}, {0.7, 0.95}}},
                                     {"10-O+20-R", {{0.4, 0.9}, {0.45, 0.9}}}},
                                    {1, 2});
  auto shuffled = cells;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(SummaryJson(Compare(cells)).dump(), SummaryJson(Compare(cells)).dump());
  EXPECT_EQ(SummaryJson(Compare(cells)).dump(), SummaryJson(Compare(shuffled)).dump());
}

TEST(CellJson, RoundTrips) {
  const CellSummary c{"10-O+20-C", 3, 2022, {{38, 0.25}, {150, 0.875}}};
  const json j = CellJson(c, 0xfeed, 300);
  EXPECT_EQ(CellFromJson(j), c);
  EXPECT_EQ(j.at("config_hash"), HashHex(0xfeed));
  EXPECT_EQ(j.at("status"), "complete");
}

}  // namespace
}  // namespace corrective_il
