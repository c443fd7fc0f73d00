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

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "corrective_il/demo.hpp"
#include "corrective_il/demo_io.hpp"
#include "test_util.hpp"

namespace corrective_il {
namespace {

TEST(Oracle, SolvesEveryRegion) {
  EnvConfig cfg;
  for (Region r : {Region::kRestrictive, Region::kFull, Region::kFullExtension}) {
    Rng rng = MakeRng(17);
    for (int i = 0; i < 500; ++i) {
      const Demonstration d = OracleDemo(SampleTask(r, rng, i, cfg), cfg);
      EXPECT_TRUE(d.success);
      EXPECT_LT(static_cast<int>(d.steps.size()), cfg.horizon);
    }
  }
}

TEST(Oracle, SolvesTasksWithoutWalls) {
  EnvConfig cfg;
  cfg.wall_height = 0.0;
  Rng rng = MakeRng(4);
  for (int i = 0; i < 200; ++i) {
    EXPECT_TRUE(OracleDemo(SampleTask(Region::kFull, rng, i, cfg), cfg).success);
  }
}

TEST(Oracle, CrossesWallsAboveTheirTop) {
  EnvConfig cfg;
  TaskInstance task;
  task.ball_start = {0.22, 0.0};
  task.goal = {-0.02, 0.2};
  task.region = Region::kFullExtension;
  const Demonstration d = OracleDemo(task, cfg);
  EnvState s = Reset(task, cfg);
  for (const auto& step : d.steps) {
    const EnvState next = Step(s, ToEnvAction(step.act, cfg), cfg).next;
    // No step is ever stopped by a wall.
    EXPECT_FALSE(WallBlocks(s.gripper_pos, s.gripper_pos + ToEnvAction(step.act, cfg).d_gripper,
                            cfg));
    s = next;
  }
  EXPECT_TRUE(IsSuccess(s, cfg));
}

TEST(Oracle, IsDeterministic) {
  EnvConfig cfg;
  Rng rng = MakeRng(3);
  const TaskInstance t = SampleTask(Region::kFull, rng, 0, cfg);
  EXPECT_EQ(OracleDemo(t, cfg), OracleDemo(t, cfg));
}

TEST(Oracle, StoredObservationsReplay) {
  EnvConfig cfg;
  Rng rng = MakeRng(8);
  for (int i = 0; i < 50; ++i) {
    const Demonstration d = OracleDemo(SampleTask(Region::kFull, rng, i, cfg), cfg);
    EnvState s = Reset(d.task, cfg);
    for (const auto& step : d.steps) {
      ASSERT_EQ(Observe(s), step.obs);
      s = Step(s, ToEnvAction(step.act, cfg), cfg).next;
    }
    EXPECT_EQ(IsSuccess(s, cfg), d.success);
  }
}

TEST(Oracle, ActionsStayInPolicyUnits) {
  EnvConfig cfg;
  const DemoSet set = GenerateOracleDemos(Region::kFull, 20, 5, 0, cfg);
  for (const auto& d : set.demos) {
    for (const auto& s : d.steps) EXPECT_LE(s.act.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Labels, ParseAndFormat) {
  EXPECT_EQ(ParseLabel("10-O+20-C"), (KindCounts{{'O', 10}, {'C', 20}}));
  EXPECT_EQ(ParseLabel("30-O"), (KindCounts{{'O', 30}}));
  EXPECT_TRUE(ParseLabel("").empty());
  EXPECT_EQ(MakeLabel({{'C', 20}, {'O', 10}}), "10-O+20-C");
  EXPECT_EQ(MakeLabel({{'O', 0}, {'R', 3}}), "3-R");
  for (const char* bad : {"10", "10-X", "-O", "10-O+", "10-O+5-O", "1O-O", "10-OO", "+10-O"}) {
    EXPECT_THROW(ParseLabel(bad), ValidationError) << bad;
  }
}

TEST(Labels, KindsFollowProvenance) {
  Demonstration d;
  d.task.region = Region::kRestrictive;
  EXPECT_EQ(KindOf(d), DemoKind::kOriginal);
  d.task.region = Region::kFull;
  EXPECT_EQ(KindOf(d), DemoKind::kRandom);
  d.corrective_of = kEvalIdBase + 3;
  EXPECT_EQ(KindOf(d), DemoKind::kCorrective);
}

TEST(Labels, GeneratedSetsAreLabelledByContent) {
  EnvConfig cfg;
  EXPECT_EQ(GenerateOracleDemos(Region::kRestrictive, 7, 1, 0, cfg).label, "7-O");
  EXPECT_EQ(GenerateOracleDemos(Region::kFull, 4, 1, 0, cfg).label, "4-R");
  DemoSet empty;
  EXPECT_NO_THROW(ValidateLabel(empty));
  DemoSet wrong = GenerateOracleDemos(Region::kRestrictive, 3, 1, 0, cfg);
  wrong.label = "4-O";
  EXPECT_THROW(ValidateLabel(wrong), ValidationError);
}

TEST(Merge, CombinesAndRelabels) {
  EnvConfig cfg;
  const DemoSet o = GenerateOracleDemos(Region::kRestrictive, 10, 1, 0, cfg);
  const DemoSet r = GenerateOracleDemos(Region::kFull, 20, 2, 100, cfg);
  const DemoSet m = Merge(o, r, "10-O+20-R");
  EXPECT_EQ(m.demos.size(), 30u);
  EXPECT_THROW(Merge(o, r, "10-O+20-C"), ValidationError);
}

TEST(Merge, RejectsDuplicateTasks) {
  EnvConfig cfg;
  const DemoSet a = GenerateOracleDemos(Region::kRestrictive, 3, 1, 0, cfg);
  const DemoSet b = GenerateOracleDemos(Region::kRestrictive, 3, 2, 2, cfg);
  EXPECT_THROW(Merge(a, b, "6-O"), ValidationError);
  EXPECT_NO_THROW(Merge(a, b, "6-O", /*allow_duplicates=*/true));
}

TEST(Degrade, ZeroNoiseIsIdentityOnStepsAndSuccess) {
  EnvConfig cfg;
  const DemoSet set = GenerateOracleDemos(Region::kFull, 10, 3, 0, cfg);
  SensorNoiseConfig none;
  ASSERT_TRUE(none.IsIdentity());
  for (const auto& d : set.demos) {
    const Demonstration g = Degrade(d, none, cfg);
    EXPECT_EQ(g.steps, d.steps);
    EXPECT_EQ(g.success, d.success);
    EXPECT_EQ(g.source, DemoSource::kDegraded);
  }
}

TEST(Degrade, DropsCouplesAndJittersActionsOnly) {
  EnvConfig cfg;
  const Demonstration d = GenerateOracleDemos(Region::kFull, 1, 3, 0, cfg).demos[0];
  SensorNoiseConfig drop;
  drop.dropped_dims = {2};
  const Demonstration dropped = Degrade(d, drop, cfg);
  SensorNoiseConfig couple;
  couple.coupling_groups = {{0, 1}};
  const Demonstration coupled = Degrade(d, couple, cfg);
  SensorNoiseConfig jitter;
  jitter.jitter_std = 0.1;
  jitter.seed = 4;
  const Demonstration jittered = Degrade(d, jitter, cfg);
  for (std::size_t t = 0; t < d.steps.size(); ++t) {
    EXPECT_EQ(dropped.steps[t].act(2), 0.0);
    EXPECT_EQ(dropped.steps[t].act.head<2>(), d.steps[t].act.head<2>());
    EXPECT_EQ(coupled.steps[t].act(0), coupled.steps[t].act(1));
    EXPECT_DOUBLE_EQ(coupled.steps[t].act(0), 0.5 * (d.steps[t].act(0) + d.steps[t].act(1)));
    EXPECT_NE(jittered.steps[t].act, d.steps[t].act);
    EXPECT_EQ(dropped.steps[t].obs, d.steps[t].obs);
    EXPECT_EQ(jittered.steps[t].obs, d.steps[t].obs);
  }
  // Dropping the grip channel means the replayed hand never closes.
  EXPECT_FALSE(dropped.success);
  EXPECT_EQ(Degrade(d, jitter, cfg), jittered);
}

TEST(Degrade, RecomputesSuccessByReplay) {
  EnvConfig cfg;
  const DemoSet set = GenerateOracleDemos(Region::kFull, 30, 9, 0, cfg);
  SensorNoiseConfig noise;
  noise.jitter_std = 0.5;
  noise.seed = 1;
  for (const auto& d : set.demos) {
    const Demonstration g = Degrade(d, noise, cfg);
    EXPECT_EQ(g.success, IsSuccess(Replay(g.task, g.steps, cfg), cfg));
  }
}

TEST(Degrade, RejectsNonOracleInputAndBadConfig) {
  EnvConfig cfg;
  Demonstration d = GenerateOracleDemos(Region::kFull, 1, 3, 0, cfg).demos[0];
  SensorNoiseConfig noise;
  noise.jitter_std = 0.1;
  const Demonstration once = Degrade(d, noise, cfg);
  EXPECT_THROW(Degrade(once, noise, cfg), ContractError);
  SensorNoiseConfig bad;
  bad.dropped_dims = {1};
  bad.coupling_groups = {{0, 1}};
  EXPECT_THROW(Degrade(d, bad, cfg), ValidationError);
  bad = {};
  bad.jitter_std = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Degrade(d, bad, cfg), ValidationError);
}

// --- JSONL corpus ---

TEST(DemoIo, RoundTripIsIdentity) {
  EnvConfig cfg;
  test::TempDir dir;
  DemoSet set = Merge(GenerateOracleDemos(Region::kRestrictive, 5, 1, 0, cfg),
                      GenerateOracleDemos(Region::kFull, 5, 2, 100, cfg), "5-O+5-R");
  set.demos[7].corrective_of = kEvalIdBase + 42;
  set.demos[7].source = DemoSource::kHuman;
  set.label = MakeLabel(CountKinds(set.demos));
  set.seed = 77;
  SaveDemoSet(set, dir.path(), 0xabcdef);
  EXPECT_EQ(LoadDemoSet(dir.path()), set);
}

TEST(DemoIo, RandomDemosRoundTripBitwise) {
  // Property: arbitrary doubles survive the text format exactly.
  test::TempDir dir;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  DemoSet set;
  for (int i = 0; i < 20; ++i) {
    Demonstration d;
    d.task.task_id = i;
    d.task.region = Region::kFull;
    d.task.ball_start = {u(rng) * 1e-4, 0.0};
    d.task.goal = {u(rng), std::ldexp(u(rng), -40)};
    for (int t = 0; t < 5; ++t) {
      DemoStep s;
      for (int k = 0; k < kObsDim; ++k) s.obs(k) = u(rng) / 7.0;
      for (int k = 0; k < kActDim; ++k) s.act(k) = std::ldexp(u(rng), -(t * 60));
      d.steps.push_back(s);
    }
    set.demos.push_back(d);
  }
  set.label = MakeLabel(CountKinds(set.demos));
  SaveDemoSet(set, dir.path());
  EXPECT_EQ(LoadDemoSet(dir.path()), set);
}

TEST(DemoIo, MalformedLineReportsItsNumber) {
  EnvConfig cfg;
  test::TempDir dir;
  SaveDemoSet(GenerateOracleDemos(Region::kRestrictive, 3, 1, 0, cfg), dir.path());
  {
    std::ofstream out(dir.path() / kDemosFile, std::ios::app);
    out << "{\"task\": 1}\n";
  }
  try {
    LoadDemoSet(dir.path());
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(DemoIo, ManifestCountsMustMatch) {
  EnvConfig cfg;
  test::TempDir dir;
  const DemoSet set = GenerateOracleDemos(Region::kRestrictive, 3, 1, 0, cfg);
  SaveDemoSet(set, dir.path());
  {
    std::ofstream out(dir.path() / kDemosFile, std::ios::app);
    Rng rng = MakeRng(2);
    out << DemoToJson(OracleDemo(SampleTask(Region::kRestrictive, rng, 50, cfg), cfg)).dump()
        << "\n";
  }
  EXPECT_THROW(LoadDemoSet(dir.path()), ValidationError);
}

TEST(DemoIo, MissingFilesAreValidationErrors) {
  test::TempDir dir;
  EXPECT_THROW(LoadDemoSet(dir.path() / "nope"), ValidationError);
}

TEST(DemoIo, AppendKeepsManifestInStep) {
  EnvConfig cfg;
  test::TempDir dir;
  const DemoSet o = GenerateOracleDemos(Region::kRestrictive, 2, 1, 0, cfg);
  for (const auto& d : o.demos) AppendDemo(dir.path(), d, 1, 0);
  Demonstration c = GenerateOracleDemos(Region::kFull, 1, 2, 10, cfg).demos[0];
  c.corrective_of = kEvalIdBase;
  AppendDemo(dir.path(), c, 1, 0);
  const DemoSet loaded = LoadDemoSet(dir.path());
  EXPECT_EQ(loaded.label, "2-O+1-C");
  EXPECT_EQ(loaded.demos.size(), 3u);
  EXPECT_EQ(loaded.demos.back(), c);
}

}  // namespace
}  // namespace corrective_il
