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

#include <fstream>

#include <gtest/gtest.h>

#include "corrective_il/config.hpp"
#include "corrective_il/report.hpp"
#include "test_util.hpp"

namespace corrective_il {
namespace {

TEST(Config, CanonicalTextRoundTrips) {
  RunConfig cfg;
  cfg.env.goal_box.x = {-0.1, 0.1};
  cfg.env.wall_height = 1.0 / 30;
  cfg.train.iterations = 77;
  cfg.train.arch.hidden = {16, 8};
  cfg.train.checkpoint_fractions = {0.1, 0.3333333333333333, 1.0};
  cfg.noise.dropped_dims = {2};
  cfg.noise.coupling_groups = {{0, 1}};
  cfg.demos.region = Region::kRestrictive;
  cfg.experiment.plans = {"30-O", "10-O+20-C"};
  cfg.experiment.seeds = {3, 9};
  cfg.out_dir = "somewhere/else";
  const RunConfig back = ParseRunConfig(ConfigFileText(cfg));
  EXPECT_EQ(CanonicalText(back), CanonicalText(cfg));
  EXPECT_EQ(ConfigHash(back), ConfigHash(cfg));
  EXPECT_EQ(back.out_dir, "somewhere/else");
  EXPECT_EQ(back.env.wall_height, cfg.env.wall_height);
  EXPECT_EQ(back.noise.coupling_groups, cfg.noise.coupling_groups);
  EXPECT_EQ(back.train.checkpoint_fractions, cfg.train.checkpoint_fractions);
}

TEST(Config, EmptyTextGivesDefaults) {
  EXPECT_EQ(CanonicalText(ParseRunConfig("")), CanonicalText(RunConfig{}));
}

TEST(Config, HashTracksContentButNotOutputDir) {
  RunConfig a;
  RunConfig b = a;
  b.out_dir = "other";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.train.kl_step *= 2;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  RunConfig c = a;
  c.env.wall_height = 0.05;
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
}

TEST(Config, PartialFilesOverrideOnlyTheirKeys) {
  const RunConfig cfg = ParseRunConfig(
      "; comment\n[train]\niterations = 12\nhidden = 4, 4\n\n[experiment]\nseeds = 1,2\n"
      "plans = 30-O, 10-O+20-R\n[noise]\ncoupling_groups = 0+1\n");
  EXPECT_EQ(cfg.train.iterations, 12);
  EXPECT_EQ(cfg.train.arch.hidden, (std::vector<int>{4, 4}));
  EXPECT_EQ(cfg.experiment.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(cfg.experiment.plans, (std::vector<std::string>{"30-O", "10-O+20-R"}));
  EXPECT_EQ(cfg.noise.coupling_groups, (std::vector<std::vector<int>>{{0, 1}}));
  EXPECT_EQ(cfg.env.horizon, RunConfig{}.env.horizon);
}

TEST(Config, HorizonFollowsTheEnvironment) {
  const RunConfig cfg = ParseRunConfig("[env]\nhorizon = 80\n");
  EXPECT_EQ(cfg.train.horizon, 80);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {
           "[train]\nitertions = 3\n",         // unknown key
           "[bogus]\nx = 1\n",                 // unknown section
           "stray = 1\n",                      // key outside a section
           "[train]\niterations = ten\n",      // not a number
           "[train]\niterations = 3.5\n",      // not an integer
           "[train]\nkl_step = -1\n",          // fails validation
           "[env]\nwall_height = 0.5\n",       // above the goal box
           "[experiment]\nplans = 15-O\n",     // unknown plan
           "[experiment]\nseeds = \n",         // empty list
           "[noise]\ncoupling_groups = 0+9\n", // dim out of range
           "[demos]\nregion = middle\n",
           "[train]\nbc_fit_log_std = maybe\n",
           "[train\n",
       }) {
    EXPECT_THROW(ParseRunConfig(text), ValidationError) << text;
  }
}

TEST(Config, LoadReportsThePath) {
  test::TempDir dir;
  try {
    LoadRunConfig(dir.path() / "missing.ini");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.ini"), std::string::npos);
  }
  std::ofstream(dir.path() / "bad.ini") << "[train]\nnope = 1\n";
  try {
    LoadRunConfig(dir.path() / "bad.ini");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("train.nope"), std::string::npos);
  }
}

TEST(Config, ShippedConfigParses) {
  const auto path = std::filesystem::path(CORRECTIVE_IL_SOURCE_DIR) / "configs" / "default.ini";
  const RunConfig cfg = LoadRunConfig(path);
  EXPECT_EQ(ConfigHash(cfg), ConfigHash(RunConfig{}));
}

// --- Report -------------------------------------------------------------

void WriteCell(const std::filesystem::path& root, const CellSummary& c) {
  const auto dir = root / c.plan / std::to_string(c.seed);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "cell.json") << CellJson(c, 1, 10).dump(2);
}

TEST(Report, WritesAggregatesCurvesAndSummary) {
  test::TempDir dir;
  const auto runs = dir.path() / "runs";
  for (std::uint64_t s = 1; s <= 3; ++s) {
    WriteCell(runs, {"30-O", s, 5, {{5, 0.1}, {10, 0.2}}});
    WriteCell(runs, {"10-O+20-C", s, 5, {{5, 0.5 + 0.1 * s}, {10, 0.9}}});
    WriteCell(runs, {"10-O+20-R", s, 5, {{5, 0.3}, {10, 0.9}}});
  }
  const ReportPaths paths = WriteReport(runs, dir.path() / "out");

  std::ifstream csv(paths.aggregate_csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(csv, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "plan,iteration,mean,sd,n_seeds");
  EXPECT_EQ(rows[1], "10-O+20-C,5,0.700000,0.100000,3");

  std::ifstream svg_in(paths.curves_svg);
  const std::string svg((std::istreambuf_iterator<char>(svg_in)), {});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("10-O+20-C"), std::string::npos);

  const json summary = json::parse(std::ifstream(paths.summary_json));
  EXPECT_EQ(summary.at("eval_seed"), 5);
  EXPECT_EQ(summary.at("verdicts").at("H2").at("relation"), "better");
  EXPECT_EQ(summary.at("verdicts").at("H2").at("method"), "unanimous");
}

TEST(Report, IsByteStable) {
  test::TempDir dir;
  const auto runs = dir.path() / "runs";
  WriteCell(runs, {"30-O", 1, 5, {{5, 0.1}}});
  WriteCell(runs, {"10-O+20-R", 1, 5, {{5, 0.3}}});
  const ReportPaths a = WriteReport(runs, dir.path() / "a");
  const ReportPaths b = WriteReport(runs, dir.path() / "b");
  for (auto [x, y] : {std::pair{a.aggregate_csv, b.aggregate_csv},
                      std::pair{a.curves_svg, b.curves_svg},
                      std::pair{a.summary_json, b.summary_json}}) {
    std::ifstream fx(x), fy(y);
    EXPECT_EQ(std::string(std::istreambuf_iterator<char>(fx), {}),
              std::string(std::istreambuf_iterator<char>(fy), {}));
  }
}

TEST(Report, RejectsMissingOrMixedRuns) {
  test::TempDir dir;
  EXPECT_THROW(WriteReport(dir.path() / "nope", dir.path() / "out"), ValidationError);
  std::filesystem::create_directories(dir.path() / "empty");
  EXPECT_THROW(WriteReport(dir.path() / "empty", dir.path() / "out"), ValidationError);
  WriteCell(dir.path() / "mixed", {"30-O", 1, 5, {{5, 0.1}}});
  WriteCell(dir.path() / "mixed", {"10-O+20-R", 1, 6, {{5, 0.3}}});
  EXPECT_THROW(WriteReport(dir.path() / "mixed", dir.path() / "out"), ValidationError);
}

}  // namespace
}  // namespace corrective_il
