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

#ifndef CORRECTIVE_IL_DEMO_IO_HPP_
#define CORRECTIVE_IL_DEMO_IO_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "corrective_il/demo.hpp"
#include "corrective_il/errors.hpp"

// On-disk demo sets. A set is a directory holding
//   manifest.json  {label, counts: {source: {...}, region: {...}}, seed,
//                   config_hash}
//   demos.jsonl    one demonstration per line:
//     {"task": {"id", "ball_start": [x, y], "goal": [x, y], "region"},
//      "source", "corrective_of": id | null, "success",
//      "steps": [{"obs": [...8], "act": [...3]}, ...]}
// Doubles are written in shortest round-trip form, so load(save(s)) == s.

namespace corrective_il {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kDemosFile = "demos.jsonl";

inline json TaskToJson(const TaskInstance& t) {
  return {{"id", t.task_id},
          {"ball_start", {t.ball_start.x(), t.ball_start.y()}},
          {"goal", {t.goal.x(), t.goal.y()}},
          {"region", RegionName(t.region)}};
}

inline TaskInstance TaskFromJson(const json& j) {
  TaskInstance t;
  t.task_id = j.at("id").get<TaskId>();
  const auto& b = j.at("ball_start");
  const auto& g = j.at("goal");
  if (b.size() != 2 || g.size() != 2) throw ValidationError("task vectors must have 2 entries");
  t.ball_start = {b.at(0).get<double>(), b.at(1).get<double>()};
  t.goal = {g.at(0).get<double>(), g.at(1).get<double>()};
  t.region = ParseRegion(j.at("region").get<std::string>());
  return t;
}

inline json DemoToJson(const Demonstration& d) {
  json steps = json::array();
  for (const auto& s : d.steps) {
    steps.push_back({{"obs", std::vector<double>(s.obs.data(), s.obs.data() + kObsDim)},
                     {"act", std::vector<double>(s.act.data(), s.act.data() + kActDim)}});
  }
  return {{"task", TaskToJson(d.task)},
          {"source", SourceName(d.source)},
          {"corrective_of", d.corrective_of ? json(*d.corrective_of) : json(nullptr)},
          {"success", d.success},
          {"steps", std::move(steps)}};
}

inline Demonstration DemoFromJson(const json& j) {
  Demonstration d;
  d.task = TaskFromJson(j.at("task"));
  d.source = ParseSource(j.at("source").get<std::string>());
  const auto& c = j.at("corrective_of");
  if (!c.is_null()) d.corrective_of = c.get<TaskId>();
  d.success = j.at("success").get<bool>();
  for (const auto& s : j.at("steps")) {
    const auto obs = s.at("obs").get<std::vector<double>>();
    const auto act = s.at("act").get<std::vector<double>>();
    if (obs.size() != kObsDim || act.size() != kActDim) {
      throw ValidationError("step has obs/act of wrong dimension");
    }
    DemoStep step;
    step.obs = Eigen::Map<const Observation>(obs.data());
    step.act = Eigen::Map<const PolicyAction>(act.data());
    d.steps.push_back(step);
  }
  return d;
}

inline json CountsJson(const std::vector<Demonstration>& demos) {
  std::map<std::string, int> by_source;
  std::map<std::string, int> by_region;
  int corrective = 0;
  for (const auto& d : demos) {
    ++by_source[std::string(SourceName(d.source))];
    ++by_region[std::string(RegionName(d.region()))];
    if (d.corrective_of) ++corrective;
  }
  return {{"total", demos.size()},
          {"source", by_source},
          {"region", by_region},
          {"corrective", corrective}};
}

inline json ManifestJson(const DemoSet& set, std::uint64_t config_hash) {
  return {{"label", set.label},
          {"counts", CountsJson(set.demos)},
          {"seed", set.seed},
          {"config_hash", HashHex(config_hash)}};
}

inline void WriteManifest(const fs::path& dir, const DemoSet& set,
                          std::uint64_t config_hash) {
  std::ofstream out(dir / kManifestFile);
  out << ManifestJson(set, config_hash).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed to write " + (dir / kManifestFile).string());
}

inline void SaveDemoSet(const DemoSet& set, const fs::path& dir,
                        std::uint64_t config_hash = 0) {
  ValidateLabel(set);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / kDemosFile, std::ios::trunc);
    for (const auto& d : set.demos) out << DemoToJson(d).dump() << '\n';
    if (!out) throw std::runtime_error("failed to write " + (dir / kDemosFile).string());
  }
  WriteManifest(dir, set, config_hash);
}

inline DemoSet LoadDemoSet(const fs::path& dir) {
  std::ifstream manifest_in(dir / kManifestFile);
  if (!manifest_in) {
    throw ValidationError("missing " + (dir / kManifestFile).string());
  }
  json manifest;
  try {
    manifest = json::parse(manifest_in);
  } catch (const json::exception& e) {
    throw ValidationError((dir / kManifestFile).string() + ": " + e.what());
  }
  DemoSet set;
  try {
    set.label = manifest.at("label").get<std::string>();
    set.seed = manifest.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError((dir / kManifestFile).string() + ": " + e.what());
  }

  std::ifstream in(dir / kDemosFile);
  if (!in) throw ValidationError("missing " + (dir / kDemosFile).string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      set.demos.push_back(DemoFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw LoadError(line_no, e.what());
    } catch (const ValidationError& e) {
      throw LoadError(line_no, e.what());
    }
  }
  if (manifest.contains("counts") &&
      manifest["counts"] != CountsJson(set.demos)) {
    throw ValidationError("manifest counts do not match " +
                          (dir / kDemosFile).string());
  }
  ValidateLabel(set);
  return set;
}

// Appends one demonstration to an existing (or new) set directory and
// rewrites the manifest with the relabelled counts. Single writer per set.
inline void AppendDemo(const fs::path& dir, const Demonstration& demo,
                       std::uint64_t seed, std::uint64_t config_hash) {
  fs::create_directories(dir);
  DemoSet set;
  set.seed = seed;
  if (fs::exists(dir / kManifestFile)) set = LoadDemoSet(dir);
  set.demos.push_back(demo);
  set.label = MakeLabel(CountKinds(set.demos));
  {
    std::ofstream out(dir / kDemosFile, std::ios::app);
    out << DemoToJson(demo).dump() << '\n';
    if (!out) throw std::runtime_error("failed to append to " + (dir / kDemosFile).string());
  }
  WriteManifest(dir, set, config_hash);
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_DEMO_IO_HPP_
