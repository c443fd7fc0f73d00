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

#ifndef CORRECTIVE_IL_CONFIG_HPP_
#define CORRECTIVE_IL_CONFIG_HPP_

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corrective_il/dapg.hpp"
#include "corrective_il/demo.hpp"
#include "corrective_il/env.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/harness.hpp"
#include "corrective_il/rng.hpp"

namespace corrective_il {

// Settings for `gen-demos`.
struct DemoGenConfig {
  Region region = Region::kFull;
  int count = 25;
  std::uint64_t seed = 1;
  bool degraded = false;
};

struct ExperimentConfig {
  std::vector<std::string> plans{kPlanLabels.begin(), kPlanLabels.end()};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::uint64_t eval_seed = 2022;
};

// Everything a run depends on. The output directory is recorded but is not
// part of the hash: moving a run does not change its identity.
struct RunConfig {
  EnvConfig env;
  TrainConfig train;
  SensorNoiseConfig noise{.jitter_std = 0.3, .seed = 7};
  DemoGenConfig demos;
  ExperimentConfig experiment;
  std::string out_dir = "runs";

  void Validate() const {
    env.Validate();
    train.Validate();
    noise.Validate();
    if (train.horizon != env.horizon) {
      throw ValidationError("train horizon must equal env horizon");
    }
    if (demos.count < 0) throw ValidationError("demos.count must be >= 0");
    if (experiment.seeds.empty()) throw ValidationError("experiment.seeds is empty");
    for (const auto& p : experiment.plans) CountsForLabel(p);
  }
};

namespace config_detail {

inline std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (Trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] inline void Bad(std::string_view key, std::string_view value) {
  throw ValidationError("bad value '" + std::string(value) + "' for " + std::string(key));
}

// Shortest text that parses back to the same double.
inline std::string Format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
inline std::string Format(int v) { return std::to_string(v); }
inline std::string Format(std::uint64_t v) { return std::to_string(v); }
inline std::string Format(bool v) { return v ? "true" : "false"; }
inline std::string Format(const std::string& v) { return v; }
inline std::string Format(Region v) { return std::string(RegionName(v)); }

template <typename T>
std::string FormatList(const T& items, std::string_view sep = ", ") {
  std::string out;
  for (const auto& x : items) {
    if (!out.empty()) out += sep;
    out += Format(x);
  }
  return out;
}
inline std::string Format(const std::vector<double>& v) { return FormatList(v); }
inline std::string Format(const std::vector<int>& v) { return FormatList(v); }
inline std::string Format(const std::set<int>& v) { return FormatList(v); }
inline std::string Format(const std::vector<std::uint64_t>& v) { return FormatList(v); }
inline std::string Format(const std::vector<std::string>& v) { return FormatList(v); }
// Groups are comma-separated, members joined by '+': "0+1, 2+3".
inline std::string Format(const std::vector<std::vector<int>>& groups) {
  std::string out;
  for (const auto& g : groups) {
    if (!out.empty()) out += ", ";
    out += FormatList(g, "+");
  }
  return out;
}

inline void Parse(std::string_view key, const std::string& s, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    Bad(key, s);
  }
  if (used != s.size()) Bad(key, s);
}
inline void Parse(std::string_view key, const std::string& s, long long& out) {
  std::size_t used = 0;
  try {
    out = std::stoll(s, &used);
  } catch (const std::exception&) {
    Bad(key, s);
  }
  if (used != s.size()) Bad(key, s);
}
inline void Parse(std::string_view key, const std::string& s, int& out) {
  long long v = 0;
  Parse(key, s, v);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) Bad(key, s);
  out = static_cast<int>(v);
}
inline void Parse(std::string_view key, const std::string& s, std::uint64_t& out) {
  std::size_t used = 0;
  if (s.empty() || s[0] == '-') Bad(key, s);
  try {
    out = std::stoull(s, &used);
  } catch (const std::exception&) {
    Bad(key, s);
  }
  if (used != s.size()) Bad(key, s);
}
inline void Parse(std::string_view key, const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
  } else if (s == "false" || s == "0") {
    out = false;
  } else {
    Bad(key, s);
  }
}
inline void Parse(std::string_view, const std::string& s, std::string& out) { out = s; }
inline void Parse(std::string_view, const std::string& s, Region& out) { out = ParseRegion(s); }

template <typename T>
void Parse(std::string_view key, const std::string& s, std::vector<T>& out) {
  out.clear();
  for (const auto& item : Split(s, ',')) {
    T v{};
    Parse(key, item, v);
    out.push_back(v);
  }
}
inline void Parse(std::string_view key, const std::string& s, std::set<int>& out) {
  std::vector<int> v;
  Parse(key, s, v);
  out = {v.begin(), v.end()};
}
inline void Parse(std::string_view key, const std::string& s,
                  std::vector<std::vector<int>>& out) {
  out.clear();
  for (const auto& group : Split(s, ',')) {
    std::vector<int> members;
    for (const auto& m : Split(group, '+')) {
      int v = 0;
      Parse(key, m, v);
      members.push_back(v);
    }
    out.push_back(std::move(members));
  }
}

// Visits every serialized field in a fixed order. The order defines the
// canonical text and therefore the hash.
template <typename Visitor>
void VisitFields(RunConfig& c, Visitor&& v) {
  EnvConfig& e = c.env;
  v("env", "restrictive_width", e.restrictive_width);
  v("env", "full_width", e.full_width);
  v("env", "goal_x_min", e.goal_box.x.lo);
  v("env", "goal_x_max", e.goal_box.x.hi);
  v("env", "goal_y_min", e.goal_box.y.lo);
  v("env", "goal_y_max", e.goal_box.y.hi);
  v("env", "home_x", e.home.x());
  v("env", "home_y", e.home.y());
  v("env", "workspace_x_min", e.workspace.x.lo);
  v("env", "workspace_x_max", e.workspace.x.hi);
  v("env", "workspace_y_min", e.workspace.y.lo);
  v("env", "workspace_y_max", e.workspace.y.hi);
  v("env", "horizon", e.horizon);
  v("env", "a_max", e.a_max);
  v("env", "grasp_threshold", e.grasp_threshold);
  v("env", "grasp_radius", e.grasp_radius);
  v("env", "goal_radius", e.goal_radius);
  v("env", "reach_cost", e.reach_cost);
  v("env", "carry_cost", e.carry_cost);
  v("env", "grasp_bonus", e.grasp_bonus);
  v("env", "success_bonus", e.success_bonus);
  v("env", "wall_height", e.wall_height);

  TrainConfig& t = c.train;
  v("train", "iterations", t.iterations);
  v("train", "rollouts_per_iter", t.rollouts_per_iter);
  v("train", "gamma", t.gamma);
  v("train", "gae_lambda", t.gae_lambda);
  v("train", "kl_step", t.kl_step);
  v("train", "cg_iters", t.cg_iters);
  v("train", "cg_damping", t.cg_damping);
  v("train", "bc_epochs", t.bc_epochs);
  v("train", "bc_step_size", t.bc_step_size);
  v("train", "bc_batch_size", t.bc_batch_size);
  v("train", "bc_fit_log_std", t.bc_fit_log_std);
  v("train", "demo_lambda0", t.demo_lambda0);
  v("train", "demo_lambda1", t.demo_lambda1);
  v("train", "demo_pseudo_advantage", t.demo_pseudo_advantage);
  v("train", "obs_std_floor", t.obs_std_floor);
  v("train", "checkpoint_fractions", t.checkpoint_fractions);
  v("train", "hidden", t.arch.hidden);
  v("train", "init_log_std", t.arch.init_log_std);
  v("train", "log_std_min", t.arch.log_std_min);
  v("train", "output_init_scale", t.arch.output_init_scale);
  v("train", "baseline_hidden", t.baseline.hidden);
  v("train", "baseline_epochs", t.baseline.epochs);
  v("train", "baseline_batch_size", t.baseline.batch_size);
  v("train", "baseline_step_size", t.baseline.step_size);
  v("train", "baseline_return_scale", t.baseline.return_scale);
  v("train", "seed", t.seed);

  v("noise", "dropped_dims", c.noise.dropped_dims);
  v("noise", "coupling_groups", c.noise.coupling_groups);
  v("noise", "jitter_std", c.noise.jitter_std);
  v("noise", "seed", c.noise.seed);

  v("demos", "region", c.demos.region);
  v("demos", "count", c.demos.count);
  v("demos", "seed", c.demos.seed);
  v("demos", "degraded", c.demos.degraded);

  v("experiment", "plans", c.experiment.plans);
  v("experiment", "seeds", c.experiment.seeds);
  v("experiment", "eval_seed", c.experiment.eval_seed);
}

}  // namespace config_detail

// Serializes every hashed field as INI text, one section per group, in a
// fixed order with round-trip precision.
inline std::string CanonicalText(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::ostringstream out;
  std::string section;
  config_detail::VisitFields(copy, [&](std::string_view sec, std::string_view key,
                                       const auto& value) {
    if (sec != section) {
      if (!section.empty()) out << "\n";
      section = sec;
      out << "[" << sec << "]\n";
    }
    out << key << " = " << config_detail::Format(value) << "\n";
  });
  return out.str();
}

inline std::uint64_t ConfigHash(const RunConfig& cfg) { return Fnv1a64(CanonicalText(cfg)); }

// Canonical text plus the output section; what gets checked into run dirs.
inline std::string ConfigFileText(const RunConfig& cfg) {
  return CanonicalText(cfg) + "\n[output]\ndir = " + cfg.out_dir + "\n";
}

// Parses INI text. Missing keys keep their defaults; unknown sections or
// keys are errors so that typos cannot silently fall back to defaults.
inline RunConfig ParseRunConfig(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  std::set<std::string> known{"output.dir"};
  config_detail::VisitFields(cfg, [&](std::string_view sec, std::string_view key, auto& value) {
    const std::string path = std::string(sec) + "." + std::string(key);
    known.insert(path);
    if (auto raw = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      config_detail::Parse(path, config_detail::Trim(*raw), value);
    }
  });
  if (auto dir = tree.get_optional<std::string>("output.dir")) cfg.out_dir = *dir;
  for (const auto& [sec, body] : tree) {
    if (body.empty()) throw ValidationError("config key '" + sec + "' outside a section");
    for (const auto& [key, unused] : body) {
      if (!known.contains(sec + "." + key)) {
        throw ValidationError("unknown config key " + sec + "." + key);
      }
    }
  }
  cfg.train.horizon = cfg.env.horizon;
  cfg.Validate();
  return cfg;
}

inline RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseRunConfig(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_CONFIG_HPP_
