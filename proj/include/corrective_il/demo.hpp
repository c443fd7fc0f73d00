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

#ifndef CORRECTIVE_IL_DEMO_HPP_
#define CORRECTIVE_IL_DEMO_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "corrective_il/env.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/rng.hpp"

namespace corrective_il {

enum class DemoSource { kOracle, kDegraded, kHuman };

inline std::string_view SourceName(DemoSource s) {
  switch (s) {
    case DemoSource::kOracle:
      return "oracle";
    case DemoSource::kDegraded:
      return "degraded";
    case DemoSource::kHuman:
      return "human";
  }
  return "?";
}

inline DemoSource ParseSource(std::string_view name) {
  if (name == "oracle") return DemoSource::kOracle;
  if (name == "degraded") return DemoSource::kDegraded;
  if (name == "human") return DemoSource::kHuman;
  throw ValidationError("unknown demo source '" + std::string(name) + "'");
}

struct DemoStep {
  Observation obs = Observation::Zero();
  PolicyAction act = PolicyAction::Zero();  // units of a_max

  bool operator==(const DemoStep&) const = default;
};

struct Demonstration {
  TaskInstance task;
  std::vector<DemoStep> steps;
  bool success = false;
  DemoSource source = DemoSource::kOracle;
  std::optional<TaskId> corrective_of;

  Region region() const { return task.region; }
  bool operator==(const Demonstration&) const = default;
};

// Provenance class used by set labels such as "10-O+20-C":
//   O  original demo from the restrictive space
//   R  additional demo sampled from the full space
//   C  corrective demo (recorded for a triaged failure)
enum class DemoKind { kOriginal, kRandom, kCorrective };

inline DemoKind KindOf(const Demonstration& d) {
  if (d.corrective_of) return DemoKind::kCorrective;
  return d.region() == Region::kRestrictive ? DemoKind::kOriginal
                                            : DemoKind::kRandom;
}

inline char KindCode(DemoKind k) {
  switch (k) {
    case DemoKind::kOriginal:
      return 'O';
    case DemoKind::kRandom:
      return 'R';
    case DemoKind::kCorrective:
      return 'C';
  }
  return '?';
}

using KindCounts = std::map<char, int>;

// Parses "N-X(+N-X)*". The empty label denotes the empty set.
inline KindCounts ParseLabel(std::string_view label) {
  KindCounts counts;
  if (label.empty()) return counts;
  std::size_t pos = 0;
  while (pos <= label.size()) {
    const std::size_t plus = std::min(label.find('+', pos), label.size());
    const std::string_view term = label.substr(pos, plus - pos);
    const std::size_t dash = term.find('-');
    int n = -1;
    if (dash != std::string_view::npos && dash + 2 == term.size()) {
      auto [p, ec] = std::from_chars(term.data(), term.data() + dash, n);
      if (ec != std::errc() || p != term.data() + dash) n = -1;
    }
    const char code = term.empty() ? '?' : term.back();
    if (n < 0 || (code != 'O' && code != 'R' && code != 'C') ||
        counts.contains(code)) {
      throw ValidationError("malformed demo set label '" + std::string(label) +
                            "'");
    }
    counts[code] = n;
    pos = plus + 1;
  }
  return counts;
}

inline KindCounts CountKinds(const std::vector<Demonstration>& demos) {
  KindCounts counts;
  for (const auto& d : demos) ++counts[KindCode(KindOf(d))];
  return counts;
}

inline std::string MakeLabel(const KindCounts& counts) {
  std::string label;
  for (char code : {'O', 'R', 'C'}) {
    auto it = counts.find(code);
    if (it == counts.end() || it->second == 0) continue;
    if (!label.empty()) label += '+';
    label += std::to_string(it->second) + "-" + code;
  }
  return label;
}

struct DemoSet {
  std::vector<Demonstration> demos;
  std::string label;
  std::uint64_t seed = 0;

  bool operator==(const DemoSet&) const = default;
};

// Throws if the label's per-kind counts disagree with the contents.
inline void ValidateLabel(const DemoSet& set) {
  KindCounts expected = ParseLabel(set.label);
  KindCounts actual = CountKinds(set.demos);
  std::erase_if(expected, [](const auto& kv) { return kv.second == 0; });
  if (expected != actual) {
    throw ValidationError("label '" + set.label + "' does not match contents ('" +
                          MakeLabel(actual) + "')");
  }
}

// Scripted expert standing in for a human demonstrator: approach the ball
// while pre-closing the hand, close on arrival, then carry to the goal.
// Works on observations so it can also drive rollouts as a policy.
struct OracleController {
  double preclose_aperture = 0.32;
  double arrive_tolerance = 0.005;
  // Height above the wall top at which the oracle crosses a wall, and how far
  // past the wall it aims before heading for the target.
  double wall_clearance = 0.02;
  double crossing_offset = 0.01;

  // Next point to steer toward on the way from `p` to `target`.
  Vec2 Waypoint(const Vec2& p, const Vec2& target, const EnvConfig& cfg) const {
    if (!WallBlocks(p, target, cfg)) return target;
    const double w = cfg.restrictive_width / 2;
    const double dir = target.x() >= p.x() ? 1.0 : -1.0;
    double wall = -dir * w;
    const auto inside = [&](double c, double x) { return c > 0 ? x <= c : x >= c; };
    if (inside(wall, p.x()) == inside(wall, target.x())) wall = -wall;
    const double clear_y = cfg.wall_height + wall_clearance;
    if (p.y() < clear_y) return {p.x(), clear_y};
    return {wall + dir * crossing_offset, clear_y};
  }

  PolicyAction operator()(const Observation& obs, const EnvConfig& cfg) const {
    const Vec2 gripper(obs(0), obs(1));
    const double aperture = obs(2);
    const Vec2 ball(obs(3), obs(4));
    const bool held = obs(5) > 0.5;
    const Vec2 goal(obs(6), obs(7));
    PolicyAction u;
    if (held) {
      const Vec2 d = ((Waypoint(ball, goal, cfg) - ball) / cfg.a_max)
                         .cwiseMax(-1.0)
                         .cwiseMin(1.0);
      u << d.x(), d.y(), -1.0;
      return u;
    }
    const Vec2 delta = ball - gripper;
    const Vec2 d = ((Waypoint(gripper, ball, cfg) - gripper) / cfg.a_max)
                       .cwiseMax(-1.0)
                       .cwiseMin(1.0);
    double d_ap;
    if (delta.norm() <= arrive_tolerance) {
      d_ap = -1.0;
    } else {
      d_ap = std::clamp((preclose_aperture - aperture) / cfg.a_max, -1.0, 1.0);
    }
    u << d.x(), d.y(), d_ap;
    return u;
  }
};

// Replays policy-unit actions from reset(task); stops at episode end.
// Returns the final state.
inline EnvState Replay(const TaskInstance& task,
                       const std::vector<DemoStep>& steps,
                       const EnvConfig& cfg) {
  EnvState s = Reset(task, cfg);
  for (const auto& step : steps) {
    if (IsDone(s, cfg)) break;
    s = Step(s, ToEnvAction(step.act, cfg), cfg).next;
  }
  return s;
}

inline Demonstration OracleDemo(const TaskInstance& task, const EnvConfig& cfg,
                                const OracleController& oracle = {}) {
  Demonstration demo;
  demo.task = task;
  demo.source = DemoSource::kOracle;
  EnvState s = Reset(task, cfg);
  while (!IsDone(s, cfg)) {
    DemoStep step;
    step.obs = Observe(s);
    step.act = oracle(step.obs, cfg);
    demo.steps.push_back(step);
    s = Step(s, ToEnvAction(step.act, cfg), cfg).next;
  }
  demo.success = IsSuccess(s, cfg);
  if (!demo.success) {
    throw std::runtime_error("oracle failed to solve task " +
                             std::to_string(task.task_id));
  }
  return demo;
}

// Emulates a low-cost hand tracker recording the same demonstration:
// untracked action dimensions, fingers that cannot be told apart, and
// jittery readings.
struct SensorNoiseConfig {
  std::set<int> dropped_dims;
  // Each group is forced to its mean; the first member is the leader.
  std::vector<std::vector<int>> coupling_groups;
  double jitter_std = 0.0;  // policy action units
  std::uint64_t seed = 0;

  void Validate(int act_dim = kActDim) const {
    if (!std::isfinite(jitter_std) || jitter_std < 0) {
      throw ValidationError("jitter_std must be finite and non-negative");
    }
    for (int d : dropped_dims) {
      if (d < 0 || d >= act_dim) {
        throw ValidationError("dropped dim " + std::to_string(d) +
                              " out of range");
      }
    }
    std::set<int> seen;
    for (const auto& g : coupling_groups) {
      if (g.empty()) throw ValidationError("empty coupling group");
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0 || g[i] >= act_dim) {
          throw ValidationError("coupling dim " + std::to_string(g[i]) +
                                " out of range");
        }
        if (!seen.insert(g[i]).second) {
          throw ValidationError("coupling groups must be disjoint");
        }
        if (i > 0 && dropped_dims.contains(g[i])) {
          throw ValidationError("dim " + std::to_string(g[i]) +
                                " is both dropped and a coupled follower");
        }
      }
    }
  }

  bool IsIdentity() const {
    return dropped_dims.empty() && jitter_std == 0.0 &&
           std::all_of(coupling_groups.begin(), coupling_groups.end(),
                       [](const auto& g) { return g.size() <= 1; });
  }
};

inline Demonstration Degrade(const Demonstration& demo,
                             const SensorNoiseConfig& noise,
                             const EnvConfig& cfg) {
  if (demo.source != DemoSource::kOracle) {
    throw ContractError("only oracle demonstrations can be degraded (got " +
                        std::string(SourceName(demo.source)) + ")");
  }
  noise.Validate();
  Demonstration out = demo;
  out.source = DemoSource::kDegraded;
  Rng rng = MakeRng(DeriveSeed(noise.seed, static_cast<std::uint64_t>(
                                               demo.task.task_id)));
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (auto& step : out.steps) {
    for (int d : noise.dropped_dims) step.act(d) = 0.0;
    for (const auto& group : noise.coupling_groups) {
      double mean = 0;
      for (int d : group) mean += step.act(d);
      mean /= static_cast<double>(group.size());
      for (int d : group) step.act(d) = mean;
    }
    if (noise.jitter_std > 0) {
      for (int d = 0; d < kActDim; ++d) {
        step.act(d) += noise.jitter_std * jitter(rng);
      }
    }
  }
  out.success = IsSuccess(Replay(out.task, out.steps, cfg), cfg);
  return out;
}

inline DemoSet Merge(const DemoSet& a, const DemoSet& b, std::string label,
                     bool allow_duplicates = false) {
  DemoSet out;
  out.label = std::move(label);
  out.seed = a.seed;
  out.demos.reserve(a.demos.size() + b.demos.size());
  std::unordered_set<TaskId> ids;
  for (const auto* set : {&a, &b}) {
    for (const auto& d : set->demos) {
      if (!ids.insert(d.task.task_id).second && !allow_duplicates) {
        throw ValidationError("duplicate task_id " +
                              std::to_string(d.task.task_id) + " in merge");
      }
      out.demos.push_back(d);
    }
  }
  ValidateLabel(out);
  return out;
}

// Oracle demos for `count` tasks sampled from `region`. Task ids are
// `first_id`, `first_id + 1`, ...
inline DemoSet GenerateOracleDemos(Region region, int count, std::uint64_t seed,
                                   TaskId first_id, const EnvConfig& cfg) {
  DemoSet set;
  set.seed = seed;
  Rng rng = MakeRng(seed);
  for (int i = 0; i < count; ++i) {
    set.demos.push_back(OracleDemo(SampleTask(region, rng, first_id + i, cfg), cfg));
  }
  set.label = MakeLabel(CountKinds(set.demos));
  return set;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_DEMO_HPP_
