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

#ifndef CORRECTIVE_IL_ENV_HPP_
#define CORRECTIVE_IL_ENV_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include "corrective_il/errors.hpp"
#include "corrective_il/rng.hpp"

// Planar relocation task: a gripper (x, y, aperture) must pick a ball off
// the table (y = 0) and carry it into a goal disc above the table.

namespace corrective_il {

using Vec2 = Eigen::Vector2d;
using TaskId = std::int64_t;

// Task ids at or above this value belong to the held-out evaluation set.
inline constexpr TaskId kEvalIdBase = 1'000'000'000;

enum class Region { kRestrictive, kFull, kFullExtension };

inline std::string_view RegionName(Region r) {
  switch (r) {
    case Region::kRestrictive:
      return "restrictive";
    case Region::kFull:
      return "full";
    case Region::kFullExtension:
      return "full_extension";
  }
  return "?";
}

inline Region ParseRegion(std::string_view name) {
  if (name == "restrictive") return Region::kRestrictive;
  if (name == "full") return Region::kFull;
  if (name == "full_extension") return Region::kFullExtension;
  throw ValidationError("unknown region '" + std::string(name) + "'");
}

struct Interval {
  double lo = 0;
  double hi = 0;
  bool Contains(double v) const { return v >= lo && v <= hi; }
  double Width() const { return hi - lo; }
};

struct Box {
  Interval x;
  Interval y;
  bool Contains(const Vec2& p) const { return x.Contains(p.x()) && y.Contains(p.y()); }
};

// Geometry, dynamics and reward constants. Only the two region widths and
// their non-overlap are fixed by the task definition; everything else is
// tunable.
struct EnvConfig {
  double restrictive_width = 0.3;
  double full_width = 0.5;
  Box goal_box{{-0.05, 0.05}, {0.10, 0.30}};
  Vec2 home{0.0, 0.2};
  Box workspace{{-0.4, 0.4}, {0.0, 0.5}};
  int horizon = 100;
  double a_max = 0.05;
  double grasp_threshold = 0.3;
  double grasp_radius = 0.03;
  double goal_radius = 0.05;
  double reach_cost = 1.0;    // c1
  double carry_cost = 2.0;    // c2
  double grasp_bonus = 5.0;
  double success_bonus = 10.0;
  // Low walls at x = +-restrictive_width/2 rim the restrictive region like a
  // tray. Motion that would cross a wall below its top stops at the wall.
  // Zero removes them.
  double wall_height = 0.09;

  void Validate() const {
    if (!(restrictive_width > 0) || !(full_width > restrictive_width)) {
      throw ValidationError("region widths must satisfy 0 < restrictive < full");
    }
    if (horizon <= 0) throw ValidationError("horizon must be positive");
    if (!(a_max > 0)) throw ValidationError("a_max must be positive");
    if (!(grasp_threshold > 0 && grasp_threshold < 1)) {
      throw ValidationError("grasp_threshold must lie in (0, 1)");
    }
    if (!(grasp_radius > 0) || !(goal_radius > 0)) {
      throw ValidationError("radii must be positive");
    }
    if (!(wall_height >= 0) || wall_height >= goal_box.y.lo) {
      throw ValidationError("wall_height must lie in [0, goal_box.y.lo)");
    }
    if (goal_box.y.lo - goal_radius <= 0) {
      throw ValidationError("goal box must keep goals off the table");
    }
  }
};

// Ball x-range for a region. For kFullExtension this is the hull; the
// region itself excludes the open restrictive interval.
inline Interval BallRange(Region r, const EnvConfig& cfg) {
  const double half = (r == Region::kRestrictive ? cfg.restrictive_width
                                                 : cfg.full_width) / 2;
  return {-half, half};
}

inline bool InRegion(double ball_x, Region r, const EnvConfig& cfg) {
  const double inner = cfg.restrictive_width / 2;
  switch (r) {
    case Region::kRestrictive:
      return std::abs(ball_x) <= inner;
    case Region::kFull:
      return BallRange(r, cfg).Contains(ball_x);
    case Region::kFullExtension:
      return BallRange(r, cfg).Contains(ball_x) && std::abs(ball_x) > inner;
  }
  return false;
}

struct TaskInstance {
  Vec2 ball_start = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  Region region = Region::kFull;
  TaskId task_id = 0;

  bool operator==(const TaskInstance&) const = default;
};

inline void ValidateTask(const TaskInstance& task, const EnvConfig& cfg) {
  if (!task.ball_start.allFinite() || !task.goal.allFinite()) {
    throw ValidationError("task " + std::to_string(task.task_id) +
                          ": non-finite coordinates");
  }
  if (task.ball_start.y() != 0.0) {
    throw ValidationError("task " + std::to_string(task.task_id) +
                          ": ball must start on the table (y = 0)");
  }
  if (!InRegion(task.ball_start.x(), task.region, cfg)) {
    throw ValidationError("task " + std::to_string(task.task_id) +
                          ": ball_start.x outside region " +
                          std::string(RegionName(task.region)));
  }
  if (!cfg.goal_box.Contains(task.goal)) {
    throw ValidationError("task " + std::to_string(task.task_id) +
                          ": goal outside goal box");
  }
}

// Uniform over the region's ball range and over the shared goal box.
inline TaskInstance SampleTask(Region region, Rng& rng, TaskId id,
                               const EnvConfig& cfg) {
  TaskInstance task;
  task.region = region;
  task.task_id = id;
  const double inner = cfg.restrictive_width / 2;
  const double outer = cfg.full_width / 2;
  if (region == Region::kFullExtension) {
    // Two strips of width (outer - inner); the rejection loop guards the
    // rounding case where a draw lands exactly on the inner boundary.
    std::uniform_real_distribution<double> u(0.0, 2 * (outer - inner));
    double x;
    do {
      const double s = u(rng);
      x = s < outer - inner ? -outer + s : outer - (s - (outer - inner));
    } while (std::abs(x) <= inner);
    task.ball_start = {x, 0.0};
  } else {
    const Interval range = BallRange(region, cfg);
    std::uniform_real_distribution<double> u(range.lo, range.hi);
    task.ball_start = {u(rng), 0.0};
  }
  std::uniform_real_distribution<double> gx(cfg.goal_box.x.lo, cfg.goal_box.x.hi);
  std::uniform_real_distribution<double> gy(cfg.goal_box.y.lo, cfg.goal_box.y.hi);
  task.goal.x() = gx(rng);
  task.goal.y() = gy(rng);
  return task;
}

struct EnvState {
  Vec2 gripper_pos = Vec2::Zero();
  double aperture = 1.0;  // 1 = fully open
  Vec2 ball_pos = Vec2::Zero();
  bool held = false;
  bool grasp_rewarded = false;  // grasp bonus is paid once per episode
  int t = 0;
  TaskInstance task;

  bool operator==(const EnvState&) const = default;
};

struct Action {
  Vec2 d_gripper = Vec2::Zero();
  double d_aperture = 0.0;
};

struct StepResult {
  EnvState next;
  double reward = 0;
  bool done = false;
  bool success = false;
};

inline double BallGoalDistance(const EnvState& s) {
  return (s.ball_pos - s.task.goal).norm();
}

// Closed ball: a distance of exactly goal_radius counts as success.
inline bool IsSuccess(const EnvState& s, const EnvConfig& cfg) {
  return BallGoalDistance(s) <= cfg.goal_radius;
}

inline bool IsDone(const EnvState& s, const EnvConfig& cfg) {
  return s.t >= cfg.horizon || IsSuccess(s, cfg);
}

inline EnvState Reset(const TaskInstance& task, const EnvConfig& cfg) {
  ValidateTask(task, cfg);
  EnvState s;
  s.gripper_pos = cfg.home;
  s.aperture = 1.0;
  s.ball_pos = task.ball_start;
  s.task = task;
  return s;
}

// Shaped reward for the transition state -> next.
inline double Reward(const EnvState& state, const Action& /*action*/,
                     const EnvState& next, const EnvConfig& cfg) {
  double r = 0;
  if (next.held) {
    r -= cfg.carry_cost * (next.ball_pos - next.task.goal).norm();
  } else {
    r -= cfg.reach_cost * (next.gripper_pos - next.ball_pos).norm();
  }
  if (next.grasp_rewarded && !state.grasp_rewarded) r += cfg.grasp_bonus;
  if (IsSuccess(next, cfg)) r += cfg.success_bonus;
  return r;
}

inline Action ClipAction(const Action& a, const EnvConfig& cfg) {
  if (!a.d_gripper.allFinite() || !std::isfinite(a.d_aperture)) {
    throw ValidationError("action components must be finite");
  }
  Action out;
  out.d_gripper = a.d_gripper.cwiseMax(-cfg.a_max).cwiseMin(cfg.a_max);
  out.d_aperture = std::clamp(a.d_aperture, -cfg.a_max, cfg.a_max);
  return out;
}

// Resolves a straight move from `from` to `to` against the tray walls. The
// tray interior includes its rim (|x| <= w). A blocked move keeps its y
// displacement and stops at the wall on the side it started from.
inline Vec2 ResolveWalls(const Vec2& from, Vec2 to, const EnvConfig& cfg) {
  if (cfg.wall_height <= 0) return to;
  const double w = cfg.restrictive_width / 2;
  const double first = to.x() >= from.x() ? -w : w;
  for (const double c : {first, -first}) {
    const auto inside = [&](double x) { return c > 0 ? x <= c : x >= c; };
    if (inside(from.x()) == inside(to.x())) continue;
    const double s = (c - from.x()) / (to.x() - from.x());
    const double y_cross = from.y() + s * (to.y() - from.y());
    if (y_cross >= cfg.wall_height) continue;
    const double outward = c > 0 ? 1.0 : -1.0;
    to.x() = inside(from.x())
                 ? c
                 : std::nextafter(c, outward * std::numeric_limits<double>::infinity());
    break;
  }
  return to;
}

// True when a straight segment between the points passes a wall below its
// top, i.e. when ResolveWalls would stop it.
inline bool WallBlocks(const Vec2& from, const Vec2& to, const EnvConfig& cfg) {
  return ResolveWalls(from, to, cfg) != to;
}

inline StepResult Step(const EnvState& state, const Action& action,
                       const EnvConfig& cfg) {
  if (IsDone(state, cfg)) {
    throw ContractError("step called on a finished episode (t=" +
                        std::to_string(state.t) + ")");
  }
  const Action a = ClipAction(action, cfg);
  EnvState next = state;
  next.gripper_pos =
      ResolveWalls(state.gripper_pos, state.gripper_pos + a.d_gripper, cfg);
  next.gripper_pos.x() =
      std::clamp(next.gripper_pos.x(), cfg.workspace.x.lo, cfg.workspace.x.hi);
  next.gripper_pos.y() =
      std::clamp(next.gripper_pos.y(), cfg.workspace.y.lo, cfg.workspace.y.hi);
  next.aperture = std::clamp(next.aperture + a.d_aperture, 0.0, 1.0);

  if (!next.held && next.aperture < cfg.grasp_threshold &&
      (next.gripper_pos - next.ball_pos).norm() <= cfg.grasp_radius) {
    next.held = true;
    next.grasp_rewarded = true;
  } else if (next.held && next.aperture > cfg.grasp_threshold) {
    next.held = false;
    next.ball_pos = {next.gripper_pos.x(), 0.0};
  }
  if (next.held) next.ball_pos = next.gripper_pos;
  next.t = state.t + 1;

  StepResult result;
  result.success = IsSuccess(next, cfg);
  result.done = result.success || next.t >= cfg.horizon;
  result.reward = Reward(state, a, next, cfg);
  result.next = std::move(next);
  return result;
}

// Policy input. Absolute coordinates only; the layout is fixed:
//   [gripper_x, gripper_y, aperture, ball_x, ball_y, held, goal_x, goal_y]
inline constexpr int kObsDim = 8;
inline constexpr int kActDim = 3;
using Observation = Eigen::Matrix<double, kObsDim, 1>;
// Policy action in units of a_max: [dx, dy, d_aperture].
using PolicyAction = Eigen::Matrix<double, kActDim, 1>;

inline Observation Observe(const EnvState& s) {
  Observation o;
  o << s.gripper_pos.x(), s.gripper_pos.y(), s.aperture, s.ball_pos.x(),
      s.ball_pos.y(), s.held ? 1.0 : 0.0, s.task.goal.x(), s.task.goal.y();
  return o;
}

inline Action ToEnvAction(const PolicyAction& u, const EnvConfig& cfg) {
  Action a;
  a.d_gripper = {u(0) * cfg.a_max, u(1) * cfg.a_max};
  a.d_aperture = u(2) * cfg.a_max;
  return a;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_ENV_HPP_
