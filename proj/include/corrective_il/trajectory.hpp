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

#ifndef CORRECTIVE_IL_TRAJECTORY_HPP_
#define CORRECTIVE_IL_TRAJECTORY_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "corrective_il/env.hpp"

namespace corrective_il {

// One on-policy episode. Columns of observations/actions are time steps;
// actions are the raw (unclipped) policy samples whose log densities are
// stored in log_probs.
struct Trajectory {
  TaskInstance task;
  Eigen::MatrixXd observations;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd log_probs;
  bool success = false;
  double final_distance = 0;
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(rewards.size()); }
  bool operator==(const Trajectory&) const = default;
};

inline Eigen::VectorXd DiscountedReturns(const Eigen::VectorXd& rewards, double gamma) {
  Eigen::VectorXd out(rewards.size());
  double acc = 0;
  for (Eigen::Index t = rewards.size() - 1; t >= 0; --t) {
    acc = rewards(t) + gamma * acc;
    out(t) = acc;
  }
  return out;
}

inline Eigen::MatrixXd StackObservations(const std::vector<Trajectory>& trajs) {
  Eigen::Index n = 0;
  for (const auto& tr : trajs) n += tr.length();
  Eigen::MatrixXd out(kObsDim, n);
  Eigen::Index c = 0;
  for (const auto& tr : trajs) {
    out.middleCols(c, tr.length()) = tr.observations;
    c += tr.length();
  }
  return out;
}

inline Eigen::MatrixXd StackActions(const std::vector<Trajectory>& trajs) {
  Eigen::Index n = 0;
  for (const auto& tr : trajs) n += tr.length();
  Eigen::MatrixXd out(kActDim, n);
  Eigen::Index c = 0;
  for (const auto& tr : trajs) {
    out.middleCols(c, tr.length()) = tr.actions;
    c += tr.length();
  }
  return out;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_TRAJECTORY_HPP_
