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

#ifndef CORRECTIVE_IL_GAE_HPP_
#define CORRECTIVE_IL_GAE_HPP_

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "corrective_il/trajectory.hpp"

namespace corrective_il {

// Generalized advantage estimates for one trajectory, before any batch
// normalization. `values` holds V(s_t) for each step; the state after the
// last step is terminal (value 0), both on success and at the horizon.
inline Eigen::VectorXd GaeRaw(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                              double gamma, double lambda) {
  if (rewards.size() != values.size()) throw std::invalid_argument("GAE: length mismatch");
  const Eigen::Index n = rewards.size();
  Eigen::VectorXd adv(n);
  double acc = 0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double next_value = t + 1 < n ? values(t + 1) : 0.0;
    const double delta = rewards(t) + gamma * next_value - values(t);
    acc = delta + gamma * lambda * acc;
    adv(t) = acc;
  }
  return adv;
}

// Shift to zero mean and scale to unit (population) variance.
inline Eigen::VectorXd NormalizeAdvantages(const Eigen::VectorXd& adv) {
  if (adv.size() == 0) return adv;
  const double mean = adv.mean();
  const double var = (adv.array() - mean).square().mean();
  return (adv.array() - mean) / (std::sqrt(var) + 1e-8);
}

// Batch advantages in trajectory order, normalized across the batch.
inline Eigen::VectorXd GaeAdvantages(const std::vector<Trajectory>& trajs,
                                     const std::vector<Eigen::VectorXd>& values,
                                     double gamma, double lambda, bool normalize = true) {
  Eigen::Index n = 0;
  for (const auto& tr : trajs) n += tr.length();
  Eigen::VectorXd adv(n);
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    adv.segment(c, trajs[i].length()) = GaeRaw(trajs[i].rewards, values[i], gamma, lambda);
    c += trajs[i].length();
  }
  return normalize ? NormalizeAdvantages(adv) : adv;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_GAE_HPP_
