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

#ifndef CORRECTIVE_IL_BASELINE_HPP_
#define CORRECTIVE_IL_BASELINE_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

#include "corrective_il/mlp.hpp"
#include "corrective_il/policy.hpp"
#include "corrective_il/rng.hpp"
#include "corrective_il/trajectory.hpp"

namespace corrective_il {

struct BaselineConfig {
  std::vector<int> hidden{32, 32};
  int epochs = 10;
  int batch_size = 64;
  double step_size = 1e-3;
  double return_scale = 10.0;
};

struct BaselineFit {
  double loss_before = 0;
  double loss_after = 0;
};

// State-value estimate from normalized observations plus the time fraction
// t / horizon. Starts at exactly zero (zero output layer).
class ValueBaseline {
 public:
  ValueBaseline() = default;

  ValueBaseline(int obs_dim, int horizon, const BaselineConfig& cfg, Rng& rng)
      : cfg_(cfg), horizon_(horizon), normalizer_(ObsNormalizer::Identity(obs_dim)) {
    std::vector<int> sizes{obs_dim + 1};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(1);
    net_ = Mlp(sizes);
    net_.InitRandom(rng, 0.0);
  }

  void set_normalizer(ObsNormalizer n) { normalizer_ = std::move(n); }
  const Mlp& net() const { return net_; }

  Eigen::MatrixXd Features(const Trajectory& tr) const {
    Eigen::MatrixXd f(net_.input_dim(), tr.length());
    f.topRows(tr.observations.rows()) = normalizer_.Apply(tr.observations);
    for (int t = 0; t < tr.length(); ++t) {
      f(f.rows() - 1, t) = static_cast<double>(t) / horizon_;
    }
    return f;
  }

  Eigen::VectorXd Predict(const Trajectory& tr) const {
    return net_.Forward(Features(tr)).row(0).transpose() * cfg_.return_scale;
  }

  // Minibatch Adam regression onto `returns`. Keeps the best parameters seen
  // (including the starting point), so the loss on the fitting data never
  // increases.
  BaselineFit Fit(const std::vector<Trajectory>& trajs,
                  const std::vector<Eigen::VectorXd>& returns, Rng& rng) {
    Eigen::Index n = 0;
    for (const auto& tr : trajs) n += tr.length();
    Eigen::MatrixXd x(net_.input_dim(), n);
    Eigen::RowVectorXd y(n);
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      x.middleCols(c, trajs[i].length()) = Features(trajs[i]);
      y.segment(c, trajs[i].length()) = returns[i].transpose() / cfg_.return_scale;
      c += trajs[i].length();
    }
    auto loss = [&] { return (net_.Forward(x) - y).squaredNorm() / static_cast<double>(n); };

    BaselineFit fit;
    fit.loss_before = loss();
    double best = fit.loss_before;
    Eigen::VectorXd best_params = net_.params();
    Adam adam(net_.num_params(), cfg_.step_size);
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::Index batch = std::max(1, cfg_.batch_size);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index m = std::min(batch, n - start);
        Eigen::MatrixXd xb(x.rows(), m);
        Eigen::RowVectorXd yb(m);
        for (Eigen::Index j = 0; j < m; ++j) {
          xb.col(j) = x.col(order[start + j]);
          yb(j) = y(order[start + j]);
        }
        Mlp::Cache cache;
        const Eigen::MatrixXd pred = net_.Forward(xb, &cache);
        const Eigen::MatrixXd cot = 2.0 * (pred - yb) / static_cast<double>(m);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(net_.num_params());
        net_.Backward(cache, cot, grad);
        adam.Step(net_.params(), grad);
      }
      const double l = loss();
      if (l < best) {
        best = l;
        best_params = net_.params();
      }
    }
    net_.params() = best_params;
    fit.loss_after = best;
    return fit;
  }

 private:
  BaselineConfig cfg_;
  int horizon_ = 1;
  ObsNormalizer normalizer_;
  Mlp net_;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_BASELINE_HPP_
