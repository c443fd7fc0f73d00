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

#ifndef CORRECTIVE_IL_POLICY_HPP_
#define CORRECTIVE_IL_POLICY_HPP_

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrective_il/env.hpp"
#include "corrective_il/mlp.hpp"
#include "corrective_il/rng.hpp"

namespace corrective_il {

// Per-dimension affine whitening of observations, frozen after fitting.
struct ObsNormalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static ObsNormalizer Identity(int dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }

  // Columns of `obs` are samples. `min_std` floors near-constant dims.
  static ObsNormalizer Fit(const Eigen::MatrixXd& obs, double min_std) {
    ObsNormalizer n;
    n.mean = obs.rowwise().mean();
    const Eigen::MatrixXd centered = obs.colwise() - n.mean;
    n.std = (centered.array().square().rowwise().sum() /
             static_cast<double>(obs.cols()))
                .sqrt()
                .max(min_std)
                .matrix();
    return n;
  }

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& obs) const {
    return (obs.colwise() - mean).array().colwise() / std.array();
  }

  bool operator==(const ObsNormalizer& o) const {
    return mean == o.mean && std == o.std;
  }
};

struct PolicyArch {
  std::vector<int> hidden{32, 32};
  double init_log_std = -0.5;
  double log_std_min = -2.5;
  double output_init_scale = 0.01;
};

// Diagonal Gaussian policy: mean = MLP(normalized obs), state-independent
// log std. Flat parameters are the mean network's (see Mlp) followed by
// log_std.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;

  GaussianPolicy(int obs_dim, int act_dim, const PolicyArch& arch, Rng& rng)
      : log_std_min_(arch.log_std_min),
        normalizer_(ObsNormalizer::Identity(obs_dim)) {
    std::vector<int> sizes{obs_dim};
    sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
    sizes.push_back(act_dim);
    mean_net_ = Mlp(sizes);
    mean_net_.InitRandom(rng, arch.output_init_scale);
    log_std_ = Eigen::VectorXd::Constant(act_dim, std::max(arch.init_log_std, log_std_min_));
  }

  int obs_dim() const { return mean_net_.input_dim(); }
  int act_dim() const { return mean_net_.output_dim(); }
  int num_params() const { return mean_net_.num_params() + act_dim(); }
  double log_std_min() const { return log_std_min_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  const Mlp& mean_net() const { return mean_net_; }
  const ObsNormalizer& normalizer() const { return normalizer_; }
  void set_normalizer(ObsNormalizer n) { normalizer_ = std::move(n); }

  Eigen::VectorXd GetParams() const {
    Eigen::VectorXd p(num_params());
    p << mean_net_.params(), log_std_;
    return p;
  }

  // log_std is projected onto [log_std_min, inf).
  void SetParams(const Eigen::VectorXd& p) {
    if (p.size() != num_params()) throw std::invalid_argument("policy parameter length mismatch");
    mean_net_.params() = p.head(mean_net_.num_params());
    log_std_ = p.tail(act_dim()).cwiseMax(log_std_min_);
  }

  Eigen::MatrixXd Mean(const Eigen::MatrixXd& obs, Mlp::Cache* cache = nullptr) const {
    return mean_net_.Forward(normalizer_.Apply(obs), cache);
  }

  Eigen::VectorXd MeanAction(const Eigen::VectorXd& obs) const {
    return Mean(obs).col(0);
  }

  // Draws u ~ N(mean, diag(std^2)); returns (u, log density of u).
  std::pair<Eigen::VectorXd, double> Sample(const Eigen::VectorXd& obs, Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXd mu = MeanAction(obs);
    Eigen::VectorXd u(act_dim());
    for (int j = 0; j < act_dim(); ++j) u(j) = mu(j) + std::exp(log_std_(j)) * normal(rng);
    return {u, LogDensity(mu, u)};
  }

  Eigen::VectorXd LogProb(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& act) const {
    const Eigen::MatrixXd mu = Mean(obs);
    Eigen::VectorXd out(obs.cols());
    for (Eigen::Index i = 0; i < obs.cols(); ++i) out(i) = LogDensity(mu.col(i), act.col(i));
    return out;
  }

  // sum_i w_i * grad log pi(act_i | obs_i).
  Eigen::VectorXd LogProbGrad(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& act,
                              const Eigen::VectorXd& weights) const {
    Mlp::Cache cache;
    const Eigen::MatrixXd mu = Mean(obs, &cache);
    const Eigen::ArrayXd inv_var = (-2.0 * log_std_.array()).exp();
    const Eigen::ArrayXXd diff = (act - mu).array();
    // d/dmu = (a - mu) / var;  d/dlog_std = (a - mu)^2 / var - 1.
    Eigen::MatrixXd cot = (diff.colwise() * inv_var).matrix() * weights.asDiagonal();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(num_params());
    mean_net_.Backward(cache, cot, grad.head(mean_net_.num_params()));
    grad.tail(act_dim()) =
        ((diff.square().colwise() * inv_var - 1.0).matrix() * weights);
    return grad;
  }

  // (F + damping I) v, F the Fisher information averaged over obs columns.
  // Mean block: J^T diag(1/var) J, computed as a JVP followed by a VJP.
  // log_std block: 2 I (no cross terms for a diagonal Gaussian).
  Eigen::VectorXd FisherVectorProduct(const Eigen::MatrixXd& obs, const Eigen::VectorXd& v,
                                      double damping) const {
    if (v.size() != num_params()) throw std::invalid_argument("FVP vector length mismatch");
    Mlp::Cache cache;
    Mean(obs, &cache);
    const int n_mean = mean_net_.num_params();
    const Eigen::VectorXd inv_var = (-2.0 * log_std_.array()).exp();
    const double inv_n = 1.0 / static_cast<double>(obs.cols());
    Eigen::MatrixXd jv = mean_net_.Jvp(cache, v.head(n_mean));
    jv = inv_var.asDiagonal() * jv * inv_n;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_params());
    mean_net_.Backward(cache, jv, out.head(n_mean));
    out.tail(act_dim()) = 2.0 * v.tail(act_dim());
    out += damping * v;
    return out;
  }

  // Mean over obs columns of KL(this || other).
  double MeanKl(const GaussianPolicy& other, const Eigen::MatrixXd& obs) const {
    const Eigen::MatrixXd mu_p = Mean(obs);
    const Eigen::MatrixXd mu_q = other.Mean(obs);
    const Eigen::ArrayXd var_p = (2.0 * log_std_.array()).exp();
    const Eigen::ArrayXd var_q = (2.0 * other.log_std_.array()).exp();
    const double const_part =
        (other.log_std_.array() - log_std_.array() + var_p / (2 * var_q) - 0.5).sum();
    const Eigen::ArrayXXd d2 = (mu_p - mu_q).array().square();
    const double quad = (d2.colwise() / (2 * var_q)).sum() / static_cast<double>(obs.cols());
    return const_part + quad;
  }

 private:
  double LogDensity(const Eigen::VectorXd& mu, const Eigen::VectorXd& u) const {
    double lp = 0;
    for (int j = 0; j < act_dim(); ++j) {
      const double z = (u(j) - mu(j)) * std::exp(-log_std_(j));
      lp += -0.5 * z * z - log_std_(j) - 0.5 * std::log(2 * std::numbers::pi);
    }
    return lp;
  }

  Mlp mean_net_;
  Eigen::VectorXd log_std_;
  double log_std_min_ = -2.5;
  ObsNormalizer normalizer_;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_POLICY_HPP_
