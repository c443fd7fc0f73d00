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

#ifndef CORRECTIVE_IL_MLP_HPP_
#define CORRECTIVE_IL_MLP_HPP_

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "corrective_il/rng.hpp"

namespace corrective_il {

// Fully-connected network, tanh hidden units, linear output. Batches are
// column-major: one sample per column.
//
// Flat parameter layout, layer by layer from the input side: the weight
// matrix W (out x in, column-major) followed by the bias b (out).
class Mlp {
 public:
  struct Cache {
    // activations[0] is the input; activations[l] the tanh output of hidden
    // layer l. The linear output is not cached.
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;

  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 layer sizes");
    int n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      offsets_.push_back(n);
      n += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
    }
    params_ = Eigen::VectorXd::Zero(n);
  }

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int num_params() const { return static_cast<int>(params_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& params() { return params_; }

  // Uniform Glorot init; the output layer is shrunk by `output_scale` so a
  // fresh policy starts near zero mean.
  void InitRandom(Rng& rng, double output_scale = 1.0) {
    for (int l = 0; l < num_layers(); ++l) {
      const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
      std::uniform_real_distribution<double> u(-limit, limit);
      auto w = Weights(params_.data(), l);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          w(i, j) = u(rng) * (l + 1 == num_layers() ? output_scale : 1.0);
        }
      }
      Bias(params_.data(), l).setZero();
    }
  }

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const {
    if (x.rows() != input_dim()) throw std::invalid_argument("Mlp input dimension mismatch");
    if (cache) {
      cache->activations.assign(1, x);
    }
    Eigen::MatrixXd h = x;
    for (int l = 0; l < num_layers(); ++l) {
      Eigen::MatrixXd z = Weights(params_.data(), l) * h;
      z.colwise() += Bias(params_.data(), l);
      if (l + 1 == num_layers()) return z;
      h = z.array().tanh().matrix();
      if (cache) cache->activations.push_back(h);
    }
    return h;
  }

  // grad += sum over the batch of (d output / d params)^T cot.
  void Backward(const Cache& cache, const Eigen::MatrixXd& cot,
                Eigen::Ref<Eigen::VectorXd> grad) const {
    Eigen::MatrixXd delta = cot;
    for (int l = num_layers() - 1; l >= 0; --l) {
      const Eigen::MatrixXd& h = cache.activations[l];
      Weights(grad.data(), l).noalias() += delta * h.transpose();
      Bias(grad.data(), l) += delta.rowwise().sum();
      if (l > 0) {
        Eigen::MatrixXd back = Weights(params_.data(), l).transpose() * delta;
        delta = back.array() * (1.0 - h.array().square());
      }
    }
  }

  // Directional derivative of the output along parameter direction v.
  Eigen::MatrixXd Jvp(const Cache& cache, const Eigen::Ref<const Eigen::VectorXd>& v) const {
    const Eigen::Index batch = cache.activations[0].cols();
    Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(input_dim(), batch);
    for (int l = 0; l < num_layers(); ++l) {
      const Eigen::MatrixXd& h = cache.activations[l];
      Eigen::MatrixXd dz = Weights(v.data(), l) * h;
      if (l > 0) dz.noalias() += Weights(params_.data(), l) * dh;
      dz.colwise() += Bias(v.data(), l);
      if (l + 1 == num_layers()) return dz;
      const Eigen::MatrixXd& next = cache.activations[l + 1];
      dh = dz.array() * (1.0 - next.array().square());
    }
    return dh;
  }

 private:
  Eigen::Map<Eigen::MatrixXd> Weights(double* flat, int l) const {
    return {flat + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<const Eigen::MatrixXd> Weights(const double* flat, int l) const {
    return {flat + offsets_[l], sizes_[l + 1], sizes_[l]};
  }
  Eigen::Map<Eigen::VectorXd> Bias(double* flat, int l) const {
    return {flat + offsets_[l] + sizes_[l + 1] * sizes_[l], sizes_[l + 1]};
  }
  Eigen::Map<const Eigen::VectorXd> Bias(const double* flat, int l) const {
    return {flat + offsets_[l] + sizes_[l + 1] * sizes_[l], sizes_[l + 1]};
  }

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  Eigen::VectorXd params_;
};

// Adam on a flat parameter vector (minimizes).
class Adam {
 public:
  explicit Adam(Eigen::Index n, double step_size, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : m_(Eigen::VectorXd::Zero(n)),
        v_(Eigen::VectorXd::Zero(n)),
        step_size_(step_size),
        beta1_(beta1),
        beta2_(beta2),
        eps_(eps) {}

  void Step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1 - beta1_) * grad;
    v_ = beta2_ * v_ + (1 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1 - std::pow(beta1_, t_);
    const double c2 = 1 - std::pow(beta2_, t_);
    params.array() -= step_size_ * (m_.array() / c1) /
                      ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double step_size_;
  double beta1_;
  double beta2_;
  double eps_;
  int t_ = 0;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_MLP_HPP_
