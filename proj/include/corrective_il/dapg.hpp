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

#ifndef CORRECTIVE_IL_DAPG_HPP_
#define CORRECTIVE_IL_DAPG_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corrective_il/baseline.hpp"
#include "corrective_il/cg.hpp"
#include "corrective_il/demo.hpp"
#include "corrective_il/env.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/gae.hpp"
#include "corrective_il/parallel.hpp"
#include "corrective_il/policy.hpp"
#include "corrective_il/rng.hpp"
#include "corrective_il/trajectory.hpp"

namespace corrective_il {

struct TrainConfig {
  int iterations = 150;
  int rollouts_per_iter = 40;
  int horizon = 100;
  double gamma = 0.995;
  double gae_lambda = 0.97;
  double kl_step = 0.01;
  int cg_iters = 10;
  double cg_damping = 1e-4;
  int bc_epochs = 300;
  double bc_step_size = 1e-3;
  int bc_batch_size = 32;
  bool bc_fit_log_std = true;
  double demo_lambda0 = 0.1;
  double demo_lambda1 = 0.98;
  double demo_pseudo_advantage = 1.0;
  double obs_std_floor = 0.05;
  std::vector<double> checkpoint_fractions{0.25, 0.5, 0.75, 1.0};
  PolicyArch arch;
  BaselineConfig baseline;
  std::uint64_t seed = 0;
  int threads = 1;

  void Validate() const {
    if (iterations < 0) throw ValidationError("iterations must be >= 0");
    if (rollouts_per_iter < 1) throw ValidationError("rollouts_per_iter must be >= 1");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (!(gamma >= 0 && gamma <= 1)) throw ValidationError("gamma must lie in [0, 1]");
    if (!(gae_lambda >= 0 && gae_lambda <= 1)) {
      throw ValidationError("gae_lambda must lie in [0, 1]");
    }
    if (!(kl_step > 0)) throw ValidationError("kl_step must be > 0");
    if (cg_iters < 1) throw ValidationError("cg_iters must be >= 1");
    if (!(cg_damping >= 0)) throw ValidationError("cg_damping must be >= 0");
    if (!(demo_lambda0 >= 0)) throw ValidationError("demo_lambda0 must be >= 0");
    if (!(demo_lambda1 > 0 && demo_lambda1 <= 1)) {
      throw ValidationError("demo_lambda1 must lie in (0, 1]");
    }
    for (double f : checkpoint_fractions) {
      if (!(f > 0 && f <= 1)) throw ValidationError("checkpoint fractions must lie in (0, 1]");
    }
  }
};

// Weight of the demonstration term at iteration k: lambda0 * lambda1^k.
inline double DemoWeight(int k, const TrainConfig& cfg) {
  return cfg.demo_lambda0 * std::pow(cfg.demo_lambda1, k);
}

// Iteration counts (1-based, after that many updates) at which checkpoints
// are taken.
inline std::vector<int> CheckpointIterations(const TrainConfig& cfg) {
  std::set<int> its;
  for (double f : cfg.checkpoint_fractions) {
    its.insert(std::max(1, static_cast<int>(std::lround(f * cfg.iterations))));
  }
  return {its.begin(), its.end()};
}

// The oracle exposed through the policy interface: deterministic, and
// reports a log density of 0 for its own actions.
struct OraclePolicy {
  EnvConfig env;
  OracleController oracle;

  Eigen::VectorXd MeanAction(const Eigen::VectorXd& obs) const {
    return oracle(Observation(obs), env);
  }
  std::pair<Eigen::VectorXd, double> Sample(const Eigen::VectorXd& obs, Rng&) const {
    return {MeanAction(obs), 0.0};
  }
};

// Always outputs zero action.
struct NoOpPolicy {
  Eigen::VectorXd MeanAction(const Eigen::VectorXd&) const {
    return Eigen::VectorXd::Zero(kActDim);
  }
  std::pair<Eigen::VectorXd, double> Sample(const Eigen::VectorXd& obs, Rng&) const {
    return {MeanAction(obs), 0.0};
  }
};

template <typename Policy>
Trajectory RunEpisode(const Policy& policy, const TaskInstance& task, std::uint64_t seed,
                      int horizon, const EnvConfig& env) {
  Rng rng = MakeRng(seed);
  std::vector<Observation> obs;
  std::vector<Eigen::VectorXd> acts;
  std::vector<double> rewards;
  std::vector<double> log_probs;
  EnvState s = Reset(task, env);
  bool success = false;
  while (!IsDone(s, env) && s.t < horizon) {
    const Observation o = Observe(s);
    auto [u, lp] = policy.Sample(o, rng);
    const StepResult r = Step(s, ToEnvAction(PolicyAction(u), env), env);
    obs.push_back(o);
    acts.push_back(std::move(u));
    rewards.push_back(r.reward);
    log_probs.push_back(lp);
    s = r.next;
    success = r.success;
  }
  Trajectory tr;
  tr.task = task;
  tr.seed = seed;
  const auto n = static_cast<Eigen::Index>(obs.size());
  tr.observations.resize(kObsDim, n);
  tr.actions.resize(kActDim, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    tr.observations.col(t) = obs[t];
    tr.actions.col(t) = acts[t];
  }
  tr.rewards = Eigen::Map<const Eigen::VectorXd>(rewards.data(), n);
  tr.log_probs = Eigen::Map<const Eigen::VectorXd>(log_probs.data(), n);
  tr.success = success;
  tr.final_distance = BallGoalDistance(s);
  return tr;
}

// n on-policy episodes on tasks sampled from `region`. Episode i draws its
// task and action noise from DeriveSeed(seed, i), so the batch does not
// depend on `threads`. Training tasks never carry evaluation-set ids.
template <typename Policy>
std::vector<Trajectory> CollectRollouts(const Policy& policy, Region region, int n,
                                        std::uint64_t seed, const EnvConfig& env,
                                        int horizon, int threads = 1) {
  if (n < 1) throw ContractError("CollectRollouts: n must be >= 1");
  std::vector<Trajectory> trajs(n);
  ParallelFor(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const std::uint64_t s = DeriveSeed(seed, i);
    Rng task_rng = MakeRng(DeriveSeed(s, "task"));
    const TaskInstance task = SampleTask(region, task_rng, static_cast<TaskId>(i), env);
    if (task.task_id >= kEvalIdBase) throw ContractError("training task carries an eval id");
    trajs[i] = RunEpisode(policy, task, s, horizon, env);
  });
  return trajs;
}

struct DemoBatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd act;

  Eigen::Index size() const { return obs.cols(); }
};

inline DemoBatch StackDemos(const DemoSet& demos) {
  Eigen::Index n = 0;
  for (const auto& d : demos.demos) n += static_cast<Eigen::Index>(d.steps.size());
  DemoBatch b{Eigen::MatrixXd(kObsDim, n), Eigen::MatrixXd(kActDim, n)};
  Eigen::Index c = 0;
  for (const auto& d : demos.demos) {
    for (const auto& s : d.steps) {
      b.obs.col(c) = s.obs;
      b.act.col(c) = s.act;
      ++c;
    }
  }
  return b;
}

// Negative mean log-likelihood of the demo actions.
inline double BcLoss(const GaussianPolicy& policy, const DemoBatch& batch) {
  return -policy.LogProb(batch.obs, batch.act).mean();
}

struct BcStats {
  double loss_before = 0;
  double loss_after = 0;
};

// Behaviour cloning: minibatch Adam on the negative log-likelihood.
inline BcStats BcPretrain(GaussianPolicy& policy, const DemoSet& demos,
                          const TrainConfig& cfg, Rng& rng) {
  if (demos.demos.empty()) throw ValidationError("behaviour cloning needs demonstrations");
  const DemoBatch batch = StackDemos(demos);
  if (batch.size() == 0) throw ValidationError("demonstrations contain no steps");
  if (batch.obs.rows() != policy.obs_dim() || batch.act.rows() != policy.act_dim()) {
    throw ValidationError("demo dimensions do not match the policy");
  }
  BcStats stats;
  stats.loss_before = BcLoss(policy, batch);
  Eigen::VectorXd params = policy.GetParams();
  Adam adam(params.size(), cfg.bc_step_size);
  const Eigen::Index n = batch.size();
  const Eigen::Index bs = std::max(1, cfg.bc_batch_size);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.bc_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += bs) {
      const Eigen::Index m = std::min(bs, n - start);
      Eigen::MatrixXd ob(batch.obs.rows(), m);
      Eigen::MatrixXd ab(batch.act.rows(), m);
      for (Eigen::Index j = 0; j < m; ++j) {
        ob.col(j) = batch.obs.col(order[start + j]);
        ab.col(j) = batch.act.col(order[start + j]);
      }
      Eigen::VectorXd grad =
          -policy.LogProbGrad(ob, ab, Eigen::VectorXd::Constant(m, 1.0 / m));
      if (!cfg.bc_fit_log_std) grad.tail(policy.act_dim()).setZero();
      adam.Step(params, grad);
      policy.SetParams(params);
      params = policy.GetParams();
    }
  }
  stats.loss_after = BcLoss(policy, batch);
  return stats;
}

struct NpgStats {
  bool applied = false;
  double kl = 0;           // realized mean KL(old || new) on the batch
  double predicted_kl = 0; // 0.5 s^T F s after scaling
  double demo_weight = 0;
  double cg_residual = 0;  // ||F s - g|| / ||g|| before scaling
  BaselineFit baseline_fit;
  std::string diagnostic;
};

// Vanilla policy gradient on the rollouts plus the weighted demo term.
inline Eigen::VectorXd AugmentedGradient(const GaussianPolicy& policy,
                                         const Eigen::MatrixXd& obs,
                                         const Eigen::MatrixXd& act,
                                         const Eigen::VectorXd& advantages,
                                         const DemoBatch* demos, double demo_weight,
                                         double pseudo_advantage) {
  const double inv_n = 1.0 / static_cast<double>(obs.cols());
  Eigen::VectorXd g = policy.LogProbGrad(obs, act, advantages * inv_n);
  if (demos && demos->size() > 0 && demo_weight != 0.0) {
    const Eigen::Index m = demos->size();
    g += demo_weight *
         policy.LogProbGrad(demos->obs, demos->act,
                            Eigen::VectorXd::Constant(m, pseudo_advantage / m));
  }
  return g;
}

// One natural-gradient step at iteration k. The baseline is refit on the
// batch's empirical returns after the policy step. On a non-finite solve
// the policy is left untouched and `diagnostic` says why.
inline NpgStats NpgUpdate(GaussianPolicy& policy, ValueBaseline& baseline,
                          const std::vector<Trajectory>& trajs, const DemoBatch* demos,
                          int k, const TrainConfig& cfg, Rng& rng) {
  if (trajs.empty()) throw ContractError("NpgUpdate: empty batch");
  NpgStats stats;
  stats.demo_weight = DemoWeight(k, cfg);

  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::VectorXd> returns;
  values.reserve(trajs.size());
  returns.reserve(trajs.size());
  for (const auto& tr : trajs) {
    values.push_back(baseline.Predict(tr));
    returns.push_back(DiscountedReturns(tr.rewards, cfg.gamma));
  }
  const Eigen::VectorXd adv = GaeAdvantages(trajs, values, cfg.gamma, cfg.gae_lambda);
  const Eigen::MatrixXd obs = StackObservations(trajs);
  const Eigen::MatrixXd act = StackActions(trajs);

  const Eigen::VectorXd g = AugmentedGradient(policy, obs, act, adv, demos, stats.demo_weight,
                                              cfg.demo_pseudo_advantage);
  auto fvp = [&](const Eigen::VectorXd& v) {
    return policy.FisherVectorProduct(obs, v, cfg.cg_damping);
  };
  const CgResult cg = ConjugateGradient(fvp, g, cfg.cg_iters);
  const double g_norm = g.norm();
  stats.cg_residual = g_norm > 0 ? cg.residual_norm / g_norm : 0.0;
  const double sfs = cg.finite ? cg.x.dot(fvp(cg.x)) : 0.0;
  if (!cg.finite || !std::isfinite(sfs) || !g.allFinite()) {
    std::ostringstream msg;
    msg << "iteration " << k << ": conjugate gradient produced a non-finite direction";
    stats.diagnostic = msg.str();
  } else if (sfs > 0) {
    const double alpha = std::sqrt(2.0 * cfg.kl_step / sfs);
    const GaussianPolicy old = policy;
    policy.SetParams(policy.GetParams() + alpha * cg.x);
    stats.applied = true;
    stats.predicted_kl = 0.5 * alpha * alpha * sfs;
    stats.kl = old.MeanKl(policy, obs);
  } else {
    stats.diagnostic = "zero gradient; step skipped";
  }
  stats.baseline_fit = baseline.Fit(trajs, returns, rng);
  return stats;
}

struct TrainRecord {
  int iteration = 0;  // 1-based; stats of the rollouts used by this update
  double mean_return = 0;
  double success_ratio = 0;
  double kl = 0;
  double demo_weight = 0;
  double wall_time_s = 0;

  // Wall time is excluded: everything else is a pure function of the inputs.
  bool operator==(const TrainRecord& o) const {
    return iteration == o.iteration && mean_return == o.mean_return &&
           success_ratio == o.success_ratio && kl == o.kl && demo_weight == o.demo_weight;
  }
};

struct TrainLog {
  double bc_loss_before = 0;
  double bc_loss_after = 0;
  std::vector<TrainRecord> records;

  bool operator==(const TrainLog&) const = default;

  // First iteration whose training-rollout success ratio is >= threshold,
  // or -1.
  int FirstCrossing(double threshold) const {
    for (const auto& r : records) {
      if (r.success_ratio >= threshold) return r.iteration;
    }
    return -1;
  }
};

struct TrainResult {
  GaussianPolicy policy;
  TrainLog log;
};

using CheckpointFn = std::function<void(int iteration, const GaussianPolicy&)>;

inline GaussianPolicy InitialPolicy(const TrainConfig& cfg) {
  Rng rng = MakeRng(DeriveSeed(cfg.seed, "policy-init"));
  return GaussianPolicy(kObsDim, kActDim, cfg.arch, rng);
}

// Behaviour cloning on `demos` (skipped when empty), then cfg.iterations of
// rollouts in `region` -> GAE -> augmented NPG step. A pure function of
// (cfg, demos, region, env) apart from wall times.
inline TrainResult Train(const TrainConfig& cfg, const DemoSet& demos, Region region,
                         const EnvConfig& env, const CheckpointFn& on_checkpoint = {}) {
  cfg.Validate();
  env.Validate();
  if (cfg.horizon > env.horizon) throw ValidationError("train horizon exceeds env horizon");
  for (const auto& d : demos.demos) {
    if (d.task.task_id >= kEvalIdBase) throw ContractError("demonstration carries an eval id");
  }
  TrainResult result;
  GaussianPolicy& policy = result.policy;
  policy = InitialPolicy(cfg);
  Rng baseline_rng = MakeRng(DeriveSeed(cfg.seed, "baseline"));
  ValueBaseline baseline(kObsDim, cfg.horizon, cfg.baseline, baseline_rng);

  const std::uint64_t rollout_seed = DeriveSeed(cfg.seed, "rollouts");
  DemoBatch demo_batch;
  if (!demos.demos.empty()) {
    demo_batch = StackDemos(demos);
    policy.set_normalizer(ObsNormalizer::Fit(demo_batch.obs, cfg.obs_std_floor));
    Rng bc_rng = MakeRng(DeriveSeed(cfg.seed, "bc"));
    const BcStats bc = BcPretrain(policy, demos, cfg, bc_rng);
    result.log.bc_loss_before = bc.loss_before;
    result.log.bc_loss_after = bc.loss_after;
  } else {
    const auto warmup = CollectRollouts(policy, region, cfg.rollouts_per_iter,
                                        DeriveSeed(cfg.seed, "normalizer"), env,
                                        cfg.horizon, cfg.threads);
    policy.set_normalizer(ObsNormalizer::Fit(StackObservations(warmup), cfg.obs_std_floor));
  }
  baseline.set_normalizer(policy.normalizer());

  const std::vector<int> checkpoints = CheckpointIterations(cfg);
  for (int k = 0; k < cfg.iterations; ++k) {
    const auto start = std::chrono::steady_clock::now();
    const auto trajs = CollectRollouts(policy, region, cfg.rollouts_per_iter,
                                       DeriveSeed(rollout_seed, static_cast<std::uint64_t>(k)),
                                       env, cfg.horizon, cfg.threads);
    TrainRecord rec;
    rec.iteration = k + 1;
    double ret = 0;
    int wins = 0;
    for (const auto& tr : trajs) {
      ret += tr.rewards.sum();
      wins += tr.success ? 1 : 0;
    }
    rec.mean_return = ret / static_cast<double>(trajs.size());
    rec.success_ratio = static_cast<double>(wins) / static_cast<double>(trajs.size());

    Rng update_rng = MakeRng(DeriveSeed(cfg.seed, 0x1000000ULL + static_cast<std::uint64_t>(k)));
    const NpgStats stats =
        NpgUpdate(policy, baseline, trajs, demos.demos.empty() ? nullptr : &demo_batch, k,
                  cfg, update_rng);
    rec.kl = stats.kl;
    rec.demo_weight = stats.demo_weight;
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.records.push_back(rec);
    if (on_checkpoint && std::binary_search(checkpoints.begin(), checkpoints.end(), k + 1)) {
      on_checkpoint(k + 1, policy);
    }
  }
  return result;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_DAPG_HPP_
