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

#ifndef CORRECTIVE_IL_ARTIFACTS_HPP_
#define CORRECTIVE_IL_ARTIFACTS_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrective_il/dapg.hpp"
#include "corrective_il/errors.hpp"
#include "corrective_il/policy.hpp"

namespace corrective_il {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

// Checkpoint layout (little-endian):
//   char[8]  magic "CILCKPT\0"
//   u32      format version (1)
//   u64      config hash
//   u32      obs_dim, act_dim, number of hidden layers, hidden sizes...
//   f64      log_std_min
//   u64      parameter count, then f64 parameters (policy flat order)
//   f64      normalizer mean[obs_dim], normalizer std[obs_dim]
inline constexpr char kCheckpointMagic[8] = {'C', 'I', 'L', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  GaussianPolicy policy;
  std::uint64_t config_hash = 0;
};

namespace detail {
template <typename T>
void WritePod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("checkpoint truncated");
  return v;
}
}  // namespace detail

inline void SaveCheckpoint(const fs::path& path, const GaussianPolicy& policy,
                           std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::WritePod(out, kCheckpointVersion);
  detail::WritePod(out, config_hash);
  const auto& sizes = policy.mean_net().sizes();
  detail::WritePod(out, static_cast<std::uint32_t>(policy.obs_dim()));
  detail::WritePod(out, static_cast<std::uint32_t>(policy.act_dim()));
  detail::WritePod(out, static_cast<std::uint32_t>(sizes.size() - 2));
  for (std::size_t l = 1; l + 1 < sizes.size(); ++l) {
    detail::WritePod(out, static_cast<std::uint32_t>(sizes[l]));
  }
  detail::WritePod(out, policy.log_std_min());
  const Eigen::VectorXd p = policy.GetParams();
  detail::WritePod(out, static_cast<std::uint64_t>(p.size()));
  out.write(reinterpret_cast<const char*>(p.data()), p.size() * sizeof(double));
  const auto& n = policy.normalizer();
  out.write(reinterpret_cast<const char*>(n.mean.data()), n.mean.size() * sizeof(double));
  out.write(reinterpret_cast<const char*>(n.std.data()), n.std.size() * sizeof(double));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline Checkpoint LoadCheckpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ValidationError(path.string() + " is not a checkpoint");
  }
  const auto version = detail::ReadPod<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.config_hash = detail::ReadPod<std::uint64_t>(in);
  const auto obs_dim = detail::ReadPod<std::uint32_t>(in);
  const auto act_dim = detail::ReadPod<std::uint32_t>(in);
  const auto n_hidden = detail::ReadPod<std::uint32_t>(in);
  if (n_hidden > 64) throw ValidationError("corrupt checkpoint header");
  PolicyArch arch;
  arch.hidden.clear();
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    arch.hidden.push_back(static_cast<int>(detail::ReadPod<std::uint32_t>(in)));
  }
  arch.log_std_min = detail::ReadPod<double>(in);
  Rng rng(0);
  ck.policy = GaussianPolicy(static_cast<int>(obs_dim), static_cast<int>(act_dim), arch, rng);
  const auto n_params = detail::ReadPod<std::uint64_t>(in);
  if (n_params != static_cast<std::uint64_t>(ck.policy.num_params())) {
    throw ValidationError("checkpoint parameter count mismatch");
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(n_params));
  in.read(reinterpret_cast<char*>(p.data()), p.size() * sizeof(double));
  ObsNormalizer n{Eigen::VectorXd(obs_dim), Eigen::VectorXd(obs_dim)};
  in.read(reinterpret_cast<char*>(n.mean.data()), n.mean.size() * sizeof(double));
  in.read(reinterpret_cast<char*>(n.std.data()), n.std.size() * sizeof(double));
  if (!in) throw ValidationError("checkpoint truncated");
  ck.policy.SetParams(p);
  ck.policy.set_normalizer(std::move(n));
  return ck;
}

// CSV with a commented header describing provenance and columns.
inline void WriteTrainLogCsv(const fs::path& path, const TrainLog& log,
                             std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::trunc);
  out << "# config_hash=" << HashHex(config_hash) << "\n"
      << "# bc_loss_before=" << std::setprecision(17) << log.bc_loss_before
      << " bc_loss_after=" << log.bc_loss_after << "\n"
      << "# iteration: 1-based update index; mean_return and success_ratio are over the\n"
      << "# training rollouts collected before that update; kl is the realized mean\n"
      << "# KL(old||new); demo_weight is the demo-term weight; wall_time_s is seconds.\n"
      << "iteration,mean_return,success_ratio,kl,demo_weight,wall_time_s\n";
  for (const auto& r : log.records) {
    out << r.iteration << ',' << r.mean_return << ',' << r.success_ratio << ',' << r.kl
        << ',' << r.demo_weight << ',' << r.wall_time_s << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_ARTIFACTS_HPP_
