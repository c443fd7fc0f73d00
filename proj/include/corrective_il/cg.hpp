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

#ifndef CORRECTIVE_IL_CG_HPP_
#define CORRECTIVE_IL_CG_HPP_

#include <Eigen/Core>

#include <cmath>

namespace corrective_il {

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0;  // ||b - A x||, recomputed at exit
  bool finite = true;
};

// Conjugate gradient for A x = b with A symmetric positive definite and
// available only as a product `apply(v) -> A v`. Starts from x = 0.
template <typename ApplyFn>
CgResult ConjugateGradient(ApplyFn&& apply, const Eigen::VectorXd& b, int max_iters,
                           double tol = 1e-10) {
  CgResult out;
  out.x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (int i = 0; i < max_iters && rr > tol * tol; ++i) {
    const Eigen::VectorXd ap = apply(p);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap) || pap <= 0) {
      out.finite = std::isfinite(pap);
      break;
    }
    const double alpha = rr / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    out.iterations = i + 1;
  }
  out.residual_norm = (b - apply(out.x)).norm();
  out.finite = out.finite && out.x.allFinite() && std::isfinite(out.residual_norm);
  return out;
}

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_CG_HPP_
