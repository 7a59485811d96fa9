// Copyright 2026 The qjump Authors
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


#include "qjump/lindblad.hpp"

#include <cmath>

#include "qjump/errors.hpp"

namespace qjump {

void validate_density(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidArgument("rho must be square");
  if (!rho.allFinite()) throw InvalidArgument("rho has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("rho is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > tol) throw InvalidArgument("rho does not have unit trace");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw InvalidArgument("rho is not positive semidefinite");
  }
}

CMatrix master_equation_oracle(const OperatorMatrix& h_cond, const JumpOperatorSet& jumps,
                               const CMatrix& rho0, double t, double dt) {
  validate_density(rho0);
  if (rho0.rows() != h_cond.dim()) throw InvalidArgument("rho0 and H_cond dimensions differ");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");

  const CMatrix a = Complex(0.0, -1.0) * h_cond.matrix();
  const CMatrix a_adj = a.adjoint();
  std::vector<CMatrix> ls;
  std::vector<CMatrix> ls_adj;
  for (const auto& j : jumps) {
    if (j.op.dim() != h_cond.dim()) throw InvalidArgument("jump operator dimension mismatch");
    ls.push_back(j.op.matrix());
    ls_adj.push_back(j.op.matrix().adjoint());
  }
  auto rhs = [&](const CMatrix& r) {
    CMatrix out = a * r + r * a_adj;
    for (std::size_t k = 0; k < ls.size(); ++k) out.noalias() += ls[k] * r * ls_adj[k];
    return out;
  };

  CMatrix rho = rho0;
  if (t == 0.0) return rho;
  const auto n = static_cast<long long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(n);
  for (long long s = 0; s < n; ++s) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + 0.5 * h * k1);
    const CMatrix k3 = rhs(rho + 0.5 * h * k2);
    const CMatrix k4 = rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!rho.allFinite()) throw NumericalError("master equation integration diverged");
  return rho;
}

CMatrix master_equation_oracle(const SystemParams& params, const CompositeBasis& basis,
                               const CMatrix& rho0, double t, double dt) {
  const JumpOperatorSet jumps = jump_operators(params, basis);
  return master_equation_oracle(build_h_cond(params, basis), jumps, rho0, t, dt);
}

}  // namespace qjump
