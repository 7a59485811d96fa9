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

#include "qjump/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qjump/errors.hpp"
#include "qjump/expm.hpp"
#include "qjump/log.hpp"

namespace qjump {

void SystemParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument(std::string(name) + " must be finite and >= 0");
    }
  };
  check(g, "g");
  check(kappa, "kappa");
  check(gamma, "gamma");
  if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
}

double SystemParams::max_rate() const { return std::max({g, kappa, gamma}); }

RegimeReport regime_check(const SystemParams& params, double threshold) {
  params.validate();
  RegimeReport r;
  r.threshold = threshold;
  const double scale = params.kappa > 0.0
                           ? std::min(params.kappa, params.g * params.g / params.kappa)
                           : 0.0;
  if (scale <= 0.0) {
    r.ratio = params.gamma > 0.0 ? INFINITY : 0.0;
    r.satisfied = false;
    r.description = "Gamma << kappa, g^2/kappa undefined for kappa = 0 or g = 0";
    return r;
  }
  r.ratio = params.gamma / scale;
  r.satisfied = r.ratio <= threshold;
  std::ostringstream d;
  d << "Gamma/min(kappa, g^2/kappa) = " << r.ratio << (r.satisfied ? " <= " : " > ") << threshold;
  r.description = d.str();
  return r;
}

namespace {

void check_layout(const SystemParams& params, const CompositeBasis& basis) {
  params.validate();
  if (basis.n_modes() != 1) throw InvalidArgument("expected a single-mode basis");
  if (basis.n_atoms() != params.n_atoms) {
    throw InvalidArgument("basis has " + std::to_string(basis.n_atoms()) +
                          " atoms but params specify " + std::to_string(params.n_atoms));
  }
  for (int d : basis.atom_dims()) {
    if (d != 2) throw InvalidArgument("conditional Hamiltonian requires two-level atoms");
  }
}

}  // namespace

JumpOperatorSet jump_operators(const SystemParams& params, const CompositeBasis& basis) {
  check_layout(params, basis);
  JumpOperatorSet jumps;
  const double atom_amp = std::sqrt(2.0 * params.gamma);
  for (int a = 0; a < basis.n_atoms(); ++a) {
    jumps.push_back({"atom" + std::to_string(a), lowering_op(basis, a, 1, 0) * atom_amp});
  }
  jumps.push_back({"cavity", cavity_annihilation(basis) * std::sqrt(2.0 * params.kappa)});
  return jumps;
}

OperatorMatrix build_h_coupling(const SystemParams& params, const CompositeBasis& basis) {
  check_layout(params, basis);
  const OperatorMatrix b = cavity_annihilation(basis);
  OperatorMatrix h = OperatorMatrix::zero(basis);
  for (int a = 0; a < basis.n_atoms(); ++a) {
    const OperatorMatrix sigma = lowering_op(basis, a, 1, 0);
    const OperatorMatrix term = b * sigma.adjoint();
    h = h + (term - term.adjoint()) * Complex(0.0, params.g);
  }
  return h;
}

OperatorMatrix build_h_cond(const SystemParams& params, const CompositeBasis& basis) {
  return conditional_hamiltonian(build_h_coupling(params, basis), jump_operators(params, basis));
}

OperatorMatrix conditional_hamiltonian(const OperatorMatrix& h_coherent,
                                       const JumpOperatorSet& jumps) {
  CMatrix m = h_coherent.matrix();
  for (const auto& j : jumps) {
    if (!(j.op.basis() == h_coherent.basis())) {
      throw InvalidArgument("jump operator '" + j.label + "' lives in a different basis");
    }
    m -= Complex(0.0, 0.5) * (j.op.matrix().adjoint() * j.op.matrix());
  }
  return OperatorMatrix(h_coherent.basis(), std::move(m));
}

OperatorMatrix coherent_part(const OperatorMatrix& h_cond, const JumpOperatorSet& jumps) {
  CMatrix m = h_cond.matrix();
  for (const auto& j : jumps) m += Complex(0.0, 0.5) * (j.op.matrix().adjoint() * j.op.matrix());
  return OperatorMatrix(h_cond.basis(), std::move(m));
}

OperatorMatrix nojump_propagator(const OperatorMatrix& h_cond, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagation time must be >= 0");
  return OperatorMatrix(h_cond.basis(), expm(Complex(0.0, -t) * h_cond.matrix()));
}

StateVector propagate_nojump(const OperatorMatrix& h_cond, const StateVector& psi0, double t) {
  if (!psi0.is_finite()) throw NumericalError("non-finite initial amplitudes");
  StateVector out = nojump_propagator(h_cond, t).apply(psi0);
  if (!out.is_finite()) throw NumericalError("no-jump propagation produced non-finite amplitudes");
  return out;
}

double no_jump_probability(const OperatorMatrix& h_cond, const StateVector& psi0, double t) {
  return propagate_nojump(h_cond, psi0, t).norm_squared();
}

// ---------------------------------------------------------------------------
// Spectral form

SpectralDecomposition spectral_decompose(const CMatrix& h, double condition_limit,
                                         double degeneracy_tol) {
  if (h.rows() != h.cols()) throw InvalidArgument("spectral decomposition of non-square matrix");
  SpectralDecomposition d;
  d.matrix = h;
  Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  d.eigenvalues = solver.eigenvalues();
  d.right = solver.eigenvectors();
  const Index n = h.rows();

  Eigen::JacobiSVD<CMatrix> svd(d.right);
  const auto& s = svd.singularValues();
  d.condition_number = s(n - 1) > 0.0 ? s(0) / s(n - 1) : INFINITY;

  const double scale = std::max(1.0, d.eigenvalues.cwiseAbs().maxCoeff());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(d.eigenvalues(i) - d.eigenvalues(j)) <= degeneracy_tol * scale) {
        d.degenerate = true;
        std::ostringstream msg;
        msg << "eigenvalues " << i << " and " << j << " coincide (" << d.eigenvalues(i) << ")";
        d.diagnostics.push_back(msg.str());
      }
    }
  }

  if (d.condition_number > condition_limit) {
    d.ill_conditioned = true;
    std::ostringstream msg;
    msg << "eigenvector matrix condition number " << d.condition_number << " exceeds "
        << condition_limit << " (defective or nearly defective matrix)";
    d.diagnostics.push_back(msg.str());
  }
  if (std::isfinite(d.condition_number) && d.condition_number < 1e15) {
    d.left = d.right.partialPivLu().inverse();
    d.completeness_residual =
        (d.right * d.left - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  } else {
    d.left = CMatrix::Zero(n, n);
    d.completeness_residual = INFINITY;
  }
  return d;
}

SpectralDecomposition spectral_decompose(const OperatorMatrix& h, double condition_limit,
                                         double degeneracy_tol) {
  return spectral_decompose(h.matrix(), condition_limit, degeneracy_tol);
}

CVector propagate_spectral(const SpectralDecomposition& d, const CVector& psi0, double t) {
  if (psi0.size() != d.matrix.rows()) throw InvalidArgument("state/decomposition size mismatch");
  if (d.ill_conditioned) {
    warn("spectral propagation: ill-conditioned eigenbasis, using Schur form instead");
    Eigen::ComplexSchur<CMatrix> schur(d.matrix);
    const CMatrix& q = schur.matrixU();
    const CMatrix& tri = schur.matrixT();
    CMatrix u = q * expm(Complex(0.0, -t) * tri) * q.adjoint();
    return u * psi0;
  }
  CVector coeff = d.left * psi0;
  for (Index j = 0; j < coeff.size(); ++j) coeff(j) *= std::exp(Complex(0.0, -t) * d.eigenvalues(j));
  return d.right * coeff;
}

StateVector propagate_spectral(const SpectralDecomposition& d, const StateVector& psi0, double t) {
  return StateVector(psi0.basis(), propagate_spectral(d, psi0.amps(), t));
}

std::vector<Index> excitation_indices(const CompositeBasis& basis, int n) {
  std::vector<Index> out;
  for (Index i = 0; i < basis.dim(); ++i) {
    int total = 0;
    for (int f = 0; f < basis.n_factors(); ++f) total += basis.digit(i, f);
    if (total == n) out.push_back(i);
  }
  return out;
}

CMatrix restrict_to(const OperatorMatrix& op, std::span<const Index> indices) {
  const Index k = static_cast<Index>(indices.size());
  CMatrix m(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) m(r, c) = op(indices[r], indices[c]);
  }
  return m;
}

std::array<Complex, 3> closed_form_eigenvalues(const SystemParams& params) {
  params.validate();
  if (params.n_atoms != 2) throw InvalidArgument("closed form holds for two atoms only");
  const double k = params.kappa;
  const double gm = params.gamma;
  const Complex root = std::sqrt(Complex(8.0 * params.g * params.g - (k - gm) * (k - gm), 0.0));
  const Complex inv2i = 1.0 / Complex(0.0, 2.0);
  return {Complex(0.0, -gm), inv2i * (k + gm + kI * root), inv2i * (k + gm - kI * root)};
}

std::array<Complex, 3> plus_sign_closed_form_eigenvalues(const SystemParams& params) {
  params.validate();
  if (params.n_atoms != 2) throw InvalidArgument("closed form holds for two atoms only");
  const double k = params.kappa;
  const double gm = params.gamma;
  const double root = std::sqrt(8.0 * params.g * params.g + (k - gm) * (k - gm));
  const Complex inv2i = 1.0 / Complex(0.0, 2.0);
  return {Complex(0.0), inv2i * (k + gm + kI * root), inv2i * (k + gm - kI * root)};
}

CompositeBasis two_atom_basis(int fock_cutoff) { return build_basis(fock_cutoff, {2, 2}); }

StateVector singlet_target(const CompositeBasis& basis) { return singlet_state(basis, 0, 1); }

}  // namespace qjump
