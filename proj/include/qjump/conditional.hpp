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

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qjump/hilbert.hpp"

namespace qjump {

/// Rates for N two-level atoms in a resonant leaky cavity (hbar = 1).
///
/// Rate convention: gamma and kappa are amplitude decay rates, as in the
/// conditional Hamiltonian's -i*gamma*sigma^dag sigma and -i*kappa*b^dag b
/// terms. Populations decay at 2*gamma and 2*kappa; the jump operators are
/// sqrt(2 gamma) sigma_i and sqrt(2 kappa) b.
struct SystemParams {
  double g = 1.0;
  double kappa = 1.0;
  double gamma = 0.0;
  int n_atoms = 2;

  /// Throws InvalidArgument for negative or non-finite rates or n_atoms < 1.
  void validate() const;
  double max_rate() const;
};

struct RegimeReport {
  bool satisfied = false;
  /// gamma / min(kappa, g^2/kappa); compared against the threshold.
  double ratio = 0.0;
  double threshold = 0.0;
  std::string description;
};

/// Checks gamma << kappa, g^2/kappa as gamma <= threshold * min(kappa, g^2/kappa).
RegimeReport regime_check(const SystemParams& params, double threshold = 0.01);

struct JumpChannel {
  std::string label;
  OperatorMatrix op;
};
using JumpOperatorSet = std::vector<JumpChannel>;

/// One spontaneous-emission channel per atom ("atom0", "atom1", ...) followed
/// by the cavity leak ("cavity"). Channels with zero rate are kept so labels
/// stay stable.
JumpOperatorSet jump_operators(const SystemParams& params, const CompositeBasis& basis);

/// H_cond = i g sum_i (b sigma_i^dag - h.c.) - i gamma sum_i sigma_i^dag sigma_i - i kappa b^dag b.
OperatorMatrix build_h_cond(const SystemParams& params, const CompositeBasis& basis);

/// Coherent Jaynes-Cummings-type part i g sum_i (b sigma_i^dag - h.c.).
OperatorMatrix build_h_coupling(const SystemParams& params, const CompositeBasis& basis);

/// H - (i/2) sum_k L_k^dag L_k.
OperatorMatrix conditional_hamiltonian(const OperatorMatrix& h_coherent,
                                       const JumpOperatorSet& jumps);

/// Hermitian part recovered from a conditional Hamiltonian and its jumps.
OperatorMatrix coherent_part(const OperatorMatrix& h_cond, const JumpOperatorSet& jumps);

/// U_cond(t, 0) = exp(-i H_cond t) by scaling and squaring.
OperatorMatrix nojump_propagator(const OperatorMatrix& h_cond, double t);

/// U_cond(t, 0) psi0, unnormalized. Throws NumericalError on non-finite output.
StateVector propagate_nojump(const OperatorMatrix& h_cond, const StateVector& psi0, double t);

/// ||U_cond(t, 0) psi0||^2.
double no_jump_probability(const OperatorMatrix& h_cond, const StateVector& psi0, double t);

/// Biorthogonal eigen-system of a (generally non-Hermitian) matrix.
struct SpectralDecomposition {
  CVector eigenvalues;
  /// Columns are right eigenvectors |lambda_j>, unit norm.
  CMatrix right;
  /// Rows are left vectors <lambda^j| with <lambda^j|lambda_k> = delta_jk.
  CMatrix left;
  /// The decomposed matrix, kept for the Schur fallback.
  CMatrix matrix;
  double condition_number = 0.0;
  /// max |sum_j |lambda_j><lambda^j| - 1|.
  double completeness_residual = 0.0;
  /// Eigenvector matrix too ill-conditioned for the spectral propagator.
  bool ill_conditioned = false;
  /// Some pair of eigenvalues closer than the degeneracy tolerance.
  bool degenerate = false;
  std::vector<std::string> diagnostics;
};

SpectralDecomposition spectral_decompose(const CMatrix& h, double condition_limit = 1e8,
                                         double degeneracy_tol = 1e-9);
SpectralDecomposition spectral_decompose(const OperatorMatrix& h, double condition_limit = 1e8,
                                         double degeneracy_tol = 1e-9);

/// sum_j exp(-i lambda_j t) |lambda_j><lambda^j| psi. An ill-conditioned
/// decomposition falls back to Schur-based propagation and logs a warning.
CVector propagate_spectral(const SpectralDecomposition& decomposition, const CVector& psi0,
                           double t);
StateVector propagate_spectral(const SpectralDecomposition& decomposition,
                               const StateVector& psi0, double t);

/// Basis indices with total excitation (photons + excited atoms) equal to n.
std::vector<Index> excitation_indices(const CompositeBasis& basis, int n);

/// Restriction of an operator to the given basis indices.
CMatrix restrict_to(const OperatorMatrix& op, std::span<const Index> indices);

/// Eigenvalues of H_cond on the two-atom single-excitation sector, from the
/// characteristic polynomial: lambda_1 = -i gamma (the singlet |0a>), and
/// lambda_2/3 = (1/2i)(kappa + gamma +- i sqrt(8 g^2 - (kappa - gamma)^2))
/// with a complex square root. Requires n_atoms == 2.
std::array<Complex, 3> closed_form_eigenvalues(const SystemParams& params);

/// The same three values with the square-root argument taken as
/// 8 g^2 + (kappa - gamma)^2 and lambda_1 = 0. Agrees with the spectrum only
/// for kappa == gamma (and gamma == 0 for lambda_1); kept for comparison.
std::array<Complex, 3> plus_sign_closed_form_eigenvalues(const SystemParams& params);

/// Basis used by the two-atom scenarios: fock cutoff 1, two two-level atoms.
CompositeBasis two_atom_basis(int fock_cutoff = 1);

/// |0a> = |0>_cav (|01> - |10>)/sqrt(2).
StateVector singlet_target(const CompositeBasis& basis);

}  // namespace qjump
