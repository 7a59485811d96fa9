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

#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qjump {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr Index kDefaultDimensionLimit = 4096;

/// Ordered product basis of cavity Fock spaces and atomic level spaces.
///
/// Kets are enumerated row-major over the factors (mode 0, mode 1, ...,
/// atom 0, atom 1, ...): the first cavity mode is the slowest index and the
/// last atom the fastest. Within a factor the level number is the digit, so
/// for one mode and two two-level atoms |n a1 a2> sits at index 4n + 2a1 + a2
/// and |010> is index 2.
class CompositeBasis {
 public:
  struct Label {
    std::vector<int> photons;
    std::vector<int> levels;
  };

  CompositeBasis(std::vector<int> mode_cutoffs, std::vector<int> atom_dims,
                 Index dim_limit = kDefaultDimensionLimit);

  Index dim() const noexcept { return dim_; }
  int n_modes() const noexcept { return static_cast<int>(mode_cutoffs_.size()); }
  int n_atoms() const noexcept { return static_cast<int>(atom_dims_.size()); }
  int fock_cutoff(int mode = 0) const;
  const std::vector<int>& mode_cutoffs() const noexcept { return mode_cutoffs_; }
  const std::vector<int>& atom_dims() const noexcept { return atom_dims_; }

  /// Number of tensor factors (modes followed by atoms) and their sizes.
  int n_factors() const noexcept { return static_cast<int>(radices_.size()); }
  int factor_dim(int factor) const { return radices_.at(factor); }
  int mode_factor(int mode) const;
  int atom_factor(int atom) const;

  Label decompose(Index index) const;
  Index index_of(std::span<const int> photons, std::span<const int> levels) const;
  /// Single-mode convenience: index_of(n, {a1, a2, ...}).
  Index index_of(int photons, std::initializer_list<int> levels) const;

  /// Digit of `factor` in basis index `index`.
  int digit(Index index, int factor) const;

  /// "|n a1 a2 ...>" with modes first; multi-digit levels are comma separated.
  std::string ket_label(Index index) const;

  bool operator==(const CompositeBasis& other) const {
    return mode_cutoffs_ == other.mode_cutoffs_ && atom_dims_ == other.atom_dims_;
  }

 private:
  std::vector<int> mode_cutoffs_;
  std::vector<int> atom_dims_;
  std::vector<int> radices_;
  std::vector<Index> strides_;
  Index dim_ = 0;
};

/// Single cavity mode with `fock_cutoff` plus atoms of the given dimensions.
CompositeBasis build_basis(int fock_cutoff, std::vector<int> atom_dims,
                           Index dim_limit = kDefaultDimensionLimit);

/// Several cavity modes (e.g. the two cavities of the teleportation setup).
CompositeBasis build_multimode_basis(std::vector<int> mode_cutoffs, std::vector<int> atom_dims,
                                     Index dim_limit = kDefaultDimensionLimit);

/// Complex amplitudes over a CompositeBasis. Conditional states may be
/// sub-normalized.
class StateVector {
 public:
  StateVector(CompositeBasis basis, CVector amps);

  static StateVector zero(const CompositeBasis& basis);
  static StateVector basis_ket(const CompositeBasis& basis, Index index);

  const CompositeBasis& basis() const noexcept { return basis_; }
  const CVector& amps() const noexcept { return amps_; }
  Index dim() const noexcept { return amps_.size(); }
  Complex operator[](Index i) const { return amps_(i); }

  double norm_squared() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }
  bool is_finite() const { return amps_.allFinite(); }

  /// Throws NumericalError for a zero or non-finite vector.
  StateVector normalized() const;

  /// <this|other>
  Complex inner(const StateVector& other) const;

  StateVector operator+(const StateVector& other) const;
  StateVector operator-(const StateVector& other) const;
  StateVector operator*(Complex scale) const;

 private:
  CompositeBasis basis_;
  CVector amps_;
};

inline StateVector operator*(Complex scale, const StateVector& psi) { return psi * scale; }

/// Dense (generally non-Hermitian) operator over a CompositeBasis.
class OperatorMatrix {
 public:
  OperatorMatrix(CompositeBasis basis, CMatrix entries);

  static OperatorMatrix identity(const CompositeBasis& basis);
  static OperatorMatrix zero(const CompositeBasis& basis);

  const CompositeBasis& basis() const noexcept { return basis_; }
  const CMatrix& matrix() const noexcept { return entries_; }
  Index dim() const noexcept { return entries_.rows(); }
  Complex operator()(Index row, Index col) const { return entries_(row, col); }

  StateVector apply(const StateVector& psi) const;
  OperatorMatrix adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;

  OperatorMatrix operator*(const OperatorMatrix& other) const;
  OperatorMatrix operator+(const OperatorMatrix& other) const;
  OperatorMatrix operator-(const OperatorMatrix& other) const;
  OperatorMatrix operator*(Complex scale) const;

 private:
  CompositeBasis basis_;
  CMatrix entries_;
};

inline OperatorMatrix operator*(Complex scale, const OperatorMatrix& op) { return op * scale; }

/// Embeds a local operator acting on one factor as local ⊗ identity elsewhere.
OperatorMatrix embed_local(const CompositeBasis& basis, int factor, const CMatrix& local);

/// |to><from| on atom `atom_index`; requires from_level > to_level.
/// For a two-level atom with (1, 0) this is sigma_i.
OperatorMatrix lowering_op(const CompositeBasis& basis, int atom_index, int from_level,
                           int to_level);

/// Generic |row><col| transition on one atom (no ordering constraint).
OperatorMatrix atom_transition(const CompositeBasis& basis, int atom_index, int row_level,
                               int col_level);

/// Truncated ladder operator b|n> = sqrt(n)|n-1> on cavity mode `mode`.
OperatorMatrix cavity_annihilation(const CompositeBasis& basis, int mode = 0);

/// b^dagger b on cavity mode `mode`.
OperatorMatrix photon_number(const CompositeBasis& basis, int mode = 0);

/// J_- = sum_i sigma_i over all atoms; all atoms must be two-level.
OperatorMatrix collective_lowering(const CompositeBasis& basis);

/// Product state from per-factor amplitude vectors (modes first, then atoms).
StateVector tensor_state(const CompositeBasis& basis, const std::vector<CVector>& factors);

/// Product basis ket, e.g. ket(basis, 0, {1, 0}) == |010>.
StateVector ket(const CompositeBasis& basis, int photons, std::initializer_list<int> levels);

/// Two-atom singlet (|01> - |10>)/sqrt(2) on atoms (i, j) of a basis whose
/// other factors are in their ground state. Sign: +|..0_i..1_j..>.
StateVector singlet_state(const CompositeBasis& basis, int atom_i, int atom_j);

/// Reduced density matrix of one factor (partial trace over all others).
CMatrix reduced_density(const StateVector& psi, int factor);
CMatrix reduced_density(const CMatrix& rho, const CompositeBasis& basis, int factor);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns; pi/2 when the dimensions differ.
double max_principal_angle(const CMatrix& a, const CMatrix& b);

/// Orthonormal basis of the column span of `m` (column-pivoted QR, rank by
/// `rel_tol` times the largest diagonal entry of R).
CMatrix orthonormal_span(const CMatrix& m, double rel_tol = 1e-9);

/// 0.5 * sum |eigenvalues(a - b)| for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

}  // namespace qjump
