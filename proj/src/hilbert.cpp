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

#include "qjump/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qjump/errors.hpp"

namespace qjump {

CompositeBasis::CompositeBasis(std::vector<int> mode_cutoffs, std::vector<int> atom_dims,
                               Index dim_limit)
    : mode_cutoffs_(std::move(mode_cutoffs)), atom_dims_(std::move(atom_dims)) {
  if (mode_cutoffs_.empty()) throw InvalidArgument("basis needs at least one cavity mode");
  if (atom_dims_.empty()) throw InvalidArgument("basis needs at least one atom");
  for (int c : mode_cutoffs_) {
    if (c < 0) throw InvalidArgument("fock cutoff must be >= 0");
    radices_.push_back(c + 1);
  }
  for (int d : atom_dims_) {
    if (d < 2) throw InvalidArgument("atom dimension must be >= 2");
    radices_.push_back(d);
  }
  // Checked product so absurd inputs cannot overflow before the limit test.
  Index dim = 1;
  for (int r : radices_) {
    if (dim > dim_limit / r + 1) {
      throw DimensionLimitExceeded("basis dimension exceeds limit " + std::to_string(dim_limit));
    }
    dim *= r;
  }
  if (dim > dim_limit) {
    throw DimensionLimitExceeded("basis dimension " + std::to_string(dim) + " exceeds limit " +
                                 std::to_string(dim_limit));
  }
  dim_ = dim;
  strides_.assign(radices_.size(), 1);
  for (int f = static_cast<int>(radices_.size()) - 2; f >= 0; --f) {
    strides_[f] = strides_[f + 1] * radices_[f + 1];
  }
}

int CompositeBasis::fock_cutoff(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw InvalidArgument("mode index out of range");
  return mode_cutoffs_[mode];
}

int CompositeBasis::mode_factor(int mode) const {
  if (mode < 0 || mode >= n_modes()) throw InvalidArgument("mode index out of range");
  return mode;
}

int CompositeBasis::atom_factor(int atom) const {
  if (atom < 0 || atom >= n_atoms()) {
    throw InvalidArgument("atom index " + std::to_string(atom) + " out of range");
  }
  return n_modes() + atom;
}

int CompositeBasis::digit(Index index, int factor) const {
  return static_cast<int>((index / strides_[factor]) % radices_[factor]);
}

CompositeBasis::Label CompositeBasis::decompose(Index index) const {
  if (index < 0 || index >= dim_) throw InvalidArgument("basis index out of range");
  Label label;
  for (int m = 0; m < n_modes(); ++m) label.photons.push_back(digit(index, m));
  for (int a = 0; a < n_atoms(); ++a) label.levels.push_back(digit(index, n_modes() + a));
  return label;
}

Index CompositeBasis::index_of(std::span<const int> photons, std::span<const int> levels) const {
  if (static_cast<int>(photons.size()) != n_modes() ||
      static_cast<int>(levels.size()) != n_atoms()) {
    throw InvalidArgument("label length does not match basis layout");
  }
  Index index = 0;
  for (int f = 0; f < n_factors(); ++f) {
    int d = f < n_modes() ? photons[f] : levels[f - n_modes()];
    if (d < 0 || d >= radices_[f]) throw InvalidArgument("level out of range in basis label");
    index += d * strides_[f];
  }
  return index;
}

Index CompositeBasis::index_of(int photons, std::initializer_list<int> levels) const {
  std::vector<int> p(1, photons);
  std::vector<int> l(levels);
  return index_of(p, l);
}

std::string CompositeBasis::ket_label(Index index) const {
  auto label = decompose(index);
  bool wide = std::any_of(radices_.begin(), radices_.end(), [](int r) { return r > 10; });
  std::ostringstream out;
  out << '|';
  bool first = true;
  auto put = [&](int v) {
    if (wide && !first) out << ',';
    out << v;
    first = false;
  };
  for (int p : label.photons) put(p);
  for (int l : label.levels) put(l);
  out << '>';
  return out.str();
}

CompositeBasis build_basis(int fock_cutoff, std::vector<int> atom_dims, Index dim_limit) {
  return CompositeBasis({fock_cutoff}, std::move(atom_dims), dim_limit);
}

CompositeBasis build_multimode_basis(std::vector<int> mode_cutoffs, std::vector<int> atom_dims,
                                     Index dim_limit) {
  return CompositeBasis(std::move(mode_cutoffs), std::move(atom_dims), dim_limit);
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CompositeBasis basis, CVector amps)
    : basis_(std::move(basis)), amps_(std::move(amps)) {
  if (amps_.size() != basis_.dim()) {
    throw InvalidArgument("amplitude vector length " + std::to_string(amps_.size()) +
                          " does not match basis dimension " + std::to_string(basis_.dim()));
  }
}

StateVector StateVector::zero(const CompositeBasis& basis) {
  return StateVector(basis, CVector::Zero(basis.dim()));
}

StateVector StateVector::basis_ket(const CompositeBasis& basis, Index index) {
  if (index < 0 || index >= basis.dim()) throw InvalidArgument("basis index out of range");
  CVector v = CVector::Zero(basis.dim());
  v(index) = 1.0;
  return StateVector(basis, std::move(v));
}

StateVector StateVector::normalized() const {
  double n = norm();
  if (!std::isfinite(n)) throw NumericalError("cannot normalize a non-finite state");
  if (n == 0.0) throw NumericalError("cannot normalize a zero state");
  return StateVector(basis_, amps_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("inner product across different bases");
  return amps_.dot(other.amps_);
}

StateVector StateVector::operator+(const StateVector& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("sum across different bases");
  return StateVector(basis_, amps_ + other.amps_);
}

StateVector StateVector::operator-(const StateVector& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("difference across different bases");
  return StateVector(basis_, amps_ - other.amps_);
}

StateVector StateVector::operator*(Complex scale) const {
  return StateVector(basis_, amps_ * scale);
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(CompositeBasis basis, CMatrix entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
  if (entries_.rows() != basis_.dim() || entries_.cols() != basis_.dim()) {
    throw InvalidArgument("operator shape does not match basis dimension");
  }
}

OperatorMatrix OperatorMatrix::identity(const CompositeBasis& basis) {
  return OperatorMatrix(basis, CMatrix::Identity(basis.dim(), basis.dim()));
}

OperatorMatrix OperatorMatrix::zero(const CompositeBasis& basis) {
  return OperatorMatrix(basis, CMatrix::Zero(basis.dim(), basis.dim()));
}

StateVector OperatorMatrix::apply(const StateVector& psi) const {
  if (!(basis_ == psi.basis())) throw InvalidArgument("operator and state bases differ");
  return StateVector(basis_, entries_ * psi.amps());
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(basis_, entries_.adjoint());
}

bool OperatorMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("product across different bases");
  return OperatorMatrix(basis_, entries_ * other.entries_);
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("sum across different bases");
  return OperatorMatrix(basis_, entries_ + other.entries_);
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& other) const {
  if (!(basis_ == other.basis_)) throw InvalidArgument("difference across different bases");
  return OperatorMatrix(basis_, entries_ - other.entries_);
}

OperatorMatrix OperatorMatrix::operator*(Complex scale) const {
  return OperatorMatrix(basis_, entries_ * scale);
}

// ---------------------------------------------------------------------------
// Elementary operators

namespace {

Index factor_stride(const CompositeBasis& basis, int factor) {
  Index stride = 1;
  for (int f = basis.n_factors() - 1; f > factor; --f) stride *= basis.factor_dim(f);
  return stride;
}

}  // namespace

OperatorMatrix embed_local(const CompositeBasis& basis, int factor, const CMatrix& local) {
  if (factor < 0 || factor >= basis.n_factors()) throw InvalidArgument("factor out of range");
  const int d = basis.factor_dim(factor);
  if (local.rows() != d || local.cols() != d) {
    throw InvalidArgument("local operator does not match factor dimension");
  }
  const Index stride = factor_stride(basis, factor);
  CMatrix m = CMatrix::Zero(basis.dim(), basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) {
    const int di = basis.digit(i, factor);
    const Index base = i - di * stride;
    for (int dj = 0; dj < d; ++dj) {
      const Complex v = local(di, dj);
      if (v != Complex(0.0)) m(i, base + dj * stride) = v;
    }
  }
  return OperatorMatrix(basis, std::move(m));
}

OperatorMatrix atom_transition(const CompositeBasis& basis, int atom_index, int row_level,
                               int col_level) {
  const int f = basis.atom_factor(atom_index);
  const int d = basis.factor_dim(f);
  if (row_level < 0 || row_level >= d || col_level < 0 || col_level >= d) {
    throw InvalidArgument("atomic level out of range");
  }
  CMatrix local = CMatrix::Zero(d, d);
  local(row_level, col_level) = 1.0;
  return embed_local(basis, f, local);
}

OperatorMatrix lowering_op(const CompositeBasis& basis, int atom_index, int from_level,
                           int to_level) {
  if (from_level <= to_level) throw InvalidArgument("lowering requires from_level > to_level");
  return atom_transition(basis, atom_index, to_level, from_level);
}

OperatorMatrix cavity_annihilation(const CompositeBasis& basis, int mode) {
  const int f = basis.mode_factor(mode);
  const int d = basis.factor_dim(f);
  CMatrix local = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) local(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed_local(basis, f, local);
}

OperatorMatrix photon_number(const CompositeBasis& basis, int mode) {
  const int f = basis.mode_factor(mode);
  const int d = basis.factor_dim(f);
  CMatrix local = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) local(n, n) = static_cast<double>(n);
  return embed_local(basis, f, local);
}

OperatorMatrix collective_lowering(const CompositeBasis& basis) {
  OperatorMatrix j = OperatorMatrix::zero(basis);
  for (int a = 0; a < basis.n_atoms(); ++a) {
    if (basis.atom_dims()[a] != 2) {
      throw InvalidArgument("collective lowering requires two-level atoms");
    }
    j = j + lowering_op(basis, a, 1, 0);
  }
  return j;
}

StateVector tensor_state(const CompositeBasis& basis, const std::vector<CVector>& factors) {
  if (static_cast<int>(factors.size()) != basis.n_factors()) {
    throw InvalidArgument("expected " + std::to_string(basis.n_factors()) + " factors, got " +
                          std::to_string(factors.size()));
  }
  for (int f = 0; f < basis.n_factors(); ++f) {
    if (factors[f].size() != basis.factor_dim(f)) {
      throw InvalidArgument("factor " + std::to_string(f) + " has dimension " +
                            std::to_string(factors[f].size()) + ", expected " +
                            std::to_string(basis.factor_dim(f)));
    }
  }
  CVector amps(basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) {
    Complex v = 1.0;
    for (int f = 0; f < basis.n_factors(); ++f) v *= factors[f](basis.digit(i, f));
    amps(i) = v;
  }
  return StateVector(basis, std::move(amps));
}

StateVector ket(const CompositeBasis& basis, int photons, std::initializer_list<int> levels) {
  return StateVector::basis_ket(basis, basis.index_of(photons, levels));
}

StateVector singlet_state(const CompositeBasis& basis, int atom_i, int atom_j) {
  if (atom_i == atom_j) throw InvalidArgument("singlet needs two distinct atoms");
  const int fi = basis.atom_factor(atom_i);
  const int fj = basis.atom_factor(atom_j);
  const Index si = factor_stride(basis, fi);
  const Index sj = factor_stride(basis, fj);
  CVector amps = CVector::Zero(basis.dim());
  const double h = 1.0 / std::numbers::sqrt2;
  amps(sj) = h;   // atom_i in 0, atom_j in 1
  amps(si) = -h;  // atom_i in 1, atom_j in 0
  return StateVector(basis, std::move(amps));
}

CMatrix reduced_density(const StateVector& psi, int factor) {
  const auto& basis = psi.basis();
  if (factor < 0 || factor >= basis.n_factors()) throw InvalidArgument("factor out of range");
  const int d = basis.factor_dim(factor);
  const Index stride = factor_stride(basis, factor);
  CMatrix rho = CMatrix::Zero(d, d);
  for (Index i = 0; i < basis.dim(); ++i) {
    const int k = basis.digit(i, factor);
    for (int l = 0; l < d; ++l) {
      rho(k, l) += psi[i] * std::conj(psi[i + (l - k) * stride]);
    }
  }
  return rho;
}

CMatrix reduced_density(const CMatrix& rho, const CompositeBasis& basis, int factor) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) {
    throw InvalidArgument("density matrix does not match basis");
  }
  if (factor < 0 || factor >= basis.n_factors()) throw InvalidArgument("factor out of range");
  const int d = basis.factor_dim(factor);
  const Index stride = factor_stride(basis, factor);
  CMatrix out = CMatrix::Zero(d, d);
  for (Index i = 0; i < basis.dim(); ++i) {
    const int k = basis.digit(i, factor);
    for (int l = 0; l < d; ++l) out(k, l) += rho(i, i + (l - k) * stride);
  }
  return out;
}

double max_principal_angle(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("subspaces live in different spaces");
  if (a.cols() != b.cols()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  // sin of the largest angle is the norm of the part of b outside span(a).
  CMatrix residual = b - a * (a.adjoint() * b);
  Eigen::JacobiSVD<CMatrix> svd(residual);
  double s = svd.singularValues()(0);
  return std::asin(std::min(1.0, s));
}

CMatrix orthonormal_span(const CMatrix& m, double rel_tol) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  qr.setThreshold(rel_tol);
  const Index rank = qr.rank();
  CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), rank);
  return q;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("trace distance of differently shaped matrices");
  }
  CMatrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qjump
