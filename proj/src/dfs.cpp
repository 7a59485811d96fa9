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


#include "qjump/dfs.hpp"

#include <bit>
#include <cmath>
#include <algorithm>
#include <numbers>

#include <Eigen/SVD>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

using RMatrix = Eigen::MatrixXd;

void check_atoms(int n_atoms, int atom_limit) {
  if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
  if (n_atoms > atom_limit) {
    throw DimensionLimitExceeded("n_atoms = " + std::to_string(n_atoms) + " exceeds the limit " +
                                 std::to_string(atom_limit));
  }
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

// Atomic index with atom 0 as the most significant bit.
inline bool excited(Index a, int atom, int n) { return (a >> (n - 1 - atom)) & 1; }
inline Index flip(Index a, int atom, int n) { return a ^ (Index{1} << (n - 1 - atom)); }

std::vector<std::vector<Index>> sectors(int n) {
  std::vector<std::vector<Index>> out(n + 1);
  for (Index a = 0; a < (Index{1} << n); ++a) {
    out[std::popcount(static_cast<std::uint64_t>(a))].push_back(a);
  }
  return out;
}

template <typename Vec>
void fix_phase(Vec&& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      const auto z = v(i);
      v *= std::abs(z) / z;
      return;
    }
  }
}

// Embeds atomic column vectors (2^N rows) into the cavity-vacuum block.
DfsBasis embed(int n_atoms, int fock_cutoff, const CMatrix& atomic) {
  CompositeBasis basis = build_basis(fock_cutoff, std::vector<int>(n_atoms, 2));
  CMatrix full = CMatrix::Zero(basis.dim(), atomic.cols());
  full.topRows(atomic.rows()) = atomic;
  return DfsBasis{n_atoms, std::move(basis), std::move(full)};
}

RMatrix lowering_block(const std::vector<Index>& from, const std::vector<Index>& to, int n) {
  RMatrix m = RMatrix::Zero(static_cast<Index>(to.size()), static_cast<Index>(from.size()));
  std::vector<Index> pos(Index{1} << n, -1);
  for (std::size_t r = 0; r < to.size(); ++r) pos[to[r]] = static_cast<Index>(r);
  for (std::size_t c = 0; c < from.size(); ++c) {
    for (int atom = 0; atom < n; ++atom) {
      if (excited(from[c], atom, n)) m(pos[flip(from[c], atom, n)], static_cast<Index>(c)) += 1.0;
    }
  }
  return m;
}

}  // namespace

std::vector<StateVector> DfsBasis::states() const {
  std::vector<StateVector> out;
  for (Index k = 0; k < dimension(); ++k) out.push_back(state(k));
  return out;
}

std::uint64_t dfs_dimension(int n_atoms) {
  if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
  return n_atoms % 2 == 0 ? binomial(n_atoms, n_atoms / 2) : binomial(n_atoms, (n_atoms + 1) / 2);
}

double dfs_dimension_asymptotic(int n_atoms) {
  if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
  return std::sqrt(2.0 / (std::numbers::pi * n_atoms)) * std::exp2(n_atoms);
}

DfsBasis kernel_basis(int n_atoms, int fock_cutoff, int atom_limit) {
  check_atoms(n_atoms, atom_limit);
  const int n = n_atoms;
  const auto sec = sectors(n);

  struct SectorSvd {
    Eigen::VectorXd sigma;
    RMatrix v;
  };
  std::vector<SectorSvd> svds(n + 1);
  double sigma_max = 0.0;
  for (int k = 1; k <= n; ++k) {
    Eigen::JacobiSVD<RMatrix> svd(lowering_block(sec[k], sec[k - 1], n), Eigen::ComputeFullV);
    svds[k] = {svd.singularValues(), svd.matrixV()};
    if (svds[k].sigma.size() > 0) sigma_max = std::max(sigma_max, svds[k].sigma(0));
  }
  const double threshold = 1e-9 * sigma_max;

  std::vector<Eigen::VectorXd> kernel;
  Eigen::VectorXd ground = Eigen::VectorXd::Zero(Index{1} << n);
  ground(0) = 1.0;
  kernel.push_back(ground);
  for (int k = 1; k <= n; ++k) {
    Index rank = 0;
    for (Index i = 0; i < svds[k].sigma.size(); ++i) rank += svds[k].sigma(i) > threshold ? 1 : 0;
    for (Index c = rank; c < svds[k].v.cols(); ++c) {
      Eigen::VectorXd vec = Eigen::VectorXd::Zero(Index{1} << n);
      for (std::size_t r = 0; r < sec[k].size(); ++r) vec(sec[k][r]) = svds[k].v(static_cast<Index>(r), c);
      fix_phase(vec);
      kernel.push_back(std::move(vec));
    }
  }
  CMatrix atomic(Index{1} << n, static_cast<Index>(kernel.size()));
  for (std::size_t c = 0; c < kernel.size(); ++c) atomic.col(static_cast<Index>(c)) = kernel[c].cast<Complex>();
  return embed(n_atoms, fock_cutoff, atomic);
}

namespace {

// Perfect matchings of `atoms` (sorted), each pair (first remaining, partner)
// with partners taken in ascending order.
void matchings(const std::vector<int>& atoms, std::vector<std::pair<int, int>>& current,
               std::vector<std::vector<std::pair<int, int>>>& out) {
  if (atoms.empty()) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    std::vector<int> rest;
    for (std::size_t j = 1; j < atoms.size(); ++j) {
      if (j != i) rest.push_back(atoms[j]);
    }
    current.emplace_back(atoms[0], atoms[i]);
    matchings(rest, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<SingletProduct> singlet_products(int n_atoms, int atom_limit) {
  check_atoms(n_atoms, atom_limit);
  std::vector<SingletProduct> out;
  for (int k = 0; 2 * k <= n_atoms; ++k) {
    // Paired subsets of size 2k in lexicographic order.
    std::vector<int> sel(n_atoms, 0);
    std::fill(sel.begin(), sel.begin() + 2 * k, 1);
    do {
      std::vector<int> paired;
      std::vector<int> ground;
      for (int a = 0; a < n_atoms; ++a) (sel[a] ? paired : ground).push_back(a);
      std::vector<std::vector<std::pair<int, int>>> all;
      std::vector<std::pair<int, int>> current;
      matchings(paired, current, all);
      for (auto& m : all) out.push_back({ground, std::move(m)});
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  return out;
}

StateVector singlet_product_state(const CompositeBasis& basis, const SingletProduct& product) {
  const int n = basis.n_atoms();
  std::vector<int> seen(n, 0);
  for (int a : product.ground) {
    if (a < 0 || a >= n || seen[a]++) throw InvalidArgument("invalid ground-atom index");
  }
  for (auto [i, j] : product.pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n || seen[i]++ || seen[j]++) {
      throw InvalidArgument("invalid singlet pair");
    }
  }
  for (int s : seen) {
    if (s != 1) throw InvalidArgument("singlet product must assign every atom exactly once");
  }
  for (int d : basis.atom_dims()) {
    if (d != 2) throw InvalidArgument("singlet products need two-level atoms");
  }
  // Expand pair by pair over the atomic register, then place at cavity vacuum.
  const Index na = Index{1} << n;
  Eigen::VectorXd amps = Eigen::VectorXd::Zero(na);
  amps(0) = 1.0;
  const double h = 1.0 / std::numbers::sqrt2;
  for (auto [i, j] : product.pairs) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(na);
    for (Index a = 0; a < na; ++a) {
      if (amps(a) == 0.0) continue;
      next(flip(a, j, n)) += h * amps(a);
      next(flip(a, i, n)) -= h * amps(a);
    }
    amps = std::move(next);
  }
  CVector full = CVector::Zero(basis.dim());
  full.head(na) = amps.cast<Complex>();
  return StateVector(basis, std::move(full));
}

CMatrix singlet_product_spanning_set(const CompositeBasis& basis,
                                     const std::vector<SingletProduct>& products) {
  CMatrix m(basis.dim(), static_cast<Index>(products.size()));
  for (std::size_t c = 0; c < products.size(); ++c) {
    m.col(static_cast<Index>(c)) = singlet_product_state(basis, products[c]).amps();
  }
  return m;
}

DfsBasis singlet_product_basis(int n_atoms, int fock_cutoff, int atom_limit) {
  const auto products = singlet_products(n_atoms, atom_limit);
  const CompositeBasis atomic = build_basis(0, std::vector<int>(n_atoms, 2));
  // A product with k pairs lies in the k-excitation sector; orthonormalize
  // each sector separately so the sectors stay exactly orthogonal.
  std::vector<std::vector<SingletProduct>> by_sector(n_atoms / 2 + 1);
  for (const auto& p : products) by_sector[p.pairs.size()].push_back(p);
  std::vector<CMatrix> blocks;
  Index total = 0;
  for (const auto& group : by_sector) {
    CMatrix q = orthonormal_span(singlet_product_spanning_set(atomic, group));
    for (Index c = 0; c < q.cols(); ++c) fix_phase(q.col(c));
    total += q.cols();
    blocks.push_back(std::move(q));
  }
  CMatrix all(atomic.dim(), total);
  Index col = 0;
  for (const auto& b : blocks) {
    all.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  return embed(n_atoms, fock_cutoff, all);
}

OperatorMatrix dfs_projector(const DfsBasis& dfs) {
  return OperatorMatrix(dfs.basis, dfs.vectors * dfs.vectors.adjoint());
}

OperatorMatrix dfs_projector(int n_atoms, int fock_cutoff, int atom_limit) {
  return dfs_projector(kernel_basis(n_atoms, fock_cutoff, atom_limit));
}

DfsCheck is_decoherence_free(const StateVector& state, double tol) {
  const auto& basis = state.basis();
  const double norm = state.norm();
  if (!(norm > 0.0)) throw NumericalError("decoherence-free check of a zero-norm state");
  CVector vacuum = CVector::Zero(basis.dim());
  double excited_part = 0.0;
  for (Index i = 0; i < basis.dim(); ++i) {
    bool has_photons = false;
    for (int m = 0; m < basis.n_modes(); ++m) has_photons |= basis.digit(i, basis.mode_factor(m)) > 0;
    if (has_photons) {
      excited_part += std::norm(state[i]);
    } else {
      vacuum(i) = state[i];
    }
  }
  const OperatorMatrix jm = collective_lowering(basis);
  const double lowered = (jm.matrix() * vacuum).norm();
  const double residual = std::max(std::sqrt(excited_part), lowered) / norm;
  return DfsCheck{residual <= tol, residual};
}

std::uint64_t dicke_multiplicity(int n_atoms, int twice_j) {
  if (n_atoms < 1) throw InvalidArgument("n_atoms must be >= 1");
  if (twice_j < 0 || twice_j > n_atoms || (n_atoms - twice_j) % 2 != 0) return 0;
  const int n_exc = (n_atoms - twice_j) / 2;
  return binomial(n_atoms, n_exc) - (n_exc >= 1 ? binomial(n_atoms, n_exc - 1) : 0);
}

std::vector<DickeState> dicke_ground_states(int n_atoms, int fock_cutoff, int atom_limit) {
  check_atoms(n_atoms, atom_limit);

  struct Partial {
    std::vector<int> path;
    Eigen::VectorXd vec;  // over the first path.size() atoms
  };
  // Collective raising on k atoms (atom k-1 is the least significant bit).
  auto raise = [](const Eigen::VectorXd& v, int k) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (Index a = 0; a < v.size(); ++a) {
      if (v(a) == 0.0) continue;
      for (int atom = 0; atom < k; ++atom) {
        if (!excited(a, atom, k)) out(flip(a, atom, k)) += v(a);
      }
    }
    return out;
  };

  std::vector<Partial> layer{{{1}, Eigen::VectorXd::Unit(2, 0)}};
  for (int k = 1; k < n_atoms; ++k) {
    std::vector<Partial> next;
    for (const auto& p : layer) {
      const int tj = p.path.back();
      const Index size = p.vec.size();
      // J = j + 1/2: lowest weight is |j, -j> |down>.
      {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * size);
        for (Index a = 0; a < size; ++a) v(2 * a) = p.vec(a);
        auto path = p.path;
        path.push_back(tj + 1);
        next.push_back({std::move(path), std::move(v)});
      }
      // J = j - 1/2: -sqrt(2j/(2j+1)) |j,-j>|up> + sqrt(1/(2j+1)) |j,-j+1>|down>.
      if (tj >= 1) {
        const double twoj1 = tj + 1.0;
        const Eigen::VectorXd up = raise(p.vec, k) / std::sqrt(static_cast<double>(tj));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * size);
        for (Index a = 0; a < size; ++a) {
          v(2 * a + 1) = -std::sqrt(tj / twoj1) * p.vec(a);
          v(2 * a) = std::sqrt(1.0 / twoj1) * up(a);
        }
        auto path = p.path;
        path.push_back(tj - 1);
        next.push_back({std::move(path), std::move(v)});
      }
    }
    layer = std::move(next);
  }

  std::stable_sort(layer.begin(), layer.end(), [](const Partial& a, const Partial& b) {
    if (a.path.back() != b.path.back()) return a.path.back() > b.path.back();
    return a.path < b.path;
  });

  const CompositeBasis basis = build_basis(fock_cutoff, std::vector<int>(n_atoms, 2));
  std::vector<DickeState> out;
  for (auto& p : layer) {
    fix_phase(p.vec);
    CVector full = CVector::Zero(basis.dim());
    full.head(p.vec.size()) = p.vec.cast<Complex>();
    const int tj = p.path.back();
    out.push_back({tj, p.path, (n_atoms - tj) / 2, StateVector(basis, std::move(full))});
  }
  return out;
}

double spontaneous_leak_rate(const StateVector& state, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  const auto& basis = state.basis();
  const double norm2 = state.norm_squared();
  if (!(norm2 > 0.0)) throw NumericalError("leak rate of a zero-norm state");
  double excited_population = 0.0;
  for (Index i = 0; i < basis.dim(); ++i) {
    int n_exc = 0;
    for (int a = 0; a < basis.n_atoms(); ++a) n_exc += basis.digit(i, basis.atom_factor(a)) > 0;
    excited_population += n_exc * std::norm(state[i]);
  }
  return 2.0 * gamma * excited_population / norm2;
}

}  // namespace qjump
