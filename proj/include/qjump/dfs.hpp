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

#include <cstdint>
#include <utility>
#include <vector>

#include "qjump/hilbert.hpp"

namespace qjump {

inline constexpr int kDefaultAtomLimit = 10;

/// Orthonormal basis of the decoherence-free subspace: atomic states
/// annihilated by J_- tensored with the cavity vacuum.
struct DfsBasis {
  int n_atoms = 0;
  CompositeBasis basis;
  /// Columns are the basis vectors over `basis`.
  CMatrix vectors;

  Index dimension() const noexcept { return vectors.cols(); }
  StateVector state(Index k) const { return StateVector(basis, vectors.col(k)); }
  std::vector<StateVector> states() const;
};

/// C(N, N/2) for even N and C(N, (N+1)/2) for odd N.
std::uint64_t dfs_dimension(int n_atoms);

/// sqrt(2 / (pi N)) * 2^N.
double dfs_dimension_asymptotic(int n_atoms);

/// Null space of J_- computed per excitation sector by SVD (threshold 1e-9
/// times the largest singular value of J_-). Each vector is phase-fixed so its
/// first component above 1e-12 in magnitude is real and positive; for N = 2
/// this gives |00> and (|01> - |10>)/sqrt(2).
DfsBasis kernel_basis(int n_atoms, int fock_cutoff = 1, int atom_limit = kDefaultAtomLimit);

/// One product of ground-state atoms and pairwise singlets over disjoint pairs.
struct SingletProduct {
  std::vector<int> ground;
  std::vector<std::pair<int, int>> pairs;
};

/// Every ground-set/pairing combination: pair count ascending, paired subsets
/// in lexicographic order, then perfect matchings in lexicographic order.
std::vector<SingletProduct> singlet_products(int n_atoms, int atom_limit = kDefaultAtomLimit);

StateVector singlet_product_state(const CompositeBasis& basis, const SingletProduct& product);

/// The overcomplete singlet-product set, one column per singlet_products() entry.
CMatrix singlet_product_spanning_set(const CompositeBasis& basis,
                                     const std::vector<SingletProduct>& products);

/// Orthonormalized singlet-product basis (column-pivoted QR per excitation
/// sector, same phase rule as kernel_basis).
DfsBasis singlet_product_basis(int n_atoms, int fock_cutoff = 1,
                               int atom_limit = kDefaultAtomLimit);

/// P = sum_v |v><v| over kernel_basis(n_atoms).
OperatorMatrix dfs_projector(int n_atoms, int fock_cutoff = 1, int atom_limit = kDefaultAtomLimit);
OperatorMatrix dfs_projector(const DfsBasis& dfs);

struct DfsCheck {
  bool decoherence_free = false;
  /// max(||cavity-excited part||, ||J_- (vacuum part)||) / ||state||.
  double residual = 0.0;
};

DfsCheck is_decoherence_free(const StateVector& state, double tol = 1e-10);

struct DickeState {
  /// 2j and the coupling path of 2j values after each atom is added.
  int twice_j = 0;
  std::vector<int> path;
  /// n = N/2 - j.
  int n_excitations = 0;
  StateVector state;
};

/// |j, -j> states from sequential angular-momentum coupling with level 1 as
/// spin up. One state per coupling path; paths are listed with j descending,
/// and lexicographically within a j.
std::vector<DickeState> dicke_ground_states(int n_atoms, int fock_cutoff = 1,
                                            int atom_limit = kDefaultAtomLimit);

/// C(N, N/2 - j) - C(N, N/2 - j - 1): number of |j, -j> multiplets.
std::uint64_t dicke_multiplicity(int n_atoms, int twice_j);

/// Emission rate 2 gamma sum_i <sigma_i^dag sigma_i> of a state under
/// spontaneous emission alone (gamma is the amplitude rate). Zero inside the
/// idealized DFS only for gamma = 0.
double spontaneous_leak_rate(const StateVector& state, double gamma);

}  // namespace qjump
