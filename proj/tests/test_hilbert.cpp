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


#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "qjump/errors.hpp"
#include "qjump/hilbert.hpp"

using namespace qjump;

namespace {

CVector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(d(rng), d(rng));
  return v;
}

}  // namespace

TEST_CASE("basis dimensions and ordering") {
  CHECK(build_basis(1, {2, 2}).dim() == 8);
  CHECK(build_basis(0, {2}).dim() == 2);
  CHECK(build_basis(1, {2, 2, 2, 2}).dim() == 32);
  CHECK(build_multimode_basis({1, 1}, {2, 2}).dim() == 16);

  const CompositeBasis b = build_basis(1, {2, 2});
  CHECK(b.index_of(0, {1, 0}) == 2);
  CHECK(b.index_of(1, {0, 0}) == 4);
  CHECK(b.ket_label(2) == "|010>");
  for (Index i = 0; i < b.dim(); ++i) {
    const auto label = b.decompose(i);
    CHECK(b.index_of(label.photons, label.levels) == i);
  }
}

TEST_CASE("basis construction errors") {
  CHECK_THROWS_AS(build_basis(-1, {2}), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1, {}), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1, {1}), InvalidArgument);
  CHECK_THROWS_AS(build_basis(1, std::vector<int>(12, 2)), DimensionLimitExceeded);
  CHECK_NOTHROW(build_basis(1, std::vector<int>(12, 2), 1 << 14));
}

TEST_CASE("atomic lowering and cavity ladder") {
  const CompositeBasis b = build_basis(1, {2, 2});
  const OperatorMatrix s1 = lowering_op(b, 0, 1, 0);
  const StateVector out = s1.apply(ket(b, 0, {1, 0}));
  CHECK((out.amps() - ket(b, 0, {0, 0}).amps()).norm() < 1e-15);
  CHECK(s1.apply(ket(b, 0, {0, 0})).norm() == 0.0);
  CHECK_THROWS_AS(lowering_op(b, 2, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(lowering_op(b, 0, 0, 1), InvalidArgument);

  const OperatorMatrix a = cavity_annihilation(b);
  CHECK((a.apply(ket(b, 1, {0, 1})).amps() - ket(b, 0, {0, 1}).amps()).norm() < 1e-15);
  CHECK(a.apply(ket(b, 0, {0, 1})).norm() == 0.0);

  const CompositeBasis b3 = build_basis(3, {2});
  const OperatorMatrix n = photon_number(b3);
  for (int k = 0; k <= 3; ++k) {
    const StateVector v = ket(b3, k, {0});
    CHECK((n.apply(v).amps() - double(k) * v.amps()).norm() < 1e-14);
  }
}

TEST_CASE("ladder and spin identities") {
  const CompositeBasis b = build_basis(3, {2, 2});
  const CMatrix a = cavity_annihilation(b).matrix();
  const CMatrix comm = a * a.adjoint() - a.adjoint() * a;
  for (Index i = 0; i < b.dim(); ++i) {
    if (b.digit(i, 0) < 3) CHECK(std::abs(comm(i, i) - 1.0) < 1e-12);
  }
  for (int i = 0; i < 2; ++i) {
    const CMatrix s = lowering_op(b, i, 1, 0).matrix();
    CHECK((s * s).norm() < 1e-15);
    const CMatrix n = s.adjoint() * s;
    CHECK((n * n - n).norm() < 1e-15);
  }
  const CMatrix s0 = lowering_op(b, 0, 1, 0).matrix();
  const CMatrix s1 = lowering_op(b, 1, 1, 0).matrix();
  CHECK((s0 * s1.adjoint() - s1.adjoint() * s0).norm() < 1e-15);
}

TEST_CASE("collective lowering") {
  const CompositeBasis b = build_basis(1, {2, 2});
  const OperatorMatrix jm = collective_lowering(b);
  CHECK(jm.apply(singlet_state(b, 0, 1)).norm() < 1e-15);
  CHECK(jm.apply(ket(b, 0, {0, 0})).norm() == 0.0);

  // Independent 4x4 oracle on the atomic factor: sigma = [[0,1],[0,0]] in (g, e).
  Eigen::Matrix2cd s;
  s << 0, 1, 0, 0;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix4cd j4 = Eigen::kroneckerProduct(s, id).eval() + Eigen::kroneckerProduct(id, s).eval();
  Eigen::Vector4cd sym(0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0);
  Eigen::Vector4cd expected = j4 * sym;
  const StateVector sym_full = (ket(b, 0, {0, 1}) + ket(b, 0, {1, 0})) * Complex(1 / std::sqrt(2.0));
  const StateVector got = jm.apply(sym_full);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(got[k] - expected(k)) < 1e-14);
  CHECK(std::abs(got[0] - std::sqrt(2.0)) < 1e-14);

  CHECK_THROWS_AS(collective_lowering(build_basis(1, {3, 2})), InvalidArgument);
}

TEST_CASE("tensor states") {
  const CompositeBasis b = build_basis(1, {2, 2});
  CVector c0(2), g(2), e(2);
  c0 << 1, 0;
  g << 1, 0;
  e << 0, 1;
  const StateVector v = tensor_state(b, {c0, e, g});
  CHECK(v[b.index_of(0, {1, 0})] == Complex(1.0));
  CHECK(std::abs(v.norm() - 1.0) < 1e-15);

  const StateVector a = singlet_state(b, 0, 1);
  CHECK(std::abs(a[b.index_of(0, {0, 1})] - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(a[b.index_of(0, {1, 0})] + 1 / std::sqrt(2.0)) < 1e-15);

  std::mt19937_64 rng(3);
  CVector f0 = random_vector(2, rng), f1 = random_vector(2, rng), f2 = random_vector(2, rng);
  const StateVector p = tensor_state(b, {f0, f1, f2});
  CHECK(std::abs(p.norm() - f0.norm() * f1.norm() * f2.norm()) < 1e-12);
  for (int n = 0; n < 2; ++n)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) CHECK(p[b.index_of(n, {x, y})] == f0(n) * f1(x) * f2(y));
  CHECK_THROWS_AS(tensor_state(b, {f0, f1}), InvalidArgument);
  CHECK_THROWS_AS(tensor_state(b, {f0, f1, CVector::Ones(3)}), InvalidArgument);
}

TEST_CASE("operator identity and linearity") {
  const CompositeBasis b = build_basis(2, {2, 2});
  std::mt19937_64 rng(11);
  const StateVector psi(b, random_vector(b.dim(), rng));
  const StateVector chi(b, random_vector(b.dim(), rng));
  CHECK((OperatorMatrix::identity(b).apply(psi).amps() - psi.amps()).norm() == 0.0);
  const OperatorMatrix a = cavity_annihilation(b) + lowering_op(b, 1, 1, 0) * Complex(0.3, -1.0);
  const Complex x(0.7, 0.2), y(-1.1, 0.4);
  const StateVector lhs = a.apply(psi * x + chi * y);
  const StateVector rhs = a.apply(psi) * x + a.apply(chi) * y;
  CHECK((lhs.amps() - rhs.amps()).norm() < 1e-12);
}

TEST_CASE("reduced density, principal angles, trace distance") {
  const CompositeBasis b = build_basis(1, {2, 2});
  const CMatrix r = reduced_density(singlet_state(b, 0, 1), b.atom_factor(0));
  CHECK((r - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);

  CMatrix a = CMatrix::Zero(4, 2);
  a(0, 0) = 1;
  a(1, 1) = 1;
  CMatrix rot = a;
  rot.col(1) = (CVector(4) << 0, std::cos(0.1), std::sin(0.1), 0).finished();
  CHECK(std::abs(max_principal_angle(a, rot) - 0.1) < 1e-12);
  CHECK(max_principal_angle(a, a) < 1e-12);

  CMatrix m(3, 3);
  m << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  CHECK(orthonormal_span(m).cols() == 2);

  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(std::abs(trace_distance(p0, p1) - 1.0) < 1e-14);
}

TEST_CASE("state normalization errors") {
  const CompositeBasis b = build_basis(1, {2});
  CHECK_THROWS_AS(StateVector::zero(b).normalized(), NumericalError);
  CHECK_THROWS_AS(StateVector(b, CVector::Ones(3)), InvalidArgument);
}
