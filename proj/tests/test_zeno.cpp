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
#include <numbers>

#include "doctest.h"
#include "qjump/errors.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/zeno.hpp"

using namespace qjump;

namespace {

LaserConfig antisymmetric(double omega1) { return LaserConfig{{omega1, -omega1}, 0.0}; }

// Mean spacing between successive 1/2-crossings of a population series,
// located by linear interpolation. For sin^2 oscillations this is half the period.
double crossing_spacing(const std::vector<double>& t, const std::vector<double>& pop) {
  std::vector<double> xs;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = pop[i - 1] - 0.5;
    const double b = pop[i] - 0.5;
    if (a * b < 0.0) xs.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
  }
  REQUIRE(xs.size() >= 2);
  return (xs.back() - xs.front()) / double(xs.size() - 1);
}

}  // namespace

TEST_CASE("laser Hamiltonian") {
  const CompositeBasis b1 = build_basis(1, {2});
  const OperatorMatrix h1 = build_h_laser(LaserConfig{{0.3}, 0.0}, b1);
  CHECK(h1.is_hermitian(0.0));
  CHECK(h1(0, 1) == Complex(0.15));
  CHECK(h1(1, 0) == Complex(0.15));
  CHECK(h1(0, 0) == Complex(0.0));
  // Acts only on atoms: never changes the photon number.
  CHECK(h1(0, 2) == Complex(0.0));
  CHECK(h1(2, 3) == Complex(0.15));

  const CompositeBasis b = two_atom_basis();
  CHECK(build_h_laser(LaserConfig{{0.0, 0.0}, 0.0}, b).matrix().norm() == 0.0);
  const OperatorMatrix h2 = build_h_laser(LaserConfig{{Complex(0.1, 0.2), -0.05}, 0.0}, b);
  CHECK(h2.is_hermitian(1e-15));
  CHECK_THROWS_AS(build_h_laser(LaserConfig{{0.1}, 0.0}, b), InvalidArgument);
}

TEST_CASE("effective Hamiltonian for two atoms") {
  const CompositeBasis b = two_atom_basis();
  const OperatorMatrix p = dfs_projector(2);
  for (auto [o1, o2] : {std::pair{0.05, -0.05}, std::pair{0.1, 0.03}, std::pair{-0.2, 0.07}}) {
    const OperatorMatrix h = effective_hamiltonian(build_h_laser(LaserConfig{{o1, o2}, 0.0}, b), p);
    CHECK(h.is_hermitian(0.0));
    CHECK((p * h * p - h).matrix().norm() <= 1e-15);
    const StateVector g = ket(b, 0, {0, 0});
    const StateVector a = singlet_state(b, 0, 1);
    const Complex elem = g.inner(h.apply(a));
    // (1/2 sqrt 2)(Omega_1 - Omega_2) up to the singlet sign convention.
    CHECK(std::abs(std::abs(elem) - std::abs(o1 - o2) / (2.0 * std::sqrt(2.0))) <= 1e-15);
    CHECK(std::abs(g.inner(h.apply(g))) <= 1e-15);
    CHECK(std::abs(a.inner(h.apply(a))) <= 1e-15);
    CHECK(effective_coupling(LaserConfig{{o1, o2}, 0.0}) ==
          doctest::Approx(std::abs(o1 - o2) / (2.0 * std::sqrt(2.0))));
  }
  // Symmetric drive does not couple |000> to |0a>.
  const OperatorMatrix sym = effective_hamiltonian(build_h_laser(LaserConfig{{0.1, 0.1}, 0.0}, b), p);
  CHECK(sym.matrix().norm() <= 1e-15);
  CHECK_THROWS_AS(half_transfer_time(LaserConfig{{0.1, 0.1}, 0.0}), DomainError);
}

TEST_CASE("effective Hamiltonian is independent of g and kappa") {
  // Neither rate enters the projection, so any construction of the DFS
  // projector yields the same H_eff.
  const CompositeBasis b = build_basis(1, {2, 2, 2});
  const LaserConfig laser{{0.05, -0.02, 0.01}, 0.0};
  const OperatorMatrix h_laser = build_h_laser(laser, b);
  const OperatorMatrix a = effective_hamiltonian(h_laser, dfs_projector(3));
  const OperatorMatrix c = effective_hamiltonian(h_laser, dfs_projector(singlet_product_basis(3)));
  CHECK((a.matrix() - c.matrix()).norm() <= 1e-14);
  CHECK(a.is_hermitian(1e-15));
  // Driven conditional evolution at (g, kappa) and (2g, 5kappa) both stay close
  // to the same effective dynamics.
  const StateVector psi0 = ket(two_atom_basis(), 0, {0, 0});
  const double t = half_transfer_time(antisymmetric(0.01));
  const auto r1 = simulate_zeno_pulse(SystemParams{1.0, 1.0, 0.0, 2}, antisymmetric(0.01), psi0, t, 200);
  const auto r2 = simulate_zeno_pulse(SystemParams{2.0, 5.0, 0.0, 2}, antisymmetric(0.01), psi0, t, 200);
  CHECK(r1.effective_populations == r2.effective_populations);
  CHECK(r1.max_deviation < 0.05);
  CHECK(r2.max_deviation < 0.05);
}

TEST_CASE("effective evolution") {
  const CompositeBasis b = two_atom_basis();
  const OperatorMatrix p = dfs_projector(2);
  const double o1 = 0.05;
  const OperatorMatrix h = effective_hamiltonian(build_h_laser(antisymmetric(o1), b), p);
  const StateVector g = ket(b, 0, {0, 0});
  const StateVector a = singlet_state(b, 0, 1);
  CHECK((evolve_effective(h, p, g, 0.0).amps() - g.amps()).norm() == 0.0);
  const double t_half = std::numbers::pi * std::sqrt(2.0) / (2.0 * o1);
  CHECK(half_transfer_time(antisymmetric(o1)) == doctest::Approx(t_half).epsilon(1e-14));
  CHECK(state_fidelity(evolve_effective(h, p, g, t_half), a) == doctest::Approx(1.0).epsilon(1e-12));
  for (double t : {3.0, 17.0, 40.0}) {
    const StateVector psi = evolve_effective(h, p, g, t);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
    const double c = o1 / std::sqrt(2.0);
    CHECK(std::norm(a.inner(psi)) == doctest::Approx(std::pow(std::sin(c * t), 2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(evolve_effective(h, p, ket(b, 0, {1, 0}), 1.0), InvalidArgument);
}

TEST_CASE("full dynamics oscillation period matches the effective prediction") {
  const SystemParams params{1.0, 1.0, 1e-3, 2};
  const LaserConfig laser = antisymmetric(0.05);
  const StateVector psi0 = ket(two_atom_basis(), 0, {0, 0});
  const double period = 2.0 * half_transfer_time(laser);
  const ZenoComparison z = simulate_zeno_pulse(params, laser, psi0, 2.0 * period, 2000);
  CHECK(z.labels == std::vector<std::string>{"000", "0a"});
  CHECK(z.t.size() == 2000);
  const double measured = 2.0 * crossing_spacing(z.t, z.full_populations[0]);
  CHECK(std::abs(measured / period - 1.0) <= 0.03);
  CHECK(z.max_deviation <= 0.05);
  for (std::size_t i = 0; i < z.t.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      CHECK(z.full_populations[k][i] >= 0.0);
      CHECK(z.full_populations[k][i] <= 1.0 + 1e-12);
    }
  }
  CHECK(z.final_no_jump_probability < 1.0);
  CHECK(z.final_no_jump_probability > 0.5);
}

TEST_CASE("undriven pulse is static") {
  const SystemParams params{1.0, 1.0, 0.0, 2};
  const StateVector psi0 = singlet_state(two_atom_basis(), 0, 1);
  const ZenoComparison z = simulate_zeno_pulse(params, antisymmetric(0.0), psi0, 50.0, 100);
  CHECK(z.max_deviation <= 1e-12);
  CHECK(z.final_no_jump_probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("strong drive breaks the effective description") {
  const SystemParams params{1.0, 1.0, 0.0, 2};
  const StateVector psi0 = ket(two_atom_basis(), 0, {0, 0});
  const LaserConfig strong = antisymmetric(0.5);
  CHECK_FALSE(zeno_regime_check(params, strong).satisfied);
  const ZenoComparison z = simulate_zeno_pulse(params, strong, psi0, half_transfer_time(strong), 500);
  CHECK_FALSE(z.regime.satisfied);
  CHECK(z.max_deviation > 0.05);
  // Deviation shrinks as the drive weakens over a decade.
  double prev = INFINITY;
  for (double o1 : {0.2, 0.063, 0.02}) {
    const LaserConfig l = antisymmetric(o1);
    const double dev = simulate_zeno_pulse(params, l, psi0, half_transfer_time(l), 500).max_deviation;
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("regime check") {
  const SystemParams params{1.0, 1.0, 1e-4, 2};
  CHECK(zeno_regime_check(params, antisymmetric(0.01)).satisfied);
  CHECK_FALSE(zeno_regime_check(params, antisymmetric(0.5)).satisfied);
  CHECK_FALSE(zeno_regime_check(SystemParams{1.0, 1.0, 0.01, 2}, antisymmetric(0.05)).satisfied);
}

TEST_CASE("Zeno confinement over one effective Rabi period") {
  const StateVector psi0 = ket(two_atom_basis(), 0, {0, 0});
  // Ratios of at least 20 for each inequality of the weak-drive regime.
  for (auto [g, kappa] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
    const SystemParams params{g, kappa, 0.0, 2};
    const double limit = std::min(kappa, g * g / kappa);
    const double ratio = g == kappa ? 25.0 : 20.0;
    const LaserConfig laser = antisymmetric(limit / ratio);
    CHECK(zeno_regime_check(params, laser, 20.0).satisfied);
    const double period = 2.0 * half_transfer_time(laser);
    CHECK(leaked_probability(params, laser, psi0, period) <= 0.05);
  }
}

TEST_CASE("preparation success rate") {
  const SystemParams ideal{1.0, 1.0, 0.0, 2};
  const PreparationPoint p = preparation_success_rate(ideal, 0.001);
  CHECK(p.p0 >= 0.999);
  CHECK(p.fidelity >= 0.999);
  CHECK(p.t_pulse == doctest::Approx(half_transfer_time(antisymmetric(0.001))));

  const std::vector<double> omegas{0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2};
  const auto s0 = success_sweep(ideal, omegas, {0.0}, 2);
  for (std::size_t i = 1; i < s0.size(); ++i) CHECK(s0[i].p0 <= s0[i - 1].p0 + 1e-12);

  const auto s1 = success_sweep(ideal, omegas, {1e-3}, 2);
  std::size_t best = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1[i].p0 > s1[best].p0) best = i;
  }
  CHECK(best > 0);
  CHECK(best + 1 < s1.size());
  CHECK(s1[best].fidelity >= 0.99);

  // Gamma is the outer loop; serial and threaded sweeps agree.
  const auto grid = success_sweep(ideal, {0.01, 0.02}, {0.0, 1e-3, 1e-2}, 3);
  REQUIRE(grid.size() == 6);
  CHECK(grid[2].gamma == 1e-3);
  CHECK(grid[3].omega1 == 0.02);
  const auto serial = success_sweep(ideal, {0.01, 0.02}, {0.0, 1e-3, 1e-2}, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i].p0 == serial[i].p0);
}
