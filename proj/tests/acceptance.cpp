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


// Acceptance suite: one PASS/FAIL line per primary criterion, with the
// tolerances fixed below. Exit status is 0 when the set of failing criteria is
// exactly the set passed with --expect-fail (comma separated ids).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qjump/conditional.hpp"
#include "qjump/dfs.hpp"
#include "qjump/lindblad.hpp"
#include "qjump/teleport.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/zeno.hpp"

using namespace qjump;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------------------
// Test-side oracles

// H_cond on (|001>, |010>, |100>) written out by hand.
Eigen::Matrix3cd single_excitation_block(double g, double kappa, double gamma) {
  Eigen::Matrix3cd h;
  h << Complex(0, -gamma), 0, Complex(0, g),
       0, Complex(0, -gamma), Complex(0, g),
       Complex(0, -g), Complex(0, -g), Complex(0, -kappa);
  return h;
}

CVector propagate(const CMatrix& h, const CVector& v, double t) {
  return (Complex(0.0, -t) * h).exp() * v;
}

double half_period_from_crossings(const std::vector<double>& t, const std::vector<double>& pop) {
  std::vector<double> xs;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = pop[i - 1] - 0.5;
    const double b = pop[i] - 0.5;
    if (a * b < 0.0) xs.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
  }
  return xs.size() < 2 ? NAN : (xs.back() - xs.front()) / double(xs.size() - 1);
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Kernel dimension of J_- from per-excitation-sector ranks, with J_- built from
// bit operations (atom i excited <-> bit i set).
int kernel_dimension(int n) {
  int total = 0;
  for (int k = 0; k <= n; ++k) {
    std::vector<unsigned> upper;
    std::vector<unsigned> lower;
    for (unsigned s = 0; s < (1u << n); ++s) {
      const int pc = std::popcount(s);
      if (pc == k) upper.push_back(s);
      if (pc == k - 1) lower.push_back(s);
    }
    if (lower.empty()) {
      total += int(upper.size());
      continue;
    }
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(Index(lower.size()), Index(upper.size()));
    for (std::size_t c = 0; c < upper.size(); ++c) {
      for (int i = 0; i < n; ++i) {
        if (!(upper[c] >> i & 1u)) continue;
        const unsigned target = upper[c] & ~(1u << i);
        const auto row = std::lower_bound(lower.begin(), lower.end(), target) - lower.begin();
        j(row, Index(c)) = 1.0;
      }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(j);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Index i = 0; i < s.size(); ++i) rank += s(i) > 1e-9 * s(0);
    total += int(upper.size()) - rank;
  }
  return total;
}

// Unconditional density from trajectories through a sequence of stages.
struct Stage {
  const JumpUnraveling* engine;
  double duration;
};

CMatrix trajectory_density(const std::vector<Stage>& stages, const StateVector& psi0,
                           std::uint64_t master, std::size_t n) {
  CMatrix rho = CMatrix::Zero(psi0.dim(), psi0.dim());
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(derive_seed(master, k));
    std::vector<JumpEvent> events;
    StateVector psi = psi0;
    double t = 0.0;
    for (const auto& s : stages) {
      psi = s.engine->evolve(psi, t, s.duration, rng, events);
      t += s.duration;
    }
    rho += psi.amps() * psi.amps().adjoint();
  }
  return rho / double(n);
}

CMatrix lindblad_density(const std::vector<Stage>& stages, const StateVector& psi0, double dt) {
  CMatrix rho = psi0.amps() * psi0.amps().adjoint();
  for (const auto& s : stages) {
    rho = master_equation_oracle(s.engine->h_cond(), s.engine->jumps(), rho, s.duration, dt);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome eigenvalue_closed_form() {
  Rng rng(20260101);
  double literal = 0.0;
  double corrected = 0.0;
  double lambda1 = 0.0;
  double overlap_gap = 0.0;
  const Eigen::Vector3cd singlet(std::sqrt(0.5), -std::sqrt(0.5), 0.0);
  for (int k = 0; k < 100; ++k) {
    const double g = 0.1 + 2.0 * rng.uniform();
    const double kappa = 0.1 + 2.0 * rng.uniform();
    const double gamma = 0.2 * rng.uniform();
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(single_excitation_block(g, kappa, gamma));
    const auto& ev = es.eigenvalues();
    const Complex inv2i = 1.0 / Complex(0.0, 2.0);
    const double lit_root = std::sqrt(8 * g * g + (kappa - gamma) * (kappa - gamma));
    const Complex cor_root = std::sqrt(Complex(8 * g * g - (kappa - gamma) * (kappa - gamma), 0.0));
    auto nearest = [&](Complex z) {
      double best = INFINITY;
      for (Index i = 0; i < 3; ++i) best = std::min(best, std::abs(ev(i) - z));
      return best;
    };
    for (double s : {1.0, -1.0}) {
      literal = std::max(literal, nearest(inv2i * (kappa + gamma + s * kI * lit_root)));
      corrected = std::max(corrected, nearest(inv2i * (kappa + gamma + s * kI * cor_root)));
    }
    // lambda_1 = 0 claim, and the singlet eigenvector.
    lambda1 = std::max(lambda1, nearest(Complex(0.0)));
    Index best = 0;
    for (Index i = 1; i < 3; ++i) {
      if (std::norm(singlet.dot(es.eigenvectors().col(i))) > std::norm(singlet.dot(es.eigenvectors().col(best)))) best = i;
    }
    overlap_gap = std::max(overlap_gap, 1.0 - std::norm(singlet.dot(es.eigenvectors().col(best).normalized())));
  }
  Outcome o;
  o.pass = literal <= 1e-10 && lambda1 <= 1e-10 && overlap_gap <= 1e-10;
  o.detail = fmt::format(
      "plus-sign roots max error {:.3g}, lambda_1 = 0 max error {:.3g}, 1 - |<0a|v1>|^2 max {:.2g}; "
      "roots with sqrt(8g^2 - (kappa - gamma)^2) and lambda_1 = -i gamma agree to {:.2g}",
      literal, lambda1, overlap_gap, corrected);
  return o;
}

Outcome half_preparation() {
  const SystemParams p{1.0, 1.0, 0.0, 2};
  const CompositeBasis b = two_atom_basis();
  const StateVector psi0 = ket(b, 0, {1, 0});
  const double analytic = propagate(build_h_cond(p, b).matrix(), psi0.amps(), 30.0).squaredNorm();
  const auto recs = simulate_ensemble(p, psi0, 30.0, max_step(p), 42, 10000);
  const double mc = survival_fraction(recs);
  Outcome o;
  o.pass = std::abs(analytic - 0.5) <= 0.001 && std::abs(mc - 0.5) <= 0.02;
  o.detail = fmt::format("analytic P0(30/g) = {:.6f} (0.500 +- 0.001), 1e4 trajectories {:.4f} (0.50 +- 0.02)",
                         analytic, mc);
  return o;
}

Outcome singlet_formation() {
  const SystemParams p{1.0, 1.0, 1e-3, 2};
  const CompositeBasis b = two_atom_basis();
  const CMatrix h = build_h_cond(p, b).matrix();
  const CVector psi0 = ket(b, 0, {1, 0}).amps();
  const Index i100 = b.index_of(1, {0, 0});
  const Index i010 = b.index_of(0, {1, 0});
  const Index i001 = b.index_of(0, {0, 1});
  const double dt = 0.01;
  const CMatrix u = (Complex(0.0, -dt) * h).exp();
  CVector v = psi0;
  // Per-window maximum distance of (|c100|, |c010|, |c001|) from (0, 1/sqrt2, 1/sqrt2),
  // windows of 2.5/g (longer than half the slow oscillation period) after t = 2.5/g.
  std::vector<double> window_max(6, 0.0);
  for (int s = 1; s <= 1500; ++s) {
    v = u * v;
    const double t = s * dt;
    const CVector n = v / v.norm();
    const double d = std::abs(std::abs(n(i100))) + std::abs(std::abs(n(i010)) - std::sqrt(0.5)) +
                     std::abs(std::abs(n(i001)) - std::sqrt(0.5));
    const int w = int(t / 2.5) - 1;
    if (w >= 0 && w < 6) window_max[w] = std::max(window_max[w], d);
  }
  const CVector n = v / v.norm();
  const double overlap = std::norm((n(i010) - n(i001)) / std::sqrt(2.0));
  bool monotone = true;
  for (std::size_t w = 1; w + 1 < window_max.size(); ++w) monotone &= window_max[w] <= window_max[w - 1];
  Outcome o;
  o.pass = overlap >= 0.999 && monotone;
  o.detail = fmt::format("|<0a|psi(15/g)>|^2 = {:.7f} (>= 0.999); window deviations {:.2e} {:.2e} {:.2e} {:.2e} {:.2e} {}",
                         overlap, window_max[0], window_max[1], window_max[2], window_max[3],
                         window_max[4], monotone ? "non-increasing" : "NOT monotone");
  return o;
}

Outcome dfs_dimensions() {
  bool ok = true;
  std::string dims;
  for (int n = 1; n <= 10; ++n) {
    const int numeric = kernel_dimension(n);
    const int library = int(kernel_basis(n).dimension());
    const int expected = int(choose(n, n % 2 == 0 ? n / 2 : (n + 1) / 2));
    ok &= numeric == expected && library == expected;
    dims += fmt::format("{}{}", n > 1 ? "," : "", numeric);
  }
  const double rel = std::abs(dfs_dimension_asymptotic(10) / choose(10, 5) - 1.0);
  Outcome o;
  o.pass = ok && rel <= 0.03;
  o.detail = fmt::format("kernel dimensions N=1..10: {}; asymptotic rel. error at N=10 {:.4f} (<= 0.03)", dims, rel);
  return o;
}

Outcome effective_hamiltonian_check() {
  const CompositeBasis b = two_atom_basis();
  const OperatorMatrix proj = dfs_projector(2);
  double worst = 0.0;
  for (auto [o1, o2] : {std::pair{0.05, -0.05}, std::pair{0.1, 0.02}, std::pair{-0.03, 0.08}}) {
    const CMatrix h = effective_hamiltonian(build_h_laser(LaserConfig{{o1, o2}, 0.0}, b), proj).matrix();
    // |a> with atom 1 excited first: (|10> - |01>)/sqrt2 over (atom 1, atom 2).
    CVector a = CVector::Zero(b.dim());
    a(b.index_of(0, {1, 0})) = std::sqrt(0.5);
    a(b.index_of(0, {0, 1})) = -std::sqrt(0.5);
    const CVector g = ket(b, 0, {0, 0}).amps();
    Eigen::Matrix2cd m;
    m << g.dot(h * g), g.dot(h * a), a.dot(h * g), a.dot(h * a);
    Eigen::Matrix2cd expected;
    const double c = (o1 - o2) / (2.0 * std::sqrt(2.0));
    expected << 0.0, c, c, 0.0;
    // Nothing outside span{|000>, |0a>}.
    const CMatrix outside = h - (g * g.adjoint() + a * a.adjoint()) * h * (g * g.adjoint() + a * a.adjoint());
    worst = std::max({worst, (m - expected).cwiseAbs().maxCoeff(), outside.cwiseAbs().maxCoeff()});
  }
  const LaserConfig laser{{0.05, -0.05}, 0.0};
  const double period = kPi / (0.1 / (2.0 * std::sqrt(2.0)));
  const ZenoComparison z = simulate_zeno_pulse(SystemParams{1.0, 1.0, 1e-3, 2}, laser,
                                               ket(b, 0, {0, 0}), 2.0 * period, 2000);
  const double measured = 2.0 * half_period_from_crossings(z.t, z.full_populations[0]);
  const double rel = std::abs(measured / period - 1.0);
  Outcome o;
  o.pass = worst <= 4.0 * std::numeric_limits<double>::epsilon() * 0.1 && rel <= 0.03;
  o.detail = fmt::format("max |H_eff - (Omega_1 - Omega_2)/(2 sqrt2) sigma_x| = {:.2g}; full-dynamics period {:.4f} vs {:.4f} (rel {:.4f} <= 0.03)",
                         worst, measured, period, rel);
  return o;
}

Outcome zeno_success() {
  const SystemParams ideal{1.0, 1.0, 0.0, 2};
  const CompositeBasis b = two_atom_basis();
  // Direct evaluation: P0 after the half-transfer pulse at Omega_1 = 1e-3.
  const double w = 1e-3;
  const LaserConfig weak{{w, -w}, 0.0};
  const double t = kPi * std::sqrt(2.0) / (2.0 * w);
  const CVector psi = propagate((build_h_cond(ideal, b) + build_h_laser(weak, b)).matrix(),
                                ket(b, 0, {0, 0}).amps(), t);
  const double p0_small = psi.squaredNorm();

  std::vector<double> omegas;
  for (int i = 0; i <= 40; ++i) omegas.push_back(1e-3 * std::pow(300.0, i / 40.0));
  const auto sweep = success_sweep(ideal, omegas, {1e-3});
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].p0 > sweep[best].p0) best = i;
  }
  const bool interior = best > 0 && best + 1 < sweep.size();
  Outcome o;
  o.pass = p0_small >= 0.999 && interior && sweep[best].fidelity >= 0.99;
  o.detail = fmt::format("Gamma=0: P0(Omega_1=1e-3) = {:.6f} (>= 0.999); Gamma=1e-3: maximum P0 = {:.4f} at Omega_1 = {:.4g} ({}), fidelity {:.5f} (>= 0.99)",
                         p0_small, sweep[best].p0, sweep[best].omega1, interior ? "interior" : "at the grid edge",
                         sweep[best].fidelity);
  return o;
}

Outcome teleport_headline() {
  const TeleportParams p = TeleportParams::reference_regime();
  const double kappa_mhz = p.kappa / (2.0 * kPi);  // 0.01, as in (10:10:0.01:1:100) MHz
  const double td = 0.5 / kappa_mhz;               // us
  const double f_half = average_fidelity(p, td).fidelity;
  const double f_lossy = average_fidelity(p, 20.0 / kappa_mhz, 0.6).fidelity;
  bool monotone = true;
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double f = average_fidelity(p, i * (1.0 / kappa_mhz) / 50.0).fidelity;
    monotone &= f >= prev - 1e-12;
    prev = f;
  }
  // Independent midpoint rule over the sphere for the headline value.
  double acc = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double c = -1.0 + (i + 0.5) / 100.0;
    for (int j = 0; j < 8; ++j) acc += fidelity_eta(QubitAmplitudes::bloch(std::acos(c), 2 * kPi * j / 8), p, td, 1.0);
  }
  const double f_mid = acc / 1600.0;
  // Monte Carlo cross-check at one input with finite efficiency.
  const QubitAmplitudes in = QubitAmplitudes::bloch(1.0, 0.5);
  const auto runs = run_protocol_ensemble(in, p, td, 0.6, 99, 4000);
  const double dist = trace_distance(success_conditioned_density(runs), teleported_density(in, p, td, 0.6));
  Outcome o;
  o.pass = f_half >= 0.99 && std::abs(f_lossy - 0.81) <= 0.03 && monotone &&
           std::abs(f_mid - f_half) <= 1e-4 && dist <= 0.03;
  o.detail = fmt::format("F(t_D = 0.5/kappa = {:.0f} us) = {:.5f} (>= 0.99; midpoint rule {:.5f}); eta = 0.6, t_D = 20/kappa: {:.4f} (0.81 +- 0.03); curve {}; MC trace distance at eta = 0.6: {:.4f}",
                         td, f_half, f_mid, f_lossy, monotone ? "non-decreasing" : "NOT monotone", dist);
  return o;
}

Outcome oracle_equivalence() {
  const std::size_t n = 10000;
  const double bound = 3.0 / std::sqrt(double(n));
  std::string detail;
  double worst = 0.0;
  auto record = [&](const std::string& name, const CMatrix& traj, const CMatrix& oracle) {
    const double d = trace_distance(traj, oracle);
    worst = std::max(worst, d);
    detail += fmt::format("{} {:.4f}; ", name, d);
  };

  const CompositeBasis b = two_atom_basis();
  struct Case {
    std::string name;
    SystemParams params;
    std::vector<Complex> omega;
    StateVector psi0;
    double t;
  };
  const std::vector<Case> cases = {
      {"half-preparation", {1.0, 1.0, 0.0, 2}, {0.0, 0.0}, ket(b, 0, {1, 0}), 5.0},
      {"singlet formation", {1.0, 1.0, 1e-3, 2}, {0.0, 0.0}, ket(b, 0, {1, 0}), 15.0},
      {"lossy atoms", {1.0, 0.5, 0.1, 2}, {0.0, 0.0}, ket(b, 0, {1, 0}), 8.0},
      {"zeno drive", {1.0, 1.0, 1e-2, 2}, {0.2, -0.2}, ket(b, 0, {0, 0}), 20.0},
  };
  for (const auto& c : cases) {
    const OperatorMatrix h = build_h_cond(c.params, b) + build_h_laser(LaserConfig{c.omega, 0.0}, b);
    const JumpUnraveling engine(h, jump_operators(c.params, b), 0.01 / c.params.max_rate());
    const std::vector<Stage> stages{{&engine, c.t}};
    record(c.name, trajectory_density(stages, c.psi0, 7, n), lindblad_density(stages, c.psi0, 1e-3));
  }

  // Teleportation: Bob's lead, both preparations, detection window.
  const TeleportParams p = TeleportParams::reference_regime();
  const TeleportModel m = build_teleport_model(p);
  const double t_i = mapping_time(p.e_rate(), p.kappa);
  const double t_e = entangling_time(p.e_rate(), p.kappa);
  const double dt = 0.01 / p.e_rate();
  const JumpUnraveling bob(m.h_bob + m.h_detect, m.leak_jumps, dt);
  const JumpUnraveling both(m.h_alice + m.h_bob + m.h_detect, m.leak_jumps, dt);
  const JumpUnraveling detect(m.h_detect, m.detector_jumps, 0.01 / p.kappa);
  const std::vector<Stage> stages{{&bob, t_e - t_i}, {&both, t_i}, {&detect, kPi / p.kappa}};
  const StateVector psi0 = teleport_initial_state(m, QubitAmplitudes::bloch(1.1, 0.4));
  std::vector<Stage> prep(stages.begin(), stages.begin() + 2);
  const CMatrix rho_prep = lindblad_density(prep, psi0, 1e-4);
  const CMatrix rho = master_equation_oracle(detect.h_cond(), detect.jumps(), rho_prep, kPi / p.kappa, 1e-2);
  record("teleportation", trajectory_density(stages, psi0, 8, n), rho);

  Outcome o;
  o.pass = worst <= bound;
  o.detail = detail + fmt::format("bound 3/sqrt(1e4) = {:.2f}", bound);
  return o;
}

Outcome insurance() {
  const TeleportParams p = TeleportParams::reference_regime();
  // Success probability from direct integration of the exchange dynamics.
  auto amplitudes = [&](double t) {
    Eigen::Matrix2cd h;
    h << 0.0, p.e_rate(), p.e_rate(), Complex(0.0, -p.kappa);
    return Eigen::Vector2cd((Complex(0.0, -t) * h).exp().col(0));
  };
  const double alpha = std::abs(amplitudes(mapping_time(p.e_rate(), p.kappa))(1));
  const double beta2 = amplitudes(entangling_time(p.e_rate(), p.kappa)).squaredNorm();
  const double p_success = 0.5 * (1.0 + alpha * alpha) * beta2 * 0.5;

  const QubitAmplitudes in = QubitAmplitudes::bloch(2.1, -0.9);
  const int episodes = 1000;
  double sum = 0.0;
  double worst = 0.0;
  int failures = 0;
  bool all_done = true;
  for (int k = 0; k < episodes; ++k) {
    const InsuranceEpisode ep = run_insured_episode(in, p, kPi / p.kappa, 1.0, derive_seed(314, k));
    all_done &= ep.success;
    sum += ep.attempts;
    failures += ep.attempts - 1;
    if (ep.attempts > 1) worst = std::max(worst, 1.0 - ep.min_recovery_fidelity);
  }
  const double mean = sum / episodes;
  const double sigma = std::sqrt((1.0 - p_success) / (p_success * p_success) / episodes);
  Outcome o;
  o.pass = all_done && failures > 0 && worst <= 1e-10 && std::abs(mean - 1.0 / p_success) <= 3.0 * sigma;
  o.detail = fmt::format("{} failed attempts, worst recovery 1 - F = {:.2g} (<= 1e-10); mean attempts {:.4f} vs 1/P = {:.4f} +- {:.4f} (3 sigma {:.4f})",
                         failures, worst, mean, 1.0 / p_success, sigma, 3.0 * sigma);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string id;
      while (std::getline(ss, id, ',')) expected.insert(id);
    } else {
      std::cerr << "usage: qjump_acceptance [--expect-fail id,id,...]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {"eigenvalue_closed_form", eigenvalue_closed_form},
      {"half_preparation", half_preparation},
      {"singlet_formation", singlet_formation},
      {"dfs_dimensions", dfs_dimensions},
      {"effective_hamiltonian", effective_hamiltonian_check},
      {"zeno_success_sweep", zeno_success},
      {"teleport_headline", teleport_headline},
      {"oracle_equivalence", oracle_equivalence},
      {"insurance", insurance},
  };
  std::set<std::string> failed;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) failed.insert(c.id);
    std::cout << fmt::format("{} {} [{:.1f} s] {}", o.pass ? "PASS" : "FAIL", c.id, secs, o.detail) << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed.size(), criteria.size());
  if (!expected.empty()) {
    std::cout << "; expected failures:";
    for (const auto& id : expected) std::cout << ' ' << id;
  }
  std::cout << '\n';
  return failed == expected ? 0 : 1;
}
