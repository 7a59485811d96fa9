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


#include "qjump/zeno.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qjump/errors.hpp"
#include "qjump/expm.hpp"
#include "qjump/log.hpp"
#include "qjump/parallel.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

RegimeReport zeno_regime_check(const SystemParams& params, const LaserConfig& laser,
                               double ratio) {
  params.validate();
  RegimeReport r;
  r.threshold = ratio;
  double margin = std::numeric_limits<double>::infinity();
  const double upper = params.kappa > 0.0
                           ? std::min(params.kappa, params.g * params.g / params.kappa)
                           : 0.0;
  for (const Complex& w : laser.omega) {
    const double a = std::abs(w);
    if (a == 0.0) continue;
    if (params.gamma > 0.0) margin = std::min(margin, a / params.gamma);
    margin = std::min(margin, upper / a);
  }
  r.ratio = margin;
  r.satisfied = margin >= ratio;
  std::ostringstream d;
  d << "min(|Omega|/Gamma, min(kappa, g^2/kappa)/|Omega|) = " << margin
    << (r.satisfied ? " >= " : " < ") << ratio;
  r.description = d.str();
  return r;
}

OperatorMatrix build_h_laser(const LaserConfig& laser, const CompositeBasis& basis) {
  if (static_cast<int>(laser.omega.size()) != basis.n_atoms()) {
    throw InvalidArgument("laser has " + std::to_string(laser.omega.size()) +
                          " Rabi frequencies for " + std::to_string(basis.n_atoms()) + " atoms");
  }
  OperatorMatrix h = OperatorMatrix::zero(basis);
  for (int a = 0; a < basis.n_atoms(); ++a) {
    if (laser.omega[a] == Complex(0.0)) continue;
    const OperatorMatrix half = lowering_op(basis, a, 1, 0) * (0.5 * laser.omega[a]);
    h = h + half + half.adjoint();
  }
  return h;
}

OperatorMatrix effective_hamiltonian(const OperatorMatrix& h_laser, const OperatorMatrix& projector) {
  if (!(h_laser.basis() == projector.basis())) {
    throw InvalidArgument("laser Hamiltonian and projector live in different bases");
  }
  return projector * h_laser * projector;
}

StateVector evolve_effective(const OperatorMatrix& h_eff, const OperatorMatrix& projector,
                             const StateVector& psi0, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be >= 0");
  const double outside = (psi0.amps() - projector.matrix() * psi0.amps()).norm();
  if (outside > 1e-8 * std::max(1.0, psi0.norm())) {
    throw InvalidArgument("initial state leaves the decoherence-free subspace (residual " +
                          std::to_string(outside) + ")");
  }
  return OperatorMatrix(h_eff.basis(), expm(Complex(0.0, -t) * h_eff.matrix())).apply(psi0);
}

double effective_coupling(const LaserConfig& laser) {
  if (laser.omega.size() != 2) throw InvalidArgument("effective coupling defined for two atoms");
  return std::abs(laser.omega[0] - laser.omega[1]) / (2.0 * std::numbers::sqrt2);
}

double half_transfer_time(const LaserConfig& laser) {
  const double c = effective_coupling(laser);
  if (!(c > 0.0)) throw DomainError("drive does not couple |000> to |0a> (Omega_1 == Omega_2)");
  return std::numbers::pi / (2.0 * c);
}

namespace {

std::vector<std::string> dfs_labels(const DfsBasis& dfs) {
  std::vector<std::string> labels;
  if (dfs.n_atoms == 2 && dfs.dimension() == 2) return {"000", "0a"};
  for (Index k = 0; k < dfs.dimension(); ++k) labels.push_back("dfs" + std::to_string(k));
  return labels;
}

}  // namespace

ZenoComparison simulate_zeno_pulse(const SystemParams& params, const LaserConfig& laser,
                                   const StateVector& psi0, double t_pulse, int n_points) {
  if (!(t_pulse >= 0.0) || !std::isfinite(t_pulse)) throw InvalidArgument("t_pulse must be >= 0");
  if (n_points < 2) throw InvalidArgument("need at least two grid points");
  const CompositeBasis& basis = psi0.basis();
  if (basis.n_atoms() != params.n_atoms) throw InvalidArgument("state/params atom count mismatch");

  ZenoComparison out;
  out.regime = zeno_regime_check(params, laser);
  if (!out.regime.satisfied) warn("Zeno pulse outside its rate regime: " + out.regime.description);

  const DfsBasis dfs = kernel_basis(params.n_atoms, basis.fock_cutoff());
  if (!(dfs.basis == basis)) throw InvalidArgument("state basis does not match the DFS basis");
  const OperatorMatrix projector = dfs_projector(dfs);
  const OperatorMatrix h_laser = build_h_laser(laser, basis);
  const OperatorMatrix h_eff = effective_hamiltonian(h_laser, projector);
  const OperatorMatrix h_full = build_h_cond(params, basis) + h_laser;

  const double h = t_pulse / (n_points - 1);
  const CMatrix u_full = expm(Complex(0.0, -h) * h_full.matrix());
  const CMatrix u_eff = expm(Complex(0.0, -h) * h_eff.matrix());
  (void)evolve_effective(h_eff, projector, psi0, 0.0);  // DFS membership check

  const Index d = dfs.dimension();
  out.labels = dfs_labels(dfs);
  out.full_populations.assign(d, {});
  out.effective_populations.assign(d, {});
  CVector full = psi0.normalized().amps();
  CVector eff = full;
  for (int i = 0; i < n_points; ++i) {
    if (i > 0) {
      full = u_full * full;
      eff = u_eff * eff;
    }
    const double p0 = full.squaredNorm();
    if (!std::isfinite(p0) || !(p0 > 0.0)) throw NumericalError("driven evolution lost all norm");
    const CVector fn = full / std::sqrt(p0);
    const CVector en = eff / eff.norm();
    out.t.push_back(h * i);
    double inside = 0.0;
    for (Index k = 0; k < d; ++k) {
      const double pf = std::norm(dfs.vectors.col(k).dot(fn));
      const double pe = std::norm(dfs.vectors.col(k).dot(en));
      out.full_populations[k].push_back(pf);
      out.effective_populations[k].push_back(pe);
      out.max_deviation = std::max(out.max_deviation, std::abs(pf - pe));
      inside += pf;
    }
    out.outside_population.push_back(std::max(0.0, 1.0 - inside));
    out.no_jump_probability.push_back(p0);
  }
  out.final_no_jump_probability = out.no_jump_probability.back();
  return out;
}

PreparationPoint preparation_success_rate(const SystemParams& params, double omega1,
                                          double t_pulse) {
  if (params.n_atoms != 2) throw InvalidArgument("preparation scheme uses two atoms");
  LaserConfig laser{{Complex(omega1), Complex(-omega1)}, 0.0};
  if (t_pulse <= 0.0) t_pulse = half_transfer_time(laser);
  laser.t_pulse = t_pulse;
  const CompositeBasis basis = two_atom_basis();
  const OperatorMatrix h = build_h_cond(params, basis) + build_h_laser(laser, basis);
  const StateVector psi = propagate_nojump(h, ket(basis, 0, {0, 0}), t_pulse);
  PreparationPoint p;
  p.omega1 = omega1;
  p.gamma = params.gamma;
  p.t_pulse = t_pulse;
  p.p0 = psi.norm_squared();
  p.fidelity = state_fidelity(psi, singlet_target(basis));
  return p;
}

std::vector<PreparationPoint> success_sweep(const SystemParams& params,
                                            const std::vector<double>& omegas,
                                            const std::vector<double>& gammas,
                                            unsigned threads) {
  std::vector<PreparationPoint> out(omegas.size() * gammas.size());
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    SystemParams p = params;
    p.gamma = gammas[idx / omegas.size()];
    out[idx] = preparation_success_rate(p, omegas[idx % omegas.size()]);
  });
  return out;
}

double leaked_probability(const SystemParams& params, const LaserConfig& laser,
                          const StateVector& psi0, double t) {
  const CompositeBasis& basis = psi0.basis();
  const OperatorMatrix projector = dfs_projector(params.n_atoms, basis.fock_cutoff());
  const OperatorMatrix h = build_h_cond(params, basis) + build_h_laser(laser, basis);
  const StateVector psi = propagate_nojump(h, psi0.normalized(), t);
  return 1.0 - (projector.matrix() * psi.amps()).squaredNorm();
}

}  // namespace qjump
