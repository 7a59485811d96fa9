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

#include <string>
#include <vector>

#include "qjump/conditional.hpp"
#include "qjump/dfs.hpp"

namespace qjump {

struct LaserConfig {
  /// Complex Rabi frequency per atom.
  std::vector<Complex> omega;
  double t_pulse = 0.0;
};

/// Checks gamma <= |Omega_i| / ratio and |Omega_i| <= min(kappa, g^2/kappa) / ratio
/// for every nonzero Omega_i. `ratio` reports the smallest margin found.
RegimeReport zeno_regime_check(const SystemParams& params, const LaserConfig& laser,
                               double ratio = 10.0);

/// H_laser = (1/2) sum_i Omega_i sigma_i + h.c.
OperatorMatrix build_h_laser(const LaserConfig& laser, const CompositeBasis& basis);

/// H_eff = P H_laser P.
OperatorMatrix effective_hamiltonian(const OperatorMatrix& h_laser, const OperatorMatrix& projector);

/// exp(-i H_eff t) psi0. Throws InvalidArgument if psi0 has a component
/// outside the projector's range above 1e-8.
StateVector evolve_effective(const OperatorMatrix& h_eff, const OperatorMatrix& projector,
                             const StateVector& psi0, double t);

/// Two-atom drive: |<000|H_eff|0a>| = |Omega_1 - Omega_2| / (2 sqrt 2).
double effective_coupling(const LaserConfig& laser);

/// pi / (2 c): time for complete |000> -> |0a> transfer under H_eff.
double half_transfer_time(const LaserConfig& laser);

struct ZenoComparison {
  std::vector<double> t;
  std::vector<std::string> labels;
  /// populations[k][i]: DFS basis vector k at grid point i (normalized state).
  std::vector<std::vector<double>> full_populations;
  std::vector<std::vector<double>> effective_populations;
  /// 1 - sum_k full_populations[k][i].
  std::vector<double> outside_population;
  /// ||U_cond(t_i, 0) psi0||^2 of the driven conditional dynamics.
  std::vector<double> no_jump_probability;
  double max_deviation = 0.0;
  double final_no_jump_probability = 1.0;
  RegimeReport regime;
};

/// Runs psi0 under H_cond + H_laser (no-jump, normalized) and under H_eff on a
/// uniform grid of n_points over [0, t_pulse] and compares DFS populations.
/// The grid step is propagated exactly with the matrix exponential.
ZenoComparison simulate_zeno_pulse(const SystemParams& params, const LaserConfig& laser,
                                   const StateVector& psi0, double t_pulse, int n_points = 2000);

struct PreparationPoint {
  double omega1 = 0.0;
  double gamma = 0.0;
  double t_pulse = 0.0;
  double p0 = 0.0;
  double fidelity = 0.0;
};

/// Two atoms from |000> with Omega_2 = -Omega_1. t_pulse <= 0 selects
/// half_transfer_time. p0 is the no-jump probability over the pulse and
/// fidelity the overlap of the normalized final state with |0a>.
PreparationPoint preparation_success_rate(const SystemParams& params, double omega1,
                                          double t_pulse = 0.0);

/// preparation_success_rate over the grid omegas x gammas (gamma outer).
std::vector<PreparationPoint> success_sweep(const SystemParams& params,
                                            const std::vector<double>& omegas,
                                            const std::vector<double>& gammas,
                                            unsigned threads = 0);

/// 1 - ||P U(t) psi0||^2 after time t of driven conditional evolution: the
/// probability that is either emitted or sits outside the DFS.
double leaked_probability(const SystemParams& params, const LaserConfig& laser,
                          const StateVector& psi0, double t);

}  // namespace qjump
