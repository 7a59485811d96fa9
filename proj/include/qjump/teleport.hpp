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
#include <cstdint>
#include <string>
#include <vector>

#include "qjump/conditional.hpp"
#include "qjump/trajectory.hpp"

namespace qjump {

/// Rates of the two-cavity teleportation setup, all angular (rad per time
/// unit). Atoms are Lambda systems whose upper level is adiabatically
/// eliminated; they are represented as two-level atoms with g = level 0 and
/// e = level 1. gamma is only used for the constraint checks.
struct TeleportParams {
  double g = 10.0;
  double omega = 10.0;
  double kappa = 0.01;
  double gamma = 1.0;
  double delta = 100.0;
  /// Threshold used for every ">>" constraint.
  double constraint_ratio = 10.0;

  /// (g : Omega : kappa : gamma : Delta) / 2pi = (10 : 10 : 0.01 : 1 : 100) MHz,
  /// expressed in rad/us so that times are in us.
  static TeleportParams reference_regime();

  void validate() const;
  /// E = g Omega / Delta.
  double e_rate() const;
  /// sqrt(4 E^2 - kappa^2); throws DomainError when 4E^2 <= kappa^2.
  double omega_kappa() const;
  /// 2 pi / kappa.
  double cavity_lifetime() const;
  /// g Omega / Delta^2 << 1, Delta >> gamma and Omega_kappa >> kappa.
  std::vector<RegimeReport> constraint_checks() const;
};

struct AdiabaticRates {
  double e = 0.0;
  double omega_kappa = 0.0;
};

AdiabaticRates adiabatic_rates(const TeleportParams& params);

/// Smallest t > 0 with tan(Omega_kappa t / 2) = -Omega_kappa / kappa.
double mapping_time(double e, double kappa);

/// Smallest t > 0 with tan(Omega_kappa t / 2) = -Omega_kappa / (2E + kappa):
/// equal weights and relative phase +i of |e,0> and |g,1> under the damped
/// single-cavity evolution.
double entangling_time(double e, double kappa);

/// Root of tan(Omega_kappa t / 2) = -Omega_kappa / (2E - kappa), kept for comparison.
double entangling_time_minus_kappa(double e, double kappa);

/// alpha(t) = exp(-kappa t/2) (2E / Omega_kappa) sin(Omega_kappa t / 2).
double alpha_coefficient(double e, double kappa, double t);
/// beta(t) = sqrt(2) alpha(t).
double beta_coefficient(double e, double kappa, double t);

/// No-jump amplitudes {c_e0, c_g1} at time t starting from |e,0> under the
/// single-cavity Hamiltonian with cavity damping.
std::array<Complex, 2> damped_exchange_amplitudes(double e, double kappa, double t);

struct QubitAmplitudes {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};

  /// Throws InvalidArgument unless |a|^2 + |b|^2 = 1 to 1e-12.
  void validate() const;
  /// cos(theta/2) |e> + exp(i phi) sin(theta/2) |g>.
  static QubitAmplitudes bloch(double theta, double phi);
  /// (a, b) in (e, g) order.
  CVector vector() const;
};

struct MappingResult {
  /// Normalized cavity amplitudes in (|0>, |1>) order.
  CVector cavity;
  double no_decay_probability = 0.0;
};

/// Closed form: cavity (a alpha |1> + b |0>) / sqrt(|a|^2 alpha^2 + |b|^2) and
/// P_ND(A) = |a|^2 alpha^2 + |b|^2 at alpha = alpha(t_I).
MappingResult map_atom_to_cavity(const QubitAmplitudes& input, const TeleportParams& params);

/// The same quantities from direct no-jump integration of the mapping stage,
/// including the Zeeman pre-phase |e> -> i|e> applied before the mapping.
MappingResult map_atom_to_cavity_integrated(const QubitAmplitudes& input,
                                            const TeleportParams& params);

/// |a|^2 alpha + |b|^2, the linear-alpha variant of the no-decay probability.
double no_decay_probability_linear_alpha(const QubitAmplitudes& input, const TeleportParams& params);

enum class DetectorRecord { kNone, kPlus, kMinus, kMultiple };
std::string to_string(DetectorRecord record);

/// Recorded-event probabilities of the detection window, conditioned on a
/// successful preparation, with each click kept with probability eta.
struct BranchProbabilities {
  double none = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  double multiple = 0.0;
  double sum() const { return none + plus + minus + multiple; }
};

BranchProbabilities branch_probabilities(const QubitAmplitudes& input,
                                         const TeleportParams& params, double t_d,
                                         double eta = 1.0);

/// Probability that both preparations end without a photon emission:
/// P_ND(A) * beta(t_E)^2.
double preparation_probability(const QubitAmplitudes& input, const TeleportParams& params);

/// Bob's success-conditioned 2x2 density matrix in (e, g) order after the
/// phase correction, for detector efficiency eta. For eta = 1 this is
/// (|Psi><Psi| N + 2|a|^2 alpha^2 exp(-2 kappa t_D) |g><g|) / (N + 2|a|^2 alpha^2 exp(-2 kappa t_D))
/// with |Psi> = (a alpha |e> + b |g>) / sqrt(N), N = |a|^2 alpha^2 + |b|^2.
CMatrix teleported_density(const QubitAmplitudes& input, const TeleportParams& params,
                           double t_d, double eta = 1.0);

/// Closed-form F(t_D, a, b) = <in| rho |in> at eta = 1.
double fidelity_state_dependent(const QubitAmplitudes& input, const TeleportParams& params,
                                double t_d);

/// F with P_ND(A) = |a|^2 alpha + |b|^2 in place of |a|^2 alpha^2 + |b|^2.
double fidelity_state_dependent_linear_alpha(const QubitAmplitudes& input,
                                        const TeleportParams& params, double t_d);

/// [eta P_1D F + 2 eta (1 - eta) P_2D |b|^2] / P_suc(eta), with
/// P_1D = (p/2)(1 + 2 u^2 e^{-2 kappa t_D}), P_2D = (u^2/2) p^2,
/// P_suc = eta P_1D + 2 eta (1 - eta) P_2D, p = 1 - e^{-2 kappa t_D},
/// u^2 = |a|^2 alpha^2 / N. NaN when P_suc = 0.
double fidelity_eta(const QubitAmplitudes& input, const TeleportParams& params, double t_d,
                    double eta);

/// Fidelity of one detector branch with or without the post-detection phase
/// step, restricted to the one-photon sector (no two-photon contamination).
double branch_fidelity(const QubitAmplitudes& input, const TeleportParams& params,
                       DetectorRecord branch, bool phase_correction);

struct AverageFidelity {
  /// Uniform Bloch-sphere mean of the per-state fidelity.
  double fidelity = 0.0;
  /// Mean weighted by each state's single-click probability.
  double success_weighted_fidelity = 0.0;
  /// Bloch mean of the per-attempt success probability
  /// (preparation * single recorded click).
  double success_probability = 0.0;
  std::string note;
};

/// 32-point Gauss-Legendre rule in cos(theta) times 64 uniform azimuths.
/// eta = 0 yields NaN fidelities and an explanatory note.
AverageFidelity average_fidelity(const TeleportParams& params, double t_d, double eta = 1.0);

// ---------------------------------------------------------------------------
// Monte Carlo model on the joint register (mode A, mode B, atom 1, atom 2).

struct TeleportModel {
  CompositeBasis basis;
  /// Exchange terms E (b sigma^dag + b^dag sigma) for Alice (mode A, atom 1)
  /// and Bob (mode B, Bob's atom). The constant E shift of each atom's
  /// Hamiltonian is a global phase and is dropped.
  OperatorMatrix h_alice;
  OperatorMatrix h_bob;
  /// Damping -i kappa (n_A + n_B); also the whole generator of the detection window.
  OperatorMatrix h_detect;
  /// sqrt(2 kappa) b_A and sqrt(2 kappa) b_B.
  JumpOperatorSet leak_jumps;
  /// sqrt(kappa)(b_A + b_B) ("D+") and sqrt(kappa)(b_A - b_B) ("D-").
  JumpOperatorSet detector_jumps;
  int alice_atom = 0;
  int bob_atom = 1;
  int mode_a = 0;
  int mode_b = 1;
};

/// Joint model; `extra_alice_atoms` adds spectator atoms in Alice's cavity
/// (the insurance reserve) that do not couple to the cavity.
TeleportModel build_teleport_model(const TeleportParams& params, int extra_alice_atoms = 0);

/// Initial joint state: Alice's atom in the input (with Zeeman pre-phase),
/// Bob's atom in |e>, both cavities empty.
StateVector teleport_initial_state(const TeleportModel& model, const QubitAmplitudes& input);

enum class ProtocolStage { kPreparation, kDetection, kComplete };
std::string to_string(ProtocolStage stage);

struct ProtocolOptions {
  bool phase_correction = true;
  /// Maximum step for the jump unraveling, as a fraction of the fastest rate.
  double step_fraction = 0.01;
  unsigned threads = 0;
};

struct ProtocolOutcome {
  std::uint64_t seed = 0;
  ProtocolStage stage = ProtocolStage::kPreparation;
  DetectorRecord record = DetectorRecord::kNone;
  bool success = false;
  int physical_clicks = 0;
  int recorded_clicks = 0;
  /// Bob's atom in (e, g) order after correction (meaningful on success).
  CMatrix bob_density;
  /// Analytic branch weights for this input.
  BranchProbabilities branches;
  double preparation_time = 0.0;
  double detection_time = 0.0;
  std::vector<JumpEvent> events;
};

/// One end-to-end realization: both preparations filtered on no emission,
/// detection over t_d with eta-thinned clicks, post-detection phase step.
ProtocolOutcome run_protocol(const QubitAmplitudes& input, const TeleportParams& params,
                             double t_d, double eta, std::uint64_t seed,
                             const ProtocolOptions& options = {});

/// n realizations with seeds derive_seed(master_seed, k).
std::vector<ProtocolOutcome> run_protocol_ensemble(const QubitAmplitudes& input,
                                                   const TeleportParams& params, double t_d,
                                                   double eta, std::uint64_t master_seed,
                                                   std::size_t n,
                                                   const ProtocolOptions& options = {});

/// Mean Bob density over successful outcomes; throws if none succeeded.
CMatrix success_conditioned_density(const std::vector<ProtocolOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Insurance variant.

/// Two-atom state (atom 1, reserve r) in (g, e) level order with atom 1 the
/// slow index: (a(|e g> + |g e>) + b(|g g> + |e e>)) / sqrt(2).
CVector insurance_encode(const QubitAmplitudes& input);

struct InsuranceAttempt {
  bool success = false;
  ProtocolStage stage = ProtocolStage::kPreparation;
  int clicks = 0;
  /// Bob's atom measured in g on a failed attempt.
  bool bob_in_ground = false;
  /// Inferred number of photons from Alice's cavity (0 or 1).
  int alice_photons = 0;
  /// Bit flips applied to the reserve during recovery.
  int flips_applied = 0;
  /// Recovered logical qubit (failure) or Bob's qubit (success).
  QubitAmplitudes state;
  double fidelity = 0.0;
};

/// Recovery rule on a failed attempt: the reserve holds a|g> + b|e> when
/// Alice's cavity emitted one photon and a|e> + b|g> when it emitted none;
/// the latter is flipped first, then a role-swap flip returns a|e> + b|g>.
QubitAmplitudes insurance_recover(const CVector& reserve_state, int alice_photons,
                                  int* flips_applied = nullptr);

/// One insured attempt. Detection runs for max(t_d, 25/kappa) so every photon
/// leaves the cavities. eta < 1 is allowed but the recovery is then only best
/// effort (a warning is logged).
InsuranceAttempt run_insured_attempt(const QubitAmplitudes& input, const TeleportParams& params,
                                     double t_d, double eta, std::uint64_t seed,
                                     const ProtocolOptions& options = {});

struct InsuranceEpisode {
  int attempts = 0;
  bool success = false;
  double final_fidelity = 0.0;
  /// Worst fidelity of a recovered qubit over the failed attempts.
  double min_recovery_fidelity = 1.0;
};

/// Retries (recover, re-encode) until success or max_attempts.
InsuranceEpisode run_insured_episode(const QubitAmplitudes& input, const TeleportParams& params,
                                     double t_d, double eta, std::uint64_t seed,
                                     int max_attempts = 1000, const ProtocolOptions& options = {});

/// Per-attempt success probability at eta = 1 with a long window:
/// ((1 + alpha^2)/2) * beta(t_E)^2 * 1/2.
double insurance_success_probability(const TeleportParams& params);

}  // namespace qjump
