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


#include <algorithm>
#include <cmath>
#include <optional>

#include "qjump/errors.hpp"
#include "qjump/log.hpp"
#include "qjump/parallel.hpp"
#include "qjump/teleport.hpp"

namespace qjump {

namespace {

OperatorMatrix exchange(const CompositeBasis& basis, int mode, int atom, double e) {
  const OperatorMatrix b = cavity_annihilation(basis, mode);
  const OperatorMatrix s = lowering_op(basis, atom, 1, 0);
  return (b * s.adjoint() + b.adjoint() * s) * Complex(e);
}

// Phase on the |g> level of one atom.
void phase_on_ground(StateVector& psi, int factor, Complex phase) {
  const auto& basis = psi.basis();
  CVector amps = psi.amps();
  for (Index i = 0; i < basis.dim(); ++i) {
    if (basis.digit(i, factor) == 0) amps(i) *= phase;
  }
  psi = StateVector(basis, std::move(amps));
}

// Bit flip |g> <-> |e> on one atom.
void flip_atom(StateVector& psi, int factor) {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  psi = embed_local(psi.basis(), factor, x).apply(psi);
}

// Reorders a (g, e) density matrix to (e, g).
CMatrix to_eg(const CMatrix& rho_ge) {
  CMatrix out(2, 2);
  out << rho_ge(1, 1), rho_ge(1, 0), rho_ge(0, 1), rho_ge(0, 0);
  return out;
}

// Samples a projective measurement of one atom in {g, e}, collapses the
// state and returns the level.
int measure_atom(StateVector& psi, int factor, Rng& rng) {
  const auto& basis = psi.basis();
  double p_excited = 0.0;
  for (Index i = 0; i < basis.dim(); ++i) {
    if (basis.digit(i, factor) == 1) p_excited += std::norm(psi[i]);
  }
  p_excited /= psi.norm_squared();
  const int level = rng.uniform() < p_excited ? 1 : 0;
  CVector amps = psi.amps();
  for (Index i = 0; i < basis.dim(); ++i) {
    if (basis.digit(i, factor) != level) amps(i) = 0.0;
  }
  psi = StateVector(basis, std::move(amps)).normalized();
  return level;
}

double fidelity_to(const QubitAmplitudes& target, const CMatrix& rho_eg) {
  const CVector v = target.vector();
  return std::real(v.dot(rho_eg * v));
}

QubitAmplitudes dominant_state(const CMatrix& rho_eg) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho_eg + rho_eg.adjoint()));
  CVector v = es.eigenvectors().col(1);
  // Global phase: make the larger component real positive.
  const Index k = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  v *= std::abs(v(k)) / v(k);
  v /= v.norm();
  return {v(0), v(1)};
}

// Stage engines shared by every realization of a configuration.
class ProtocolRunner {
 public:
  ProtocolRunner(const TeleportParams& params, int extra_alice_atoms,
                 const ProtocolOptions& options)
      : params_(params), model_(build_teleport_model(params, extra_alice_atoms)) {
    const double e = params.e_rate();
    t_i_ = mapping_time(e, params.kappa);
    t_e_ = entangling_time(e, params.kappa);
    const double prep_dt = options.step_fraction / std::max(e, params.kappa);
    const OperatorMatrix first =
        (t_e_ >= t_i_ ? model_.h_bob : model_.h_alice) + model_.h_detect;
    const OperatorMatrix both = model_.h_alice + model_.h_bob + model_.h_detect;
    stage1_.emplace(first, model_.leak_jumps, prep_dt);
    stage2_.emplace(both, model_.leak_jumps, prep_dt);
    const double detect_dt = params.kappa > 0.0 ? options.step_fraction / params.kappa : 1.0;
    detect_.emplace(model_.h_detect, model_.detector_jumps, detect_dt);
  }

  const TeleportModel& model() const { return model_; }
  double preparation_time() const { return std::max(t_i_, t_e_); }

  /// Both preparations; returns the state and appends any leak events.
  StateVector prepare(const StateVector& psi0, Rng& rng, std::vector<JumpEvent>& events) const {
    const double lead = std::abs(t_e_ - t_i_);
    StateVector psi = stage1_->evolve(psi0, 0.0, lead, rng, events);
    return stage2_->evolve(psi, lead, std::min(t_i_, t_e_), rng, events);
  }

  StateVector detect(const StateVector& psi, double t0, double t_d, Rng& rng,
                     std::vector<JumpEvent>& events) const {
    return detect_->evolve(psi, t0, t_d, rng, events);
  }

 private:
  TeleportParams params_;
  TeleportModel model_;
  double t_i_ = 0.0;
  double t_e_ = 0.0;
  std::optional<JumpUnraveling> stage1_;
  std::optional<JumpUnraveling> stage2_;
  std::optional<JumpUnraveling> detect_;
};

void warn_constraints(const TeleportParams& params) {
  for (const auto& r : params.constraint_checks()) {
    if (!r.satisfied) warn("teleportation constraint violated: " + r.description);
  }
}

ProtocolOutcome run_with(const ProtocolRunner& runner, const QubitAmplitudes& input,
                         const BranchProbabilities& branches, double t_d, double eta,
                         std::uint64_t seed, const ProtocolOptions& options) {
  const TeleportModel& m = runner.model();
  Rng rng(seed);
  ProtocolOutcome out;
  out.seed = seed;
  out.branches = branches;
  out.preparation_time = runner.preparation_time();

  StateVector psi = runner.prepare(teleport_initial_state(m, input), rng, out.events);
  const int bob_factor = m.basis.atom_factor(m.bob_atom);
  if (!out.events.empty()) {
    out.stage = ProtocolStage::kPreparation;
    out.physical_clicks = static_cast<int>(out.events.size());
    out.bob_density = to_eg(reduced_density(psi, bob_factor));
    return out;
  }

  std::vector<JumpEvent> clicks;
  psi = runner.detect(psi, out.preparation_time, t_d, rng, clicks);
  out.detection_time = t_d;
  out.physical_clicks = static_cast<int>(clicks.size());
  std::vector<JumpEvent> recorded;
  for (const auto& c : clicks) {
    if (rng.uniform() < eta) recorded.push_back(c);
  }
  out.recorded_clicks = static_cast<int>(recorded.size());
  out.events = clicks;
  out.stage = ProtocolStage::kDetection;
  if (recorded.empty()) {
    out.record = DetectorRecord::kNone;
  } else if (recorded.size() > 1) {
    out.record = DetectorRecord::kMultiple;
  } else {
    out.record = recorded.front().label == "D+" ? DetectorRecord::kPlus : DetectorRecord::kMinus;
    if (options.phase_correction) {
      phase_on_ground(psi, bob_factor, out.record == DetectorRecord::kPlus ? -kI : kI);
    }
    out.success = true;
    out.stage = ProtocolStage::kComplete;
  }
  out.bob_density = to_eg(reduced_density(psi, bob_factor));
  return out;
}

void check_run_args(const QubitAmplitudes& input, const TeleportParams& params, double t_d,
                    double eta) {
  input.validate();
  params.validate();
  if (!(t_d >= 0.0) || !std::isfinite(t_d)) throw InvalidArgument("detection time must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("detector efficiency must be in [0, 1]");
}

}  // namespace

TeleportModel build_teleport_model(const TeleportParams& params, int extra_alice_atoms) {
  params.validate();
  if (extra_alice_atoms < 0) throw InvalidArgument("extra_alice_atoms must be >= 0");
  const double e = params.e_rate();
  (void)params.omega_kappa();  // rejects the overdamped regime
  std::vector<int> atoms(2 + extra_alice_atoms, 2);
  CompositeBasis basis = build_multimode_basis({1, 1}, atoms);
  const int alice = 0;
  const int bob = 1 + extra_alice_atoms;
  OperatorMatrix h_alice = exchange(basis, 0, alice, e);
  OperatorMatrix h_bob = exchange(basis, 1, bob, e);
  OperatorMatrix h_detect =
      (photon_number(basis, 0) + photon_number(basis, 1)) * Complex(0.0, -params.kappa);
  const OperatorMatrix ba = cavity_annihilation(basis, 0);
  const OperatorMatrix bb = cavity_annihilation(basis, 1);
  JumpOperatorSet leak{{"leakA", ba * std::sqrt(2.0 * params.kappa)},
                       {"leakB", bb * std::sqrt(2.0 * params.kappa)}};
  JumpOperatorSet detectors{{"D+", (ba + bb) * std::sqrt(params.kappa)},
                            {"D-", (ba - bb) * std::sqrt(params.kappa)}};
  return TeleportModel{std::move(basis), std::move(h_alice), std::move(h_bob),
                       std::move(h_detect), std::move(leak), std::move(detectors),
                       alice, bob, 0, 1};
}

StateVector teleport_initial_state(const TeleportModel& model, const QubitAmplitudes& input) {
  input.validate();
  if (model.basis.n_atoms() != 2) {
    throw InvalidArgument("teleport_initial_state expects the two-atom model");
  }
  CVector vac(2);
  vac << 1.0, 0.0;
  CVector alice(2);
  alice << input.b, kI * input.a;  // (g, e) order, Zeeman pre-phase on |e>
  CVector bob(2);
  bob << 0.0, 1.0;
  return tensor_state(model.basis, {vac, vac, alice, bob});
}

std::string to_string(ProtocolStage stage) {
  switch (stage) {
    case ProtocolStage::kPreparation: return "preparation";
    case ProtocolStage::kDetection: return "detection";
    case ProtocolStage::kComplete: return "complete";
  }
  return "unknown";
}

ProtocolOutcome run_protocol(const QubitAmplitudes& input, const TeleportParams& params,
                             double t_d, double eta, std::uint64_t seed,
                             const ProtocolOptions& options) {
  check_run_args(input, params, t_d, eta);
  warn_constraints(params);
  const ProtocolRunner runner(params, 0, options);
  return run_with(runner, input, branch_probabilities(input, params, t_d, eta), t_d, eta, seed,
                  options);
}

std::vector<ProtocolOutcome> run_protocol_ensemble(const QubitAmplitudes& input,
                                                   const TeleportParams& params, double t_d,
                                                   double eta, std::uint64_t master_seed,
                                                   std::size_t n,
                                                   const ProtocolOptions& options) {
  check_run_args(input, params, t_d, eta);
  warn_constraints(params);
  const ProtocolRunner runner(params, 0, options);
  const BranchProbabilities branches = branch_probabilities(input, params, t_d, eta);
  std::vector<std::optional<ProtocolOutcome>> slots(n);
  parallel_for(n, options.threads, [&](std::size_t k) {
    slots[k] = run_with(runner, input, branches, t_d, eta, derive_seed(master_seed, k), options);
  });
  std::vector<ProtocolOutcome> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

CMatrix success_conditioned_density(const std::vector<ProtocolOutcome>& outcomes) {
  CMatrix rho = CMatrix::Zero(2, 2);
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (!o.success) continue;
    rho += o.bob_density;
    ++n;
  }
  if (n == 0) throw NumericalError("no successful teleportation in the ensemble");
  return rho / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Insurance

CVector insurance_encode(const QubitAmplitudes& input) {
  input.validate();
  // CNOT from the reserve onto atom 1 applied to (a|e> + b|g>) (|g> + |e>)/sqrt(2).
  CVector v(4);  // index 2 * level_1 + level_r, g = 0, e = 1
  const double h = 1.0 / std::sqrt(2.0);
  v(0) = h * input.b;  // |g g>
  v(1) = h * input.a;  // |g e>
  v(2) = h * input.a;  // |e g>
  v(3) = h * input.b;  // |e e>
  return v;
}

QubitAmplitudes insurance_recover(const CVector& reserve_state, int alice_photons,
                                  int* flips_applied) {
  if (reserve_state.size() != 2) throw InvalidArgument("reserve state must have two amplitudes");
  if (alice_photons != 0 && alice_photons != 1) {
    throw InvalidArgument("Alice's cavity emits either zero or one photon");
  }
  const double n = reserve_state.norm();
  if (!(n > 0.0)) throw NumericalError("zero reserve state");
  const CVector r = reserve_state / n;  // (g, e) order
  // One photon: reserve a|g> + b|e>, one role-swap flip gives a|e> + b|g>.
  // No photon: reserve a|e> + b|g>, flip then role-swap flip (identity).
  if (flips_applied != nullptr) *flips_applied = alice_photons == 1 ? 1 : 2;
  if (alice_photons == 1) return {r(0), r(1)};
  return {r(1), r(0)};
}

double insurance_success_probability(const TeleportParams& params) {
  params.validate();
  const double e = params.e_rate();
  const double alpha = alpha_coefficient(e, params.kappa, mapping_time(e, params.kappa));
  const double beta = beta_coefficient(e, params.kappa, entangling_time(e, params.kappa));
  return 0.5 * (1.0 + alpha * alpha) * beta * beta * 0.5;
}

namespace {

InsuranceAttempt insured_attempt_with(const ProtocolRunner& runner, const QubitAmplitudes& input,
                                      double t_window, double eta, std::uint64_t seed,
                                      const ProtocolOptions& options) {
  const TeleportModel& m = runner.model();
  const CompositeBasis& basis = m.basis;
  const int fr = basis.atom_factor(1);
  const int fb = basis.atom_factor(m.bob_atom);
  Rng rng(seed);

  // Encoded (atom 1, reserve) with Zeeman pre-phase on atom 1, Bob in |e>.
  const CVector enc = insurance_encode(input);
  CVector amps = CVector::Zero(basis.dim());
  for (int l1 = 0; l1 < 2; ++l1) {
    for (int lr = 0; lr < 2; ++lr) {
      const int photons[2] = {0, 0};
      const int levels[3] = {l1, lr, 1};
      amps(basis.index_of(photons, levels)) = enc(2 * l1 + lr) * (l1 == 1 ? kI : Complex(1.0));
    }
  }
  StateVector psi(basis, std::move(amps));

  std::vector<JumpEvent> prep_events;
  psi = runner.prepare(psi, rng, prep_events);
  std::vector<JumpEvent> detect_events;
  psi = runner.detect(psi, runner.preparation_time(), t_window, rng, detect_events);

  int prep_recorded = 0;
  for (std::size_t i = 0; i < prep_events.size(); ++i) prep_recorded += rng.uniform() < eta;
  std::vector<JumpEvent> recorded;
  for (const auto& c : detect_events) {
    if (rng.uniform() < eta) recorded.push_back(c);
  }

  InsuranceAttempt out;
  out.clicks = prep_recorded + static_cast<int>(recorded.size());
  if (prep_events.empty() && recorded.size() == 1) {
    out.success = true;
    out.stage = ProtocolStage::kComplete;
    if (options.phase_correction) {
      phase_on_ground(psi, fb, recorded.front().label == "D+" ? -kI : kI);
    }
    // Alice measures the reserve; Bob flips on |e>.
    if (measure_atom(psi, fr, rng) == 1) flip_atom(psi, fb);
    const CMatrix rho = to_eg(reduced_density(psi, fb));
    out.state = dominant_state(rho);
    out.fidelity = fidelity_to(input, rho);
    return out;
  }

  out.stage = prep_events.empty() ? ProtocolStage::kDetection : ProtocolStage::kPreparation;
  out.bob_in_ground = measure_atom(psi, fb, rng) == 0;
  int alice = out.clicks - (out.bob_in_ground ? 1 : 0);
  if (alice != 0 && alice != 1) {
    warn("insurance: inconsistent photon count " + std::to_string(alice) +
         " (missed clicks at eta < 1); recovery is best effort");
    alice = std::clamp(alice, 0, 1);
  }
  out.alice_photons = alice;
  const CMatrix rho_r = reduced_density(psi, fr);  // (g, e)
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho_r + rho_r.adjoint()));
  const CVector reserve = es.eigenvectors().col(1);
  out.state = insurance_recover(reserve, alice, &out.flips_applied);
  // Fidelity from the full reduced density, after the same flips.
  // One photon: logical (e, g) amplitudes are the reserve's (g, e) ones.
  const CMatrix logical_eg = alice == 1 ? rho_r : to_eg(rho_r);
  out.fidelity = fidelity_to(input, logical_eg);
  return out;
}

}  // namespace

InsuranceAttempt run_insured_attempt(const QubitAmplitudes& input, const TeleportParams& params,
                                     double t_d, double eta, std::uint64_t seed,
                                     const ProtocolOptions& options) {
  check_run_args(input, params, t_d, eta);
  if (eta < 1.0) warn("insurance is only guaranteed at eta = 1; running best effort");
  const ProtocolRunner runner(params, 1, options);
  const double window = params.kappa > 0.0 ? std::max(t_d, 25.0 / params.kappa) : t_d;
  return insured_attempt_with(runner, input, window, eta, seed, options);
}

InsuranceEpisode run_insured_episode(const QubitAmplitudes& input, const TeleportParams& params,
                                     double t_d, double eta, std::uint64_t seed, int max_attempts,
                                     const ProtocolOptions& options) {
  check_run_args(input, params, t_d, eta);
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
  if (eta < 1.0) warn("insurance is only guaranteed at eta = 1; running best effort");
  const ProtocolRunner runner(params, 1, options);
  const double window = params.kappa > 0.0 ? std::max(t_d, 25.0 / params.kappa) : t_d;
  InsuranceEpisode ep;
  QubitAmplitudes current = input;
  for (int k = 0; k < max_attempts; ++k) {
    const InsuranceAttempt at =
        insured_attempt_with(runner, current, window, eta, derive_seed(seed, k), options);
    ep.attempts = k + 1;
    if (at.success) {
      ep.success = true;
      // Fidelity of Bob's qubit against the original input.
      const CVector v = input.vector();
      const CVector w = at.state.vector();
      ep.final_fidelity = std::norm(v.dot(w));
      return ep;
    }
    const double f = std::norm(input.vector().dot(at.state.vector()));
    ep.min_recovery_fidelity = std::min(ep.min_recovery_fidelity, f);
    current = at.state;
    // Remove the residual normalization drift before re-encoding.
    const double n = std::sqrt(std::norm(current.a) + std::norm(current.b));
    current.a /= n;
    current.b /= n;
  }
  return ep;
}

}  // namespace qjump
