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


#include "qjump/trajectory.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "qjump/errors.hpp"
#include "qjump/expm.hpp"
#include "qjump/log.hpp"
#include "qjump/parallel.hpp"

namespace qjump {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = master + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double TrajectoryRecord::first_jump_time() const {
  return jumps.empty() ? std::numeric_limits<double>::quiet_NaN() : jumps.front().time;
}

JumpUnraveling::JumpUnraveling(OperatorMatrix h_cond, JumpOperatorSet jumps, double dt)
    : h_cond_(std::move(h_cond)), jumps_(std::move(jumps)), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  for (const auto& j : jumps_) {
    if (!(j.op.basis() == h_cond_.basis())) {
      throw InvalidArgument("jump operator '" + j.label + "' lives in a different basis");
    }
  }
  step_ = expm(Complex(0.0, -dt_) * h_cond_.matrix());
}

StateVector JumpUnraveling::evolve(const StateVector& psi, double t0, double duration, Rng& rng,
                                   std::vector<JumpEvent>& events) const {
  if (!(psi.basis() == h_cond_.basis())) throw InvalidArgument("state lives in a different basis");
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("evolution time must be >= 0");
  }
  CVector v = psi.normalized().amps();
  if (duration == 0.0) return StateVector(psi.basis(), v);

  const auto n_steps = static_cast<long long>(std::ceil(duration / dt_ - 1e-12));
  const double h = duration / static_cast<double>(n_steps);
  const CMatrix u = std::abs(h - dt_) <= 1e-14 * dt_
                        ? step_
                        : expm(Complex(0.0, -h) * h_cond_.matrix());

  std::vector<double> weights(jumps_.size());
  double threshold = rng.uniform();
  for (long long s = 1; s <= n_steps; ++s) {
    v = u * v;
    const double norm2 = v.squaredNorm();
    if (!std::isfinite(norm2)) throw NumericalError("trajectory produced non-finite amplitudes");
    if (norm2 > threshold) continue;

    double total = 0.0;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      weights[k] = (jumps_[k].op.matrix() * v).squaredNorm();
      total += weights[k];
    }
    if (!(total > 0.0)) {
      throw NumericalError("norm decayed but every jump channel has zero weight");
    }
    double pick = rng.uniform() * total;
    std::size_t chosen = jumps_.size() - 1;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      if (pick < weights[k]) {
        chosen = k;
        break;
      }
      pick -= weights[k];
    }
    v = jumps_[chosen].op.matrix() * v;
    v /= v.norm();
    events.push_back({t0 + h * static_cast<double>(s), jumps_[chosen].label,
                      static_cast<int>(chosen)});
    threshold = rng.uniform();
  }
  const double norm = v.norm();
  if (!(norm > 0.0)) throw NumericalError("trajectory state collapsed to zero norm");
  return StateVector(psi.basis(), v / norm);
}

double max_step(const SystemParams& params) {
  const double rate = params.max_rate();
  return rate > 0.0 ? 0.01 / rate : std::numeric_limits<double>::infinity();
}

namespace {

JumpUnraveling make_engine(const SystemParams& params, const CompositeBasis& basis, double t_max,
                           double dt) {
  params.validate();
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be >= 0");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (dt > max_step(params) * (1.0 + 1e-12)) {
    throw InvalidArgument("dt = " + std::to_string(dt) + " exceeds 0.01/max(g, kappa, gamma) = " +
                          std::to_string(max_step(params)));
  }
  const JumpOperatorSet jumps = jump_operators(params, basis);
  return JumpUnraveling(conditional_hamiltonian(build_h_coupling(params, basis), jumps), jumps,
                        dt);
}

TrajectoryRecord run_one(const JumpUnraveling& engine, const StateVector& psi0, double t_max,
                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<JumpEvent> events;
  StateVector final_state = engine.evolve(psi0, 0.0, t_max, rng, events);
  const bool survived = events.empty();
  return TrajectoryRecord{seed, std::move(events), std::move(final_state), survived};
}

}  // namespace

TrajectoryRecord simulate_trajectory(const SystemParams& params, const StateVector& psi0,
                                     double t_max, double dt, std::uint64_t seed) {
  return run_one(make_engine(params, psi0.basis(), t_max, dt), psi0, t_max, seed);
}

std::vector<TrajectoryRecord> simulate_ensemble(const SystemParams& params,
                                                const StateVector& psi0, double t_max, double dt,
                                                std::uint64_t master_seed, std::size_t n,
                                                unsigned threads) {
  return simulate_ensemble(make_engine(params, psi0.basis(), t_max, dt), psi0, t_max, master_seed,
                           n, threads);
}

std::vector<TrajectoryRecord> simulate_ensemble(const JumpUnraveling& engine,
                                                const StateVector& psi0, double t_max,
                                                std::uint64_t master_seed, std::size_t n,
                                                unsigned threads) {
  std::vector<std::optional<TrajectoryRecord>> slots(n);
  parallel_for(n, threads, [&](std::size_t k) {
    slots[k] = run_one(engine, psi0, t_max, derive_seed(master_seed, k));
  });
  std::vector<TrajectoryRecord> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

CMatrix ensemble_density(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw InvalidArgument("empty trajectory ensemble");
  const Index d = records.front().final_state.dim();
  CMatrix rho = CMatrix::Zero(d, d);
  for (const auto& r : records) {
    const CVector& v = r.final_state.amps();
    rho.noalias() += v * v.adjoint();
  }
  return rho / static_cast<double>(records.size());
}

double survival_fraction(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw InvalidArgument("empty trajectory ensemble");
  std::size_t alive = 0;
  for (const auto& r : records) alive += r.survived ? 1 : 0;
  return static_cast<double>(alive) / static_cast<double>(records.size());
}

double minimum_preparation_time(const SystemParams& params) {
  params.validate();
  if (params.kappa <= 0.0 || params.g <= 0.0) {
    throw InvalidArgument("preparation needs g > 0 and kappa > 0");
  }
  return 15.0 * std::max(1.0 / params.kappa, params.kappa / (params.g * params.g));
}

PreparationResult prepare_entangled_pair(const SystemParams& params, double delta_t,
                                         std::uint64_t seed) {
  if (params.n_atoms != 2) throw InvalidArgument("pair preparation needs n_atoms == 2");
  const double t_min = minimum_preparation_time(params);
  if (delta_t < t_min * (1.0 - 1e-12)) {
    throw InvalidArgument("delta_t = " + std::to_string(delta_t) +
                          " is below 15 * max(1/kappa, kappa/g^2) = " + std::to_string(t_min));
  }
  RegimeReport regime = regime_check(params);
  if (!regime.satisfied) warn("entangled-pair preparation outside its rate regime: " +
                              regime.description);
  const CompositeBasis basis = two_atom_basis();
  TrajectoryRecord record =
      simulate_trajectory(params, ket(basis, 0, {1, 0}), delta_t, max_step(params), seed);
  const bool success = record.survived;
  StateVector state = record.final_state;
  return PreparationResult{success, std::move(state), std::move(regime), std::move(record)};
}

double state_fidelity(const StateVector& state, const StateVector& target) {
  const double ns = state.norm();
  const double nt = target.norm();
  if (!(ns > 0.0) || !(nt > 0.0)) throw NumericalError("fidelity of a zero-norm state");
  return std::norm(target.inner(state)) / (ns * ns * nt * nt);
}

}  // namespace qjump
