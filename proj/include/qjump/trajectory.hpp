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
#include <random>
#include <string>
#include <vector>

#include "qjump/conditional.hpp"

namespace qjump {

/// splitmix64 finalizer applied to master ^ golden-ratio multiple of the
/// counter: seed_k = mix(master + (k + 1) * 0x9E3779B97F4A7C15). Trajectory k
/// always receives seed_k, whatever the number of worker threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k);

/// mt19937_64 with a portable uniform draw in [0, 1): (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct JumpEvent {
  double time = 0.0;
  std::string label;
  int channel = 0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<JumpEvent> jumps;
  StateVector final_state;
  bool survived = true;

  double first_jump_time() const;
};

/// Waiting-time (threshold) unraveling of a conditional Hamiltonian.
///
/// Each call to evolve() draws a threshold r, steps the unnormalized state with
/// U_cond(h), and when ||psi||^2 falls to r picks channel k with probability
/// proportional to ||L_k psi||^2, collapses, renormalizes and draws a new r.
/// Jumps are resolved to the end of the step in which they occur.
class JumpUnraveling {
 public:
  JumpUnraveling(OperatorMatrix h_cond, JumpOperatorSet jumps, double dt);

  const OperatorMatrix& h_cond() const noexcept { return h_cond_; }
  const JumpOperatorSet& jumps() const noexcept { return jumps_; }
  double dt() const noexcept { return dt_; }

  /// Evolves a state for `duration`, appending jumps stamped t0 + local time.
  /// The input is normalized first; the returned state is normalized.
  StateVector evolve(const StateVector& psi, double t0, double duration, Rng& rng,
                     std::vector<JumpEvent>& events) const;

 private:
  OperatorMatrix h_cond_;
  JumpOperatorSet jumps_;
  double dt_;
  CMatrix step_;
};

/// Largest admissible step for the given rates: 0.01 / max(g, kappa, gamma).
double max_step(const SystemParams& params);

/// Single trajectory for N two-level atoms in one cavity. Throws
/// InvalidArgument when dt exceeds max_step(params).
TrajectoryRecord simulate_trajectory(const SystemParams& params, const StateVector& psi0,
                                     double t_max, double dt, std::uint64_t seed);

/// n trajectories with seeds derive_seed(master_seed, k), k = 0..n-1.
std::vector<TrajectoryRecord> simulate_ensemble(const SystemParams& params,
                                                const StateVector& psi0, double t_max, double dt,
                                                std::uint64_t master_seed, std::size_t n,
                                                unsigned threads = 0);

/// Same, for an arbitrary conditional Hamiltonian and jump set.
std::vector<TrajectoryRecord> simulate_ensemble(const JumpUnraveling& engine,
                                                const StateVector& psi0, double t_max,
                                                std::uint64_t master_seed, std::size_t n,
                                                unsigned threads = 0);

/// (1/n) sum_k |psi_k><psi_k| over the final states.
CMatrix ensemble_density(const std::vector<TrajectoryRecord>& records);

/// Fraction of records without jumps.
double survival_fraction(const std::vector<TrajectoryRecord>& records);

struct PreparationResult {
  bool success = false;
  StateVector state;
  RegimeReport regime;
  TrajectoryRecord record;
};

/// Minimum preparation time 15 * max(1/kappa, kappa/g^2).
double minimum_preparation_time(const SystemParams& params);

/// Starts in |010>, runs one trajectory for delta_t and reports success iff
/// no photon was emitted. A violated rate regime is warned about and flagged
/// in the result; a delta_t below minimum_preparation_time throws.
PreparationResult prepare_entangled_pair(const SystemParams& params, double delta_t,
                                         std::uint64_t seed);

/// |<target|state>|^2 for normalized inputs; throws NumericalError on zero norm.
double state_fidelity(const StateVector& state, const StateVector& target);

}  // namespace qjump
