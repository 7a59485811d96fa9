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

#include "qjump/conditional.hpp"

namespace qjump {

/// Throws InvalidArgument unless rho is square, Hermitian, unit trace and
/// positive semidefinite (all to `tol`).
void validate_density(const CMatrix& rho, double tol = 1e-10);

/// d rho/dt = -i (H_c rho - rho H_c^dag) + sum_k L_k rho L_k^dag, integrated
/// with classical RK4 at a step no larger than dt. Intended as an independent
/// reference for the trajectory code.
CMatrix master_equation_oracle(const OperatorMatrix& h_cond, const JumpOperatorSet& jumps,
                               const CMatrix& rho0, double t, double dt);

/// Same, with H_cond and the jumps built from `params` on `basis`.
CMatrix master_equation_oracle(const SystemParams& params, const CompositeBasis& basis,
                               const CMatrix& rho0, double t, double dt);

}  // namespace qjump
