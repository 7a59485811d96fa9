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
#include <string>
#include <vector>

namespace qjump {

/// One named invariant check: passes when `value <= tolerance`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  /// Informational findings that are not pass/fail (e.g. gaps between closed-form variants).
  std::vector<std::string> notes;
  bool all_passed() const;
};

struct ValidationOptions {
  /// Name of a check whose tolerance is replaced by -1 so it must fail.
  std::string inject_failure;
  std::size_t n_trajectories = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Names of all checks in execution order.
const std::vector<std::string>& validation_check_names();

/// Runs the invariant suite. Throws InvalidArgument for an unknown
/// inject_failure name.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace qjump
