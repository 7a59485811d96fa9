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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qjump {

/// One schema entry: key, default value (as text) and a short description.
struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string description;
};

/// Scenario names in dispatch order.
const std::vector<std::string>& scenario_names();

/// Keys accepted by a scenario, including the common ones (seed, output,
/// threads). Throws ConfigError for an unknown scenario.
const std::vector<ConfigKey>& scenario_schema(const std::string& scenario);

/// Resolved configuration. `values` holds every schema key in schema order,
/// defaults filled in; `lines` records where each explicitly set key came
/// from (0 for command-line overrides).
struct ScenarioConfig {
  std::string scenario;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::pair<std::string, int>> lines;

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::uint64_t seed() const;
  std::filesystem::path output_dir() const;

  /// Sets an explicit value. Unknown keys and repeated keys throw ConfigError.
  void set(const std::string& key, const std::string& value, int line = 0);
  /// Replaces a value regardless of earlier settings (command-line precedence).
  void override_value(const std::string& key, const std::string& value);
};

/// Defaults only.
ScenarioConfig default_config(const std::string& scenario);

/// Parses "key = value" lines; '#' starts a comment. The scenario comes from a
/// `scenario = ...` line unless given. Errors carry the offending line number.
ScenarioConfig parse_config(std::istream& in, const std::string& scenario = "");
ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario = "");

/// Canonical "key=value" lines of the resolved configuration.
std::string canonical_config(const ScenarioConfig& config);

struct RegimeEntry {
  std::string name;
  bool satisfied = true;
  double ratio = 0.0;
  std::string description;
};

struct OutputFile {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string version;
  std::string scenario;
  /// SHA-256 of canonical_config with output and threads blanked.
  std::string config_sha256;
  ScenarioConfig config;
  std::vector<RegimeEntry> regime;
  std::vector<std::string> warnings;
  double wall_clock_seconds = 0.0;
  std::vector<OutputFile> outputs;
  /// Human-readable report lines (per-check results for validate).
  std::vector<std::string> messages;
  /// False only when the validate scenario found a failing check.
  bool passed = true;
};

/// Dispatches to the owning module and writes <scenario>.csv,
/// <scenario>_summary.json and manifest.json into the output directory.
/// Throws ConfigError for bad values and DomainError for impossible physics.
RunManifest run_scenario(const ScenarioConfig& config);

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Library version string.
std::string version();

}  // namespace qjump
