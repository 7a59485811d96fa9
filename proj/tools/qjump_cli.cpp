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


// Command-line front end: one subcommand per scenario, each option mirroring
// a config key (underscores become dashes), plus `run --config FILE`.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qjump/errors.hpp"
#include "qjump/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

bool is_flag(const qjump::ConfigKey& k) {
  return k.default_value == "true" || k.default_value == "false";
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string scenario;
  std::string config_file;
  std::map<std::string, std::optional<std::string>> values;
  std::map<std::string, bool> flags;
};

void report(const qjump::RunManifest& m) {
  for (const auto& line : m.messages) std::cout << line << '\n';
  for (const auto& r : m.regime) {
    if (!r.satisfied) std::cout << "regime: " << r.description << " (not satisfied)\n";
  }
  for (const auto& o : m.outputs) {
    std::cout << fmt::format("wrote {} ({} bytes, sha256 {})\n", o.path, o.bytes, o.sha256.substr(0, 16));
  }
  std::cout << fmt::format("{} finished in {:.3f} s\n", m.scenario, m.wall_clock_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qjump: conditional-dynamics, decoherence-free subspace and teleportation toolkit"};
  app.set_version_flag("--version", qjump::version());
  app.require_subcommand(1);

  std::vector<Subcommand> subs;
  subs.reserve(qjump::scenario_names().size());
  for (const auto& name : qjump::scenario_names()) {
    Subcommand& s = subs.emplace_back();
    s.scenario = name;
    s.app = app.add_subcommand(name, "run the " + name + " scenario");
    s.app->add_option("--config", s.config_file, "key = value file; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& key : qjump::scenario_schema(name)) {
      const std::string help = key.description + " [default: " +
                               (key.default_value.empty() ? "none" : key.default_value) + "]";
      if (is_flag(key)) {
        s.app->add_flag("--" + dashed(key.name), s.flags[key.name], help);
      } else {
        s.app->add_option("--" + dashed(key.name), s.values[key.name], help);
      }
    }
  }

  std::string run_file;
  CLI::App* run = app.add_subcommand("run", "run the scenario named in a config file");
  run->add_option("config", run_file, "config file with a 'scenario = ...' line")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    qjump::ScenarioConfig config;
    if (run->parsed()) {
      config = qjump::load_config(run_file);
    } else {
      for (auto& s : subs) {
        if (!s.app->parsed()) continue;
        config = s.config_file.empty() ? qjump::default_config(s.scenario)
                                       : qjump::load_config(s.config_file, s.scenario);
        for (const auto& [key, value] : s.values) {
          if (value) config.override_value(key, *value);
        }
        for (const auto& [key, on] : s.flags) {
          if (on) config.override_value(key, "true");
        }
      }
    }
    const qjump::RunManifest m = qjump::run_scenario(config);
    report(m);
    if (!m.passed) {
      std::cerr << "validation failed; see " << (config.output_dir() / "validate.csv").string() << '\n';
      return kValidationFailure;
    }
    return kOk;
  } catch (const qjump::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const qjump::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}
