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


#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qjump/errors.hpp"
#include "qjump/scenario.hpp"
#include "qjump/validation.hpp"

using namespace qjump;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qjump_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig parse(const std::string& text, const std::string& scenario = "") {
  std::istringstream in(text);
  return parse_config(in, scenario);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse("# comment\nscenario = dfs-basis\n\n n = 6  # atoms\nconstruction=dicke\n");
  CHECK(c.scenario == "dfs-basis");
  CHECK(c.integer("n") == 6);
  CHECK(c.get("construction") == "dicke");
  CHECK(c.get("fock_cutoff") == "1");
  CHECK(c.seed() == 1);

  CHECK(error_line("scenario = dfs-basis\nn = 3\nwhat = 1\n") == 3);
  CHECK(error_line("scenario = dfs-basis\nn 3\n") == 2);
  CHECK(error_line("scenario = dfs-basis\nn = 3\nn = 4\n") == 3);
  CHECK(error_line("scenario = nope\n") == 1);
  CHECK_THROWS_AS(parse("n = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("scenario = teleport\n", "dfs-basis"), ConfigError);
  CHECK(parse("n = 3\n", "dfs-basis").integer("n") == 3);

  const ScenarioConfig bad = parse("scenario = zeno-oscillation\n\nomega1 = fast\n");
  try {
    (void)bad.number("omega1");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("scenario = dfs-basis\nn = 2.5\n").integer("n"), ConfigError);
  CHECK_THROWS_AS(parse("scenario = dfs-basis\nseed = -4\n").seed(), ConfigError);
  CHECK_THROWS_AS(parse("scenario = teleport\naverage = maybe\n").flag("average"), ConfigError);

  ScenarioConfig o = parse("scenario = dfs-basis\nn = 3\n");
  o.override_value("n", "5");
  CHECK(o.integer("n") == 5);
  CHECK_THROWS_AS(o.override_value("m", "1"), ConfigError);
  CHECK_THROWS_AS(scenario_schema("nope"), ConfigError);
  CHECK(scenario_names().size() == 6);
}

TEST_CASE("dfs-basis scenario artifacts") {
  const fs::path dir = scratch("dfs");
  ScenarioConfig c = default_config("dfs-basis");
  c.set("output", dir.string());
  const RunManifest m = run_scenario(c);
  REQUIRE(m.outputs.size() == 2);
  CHECK(fs::exists(dir / "manifest.json"));
  for (const auto& o : m.outputs) CHECK(sha256_file(dir / o.path) == o.sha256);
  const std::string csv = slurp(dir / "dfs-basis.csv");
  CHECK(csv.rfind("# manifest=manifest.json config_sha256=" + m.config_sha256 + "\n", 0) == 0);
  CHECK(csv.find("\nvector,basis_index,ket,amplitude_real,amplitude_imag\n") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(dir / "dfs-basis_summary.json"));
  CHECK(summary["dimension"] == 6);
  CHECK(summary["residuals"].size() == 6);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["config"]["n"] == "4");
  CHECK(manifest["outputs"].size() == 2);

  c.override_value("construction", "magic");
  CHECK_THROWS_AS(run_scenario(c), ConfigError);
  c.override_value("construction", "kernel");
  c.override_value("n", "11");
  CHECK_THROWS_AS(run_scenario(c), ConfigError);
}

TEST_CASE("reruns are byte identical") {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  ScenarioConfig c = default_config("entangle-two");
  c.set("n_traj", "50");
  c.set("tmax", "5");
  c.set("seed", "9");
  c.set("output", a.string());
  run_scenario(c);
  c.override_value("output", b.string());
  c.override_value("threads", "3");
  run_scenario(c);
  for (const char* f : {"entangle-two.csv", "entangle-two_trajectories.csv", "entangle-two_summary.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  c.override_value("seed", "10");
  run_scenario(c);
  CHECK(slurp(a / "entangle-two_trajectories.csv") != slurp(b / "entangle-two_trajectories.csv"));
}

TEST_CASE("teleport scenario") {
  const fs::path dir = scratch("teleport");
  ScenarioConfig c = default_config("teleport");
  c.set("output", dir.string());
  c.set("td_sweep", "0:1.0/kappa:11");
  c.set("average", "true");
  run_scenario(c);
  std::istringstream csv(slurp(dir / "teleport.csv"));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  CHECK(line == "t_D,avg_fidelity,success_prob");
  int rows = 0;
  double last = 0.0;
  while (std::getline(csv, line)) {
    ++rows;
    last = std::stod(line.substr(0, line.find(',')));
  }
  CHECK(rows == 11);
  CHECK(last == doctest::Approx(100.0));  // 1.0 / 0.01 us

  ScenarioConfig single = default_config("teleport");
  single.set("output", dir.string());
  single.set("a", "0.6");
  single.set("b", "0.8i");
  single.set("n_runs", "50");
  const RunManifest m = run_scenario(single);
  CHECK(m.outputs.size() == 3);
  const auto s = nlohmann::json::parse(slurp(dir / "teleport_summary.json"));
  CHECK(s["input"]["b"][1].get<double>() == doctest::Approx(0.8));

  ScenarioConfig bad = default_config("teleport");
  bad.set("g", "3");
  CHECK_THROWS_AS(run_scenario(bad), ConfigError);
  ScenarioConfig over = default_config("teleport");
  over.set("regime", "custom");
  over.set("units", "rate");
  over.set("g", "1");
  over.set("omega", "1");
  over.set("delta", "1");
  over.set("kappa", "3");
  over.set("output", dir.string());
  CHECK_THROWS_AS(run_scenario(over), DomainError);
  ScenarioConfig eta = default_config("teleport");
  eta.set("eta", "1.5");
  CHECK_THROWS_AS(run_scenario(eta), ConfigError);
}

TEST_CASE("validation suite and failure injection") {
  ValidationOptions opt;
  opt.n_trajectories = 500;
  const ValidationReport r = run_validation(opt);
  CHECK(r.checks.size() == validation_check_names().size());
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
  bool alpha_note = false;
  for (const auto& n : r.notes) alpha_note |= n.find("alpha^2") != std::string::npos;
  CHECK(alpha_note);

  opt.inject_failure = "zeno_period";
  const ValidationReport f = run_validation(opt);
  CHECK_FALSE(f.all_passed());
  for (const auto& c : f.checks) CHECK(c.passed == (c.name != "zeno_period"));
  opt.inject_failure = "missing";
  CHECK_THROWS_AS(run_validation(opt), InvalidArgument);

  const fs::path dir = scratch("validate");
  ScenarioConfig c = default_config("validate");
  c.set("output", dir.string());
  c.set("n_traj", "200");
  c.set("inject_failure", "dfs_spans");
  const RunManifest m = run_scenario(c);
  CHECK_FALSE(m.passed);
  CHECK(slurp(dir / "validate.csv").find("dfs_spans,0,") != std::string::npos);
}
