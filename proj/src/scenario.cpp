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


#include "qjump/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "qjump/conditional.hpp"
#include "qjump/dfs.hpp"
#include "qjump/errors.hpp"
#include "qjump/expm.hpp"
#include "qjump/log.hpp"
#include "qjump/teleport.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/validation.hpp"
#include "qjump/zeno.hpp"

namespace qjump {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Schema

namespace {

const std::vector<ConfigKey> kCommon = {
    {"seed", "1", "master seed for all random draws"},
    {"output", ".", "directory receiving the CSV, summary and manifest"},
    {"threads", "0", "worker threads (0 = hardware concurrency)"},
};

std::vector<ConfigKey> with_common(std::vector<ConfigKey> keys) {
  keys.insert(keys.end(), kCommon.begin(), kCommon.end());
  return keys;
}

const std::map<std::string, std::vector<ConfigKey>>& schemas() {
  static const std::map<std::string, std::vector<ConfigKey>> s = {
      {"entangle-two",
       with_common({{"g", "1", "atom-cavity coupling"},
                    {"kappa", "1", "cavity amplitude decay rate"},
                    {"gamma", "1e-3", "atomic amplitude decay rate"},
                    {"tmax", "15", "end time of the no-jump evolution"},
                    {"points", "301", "grid points over [0, tmax]"},
                    {"initial", "010", "initial ket |n a1 a2>"},
                    {"n_traj", "0", "trajectories to sample (0 = none)"},
                    {"dt", "0", "trajectory step (0 = 0.01 / fastest rate)"}})},
      {"dfs-basis",
       with_common({{"n", "4", "number of atoms"},
                    {"fock_cutoff", "1", "cavity Fock cutoff"},
                    {"construction", "kernel", "kernel | singlet | dicke"}})},
      {"zeno-oscillation",
       with_common({{"g", "1", "atom-cavity coupling"},
                    {"kappa", "1", "cavity amplitude decay rate"},
                    {"gamma", "1e-3", "atomic amplitude decay rate"},
                    {"omega1", "0.05", "Rabi frequency on atom 1"},
                    {"omega2", "auto", "Rabi frequency on atom 2 (auto = -omega1)"},
                    {"tmax", "0", "pulse length (0 = two effective periods)"},
                    {"points", "2000", "grid points over [0, tmax]"}})},
      {"zeno-success-sweep",
       with_common({{"g", "1", "atom-cavity coupling"},
                    {"kappa", "1", "cavity amplitude decay rate"},
                    {"gammas", "0,1e-3,1e-2", "comma-separated atomic decay rates"},
                    {"omega_min", "1e-3", "smallest Omega_1"},
                    {"omega_max", "0.3", "largest Omega_1"},
                    {"omega_points", "41", "logarithmic grid size"}})},
      {"teleport",
       with_common({{"regime", "reference", "reference | custom"},
                    {"units", "auto", "rate | MHz (auto = MHz for the reference regime)"},
                    {"g", "10", "coupling to the Raman transition"},
                    {"omega", "10", "classical Rabi frequency"},
                    {"kappa", "0.01", "cavity decay rate"},
                    {"gamma", "1", "upper-level decay rate (constraint checks only)"},
                    {"delta", "100", "Raman detuning"},
                    {"constraint_ratio", "10", "threshold for each strong inequality"},
                    {"td", "0.5/kappa", "detection window, number or x/kappa"},
                    {"td_sweep", "", "start:stop:count detection-window sweep"},
                    {"eta", "1", "detector efficiency"},
                    {"average", "false", "Bloch-sphere average instead of one input"},
                    {"a", "1", "input amplitude on |e>, x or x+yi"},
                    {"b", "0", "input amplitude on |g>, x or x+yi"},
                    {"n_runs", "0", "Monte Carlo realizations per window (0 = none)"}})},
      {"validate",
       with_common({{"n_traj", "2000", "trajectories for the oracle comparison"},
                    {"inject_failure", "", "force the named check to fail"}})},
  };
  return s;
}

[[noreturn]] void bad_value(const ScenarioConfig& c, const std::string& key, const std::string& what) {
  int line = 0;
  for (const auto& [k, l] : c.lines) {
    if (k == key) line = l;
  }
  throw ConfigError(key + ": " + what, line);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"entangle-two", "dfs-basis", "zeno-oscillation",
                                                 "zeno-success-sweep", "teleport", "validate"};
  return names;
}

const std::vector<ConfigKey>& scenario_schema(const std::string& scenario) {
  const auto it = schemas().find(scenario);
  if (it == schemas().end()) throw ConfigError("unknown scenario '" + scenario + "'");
  return it->second;
}

const std::string& ScenarioConfig::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw ConfigError("scenario '" + scenario + "' has no key '" + key + "'");
}

double ScenarioConfig::number(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(get(key), v) || !std::isfinite(v)) {
    bad_value(*this, key, "expected a finite number, got '" + get(key) + "'");
  }
  return v;
}

std::int64_t ScenarioConfig::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    bad_value(*this, key, "expected an integer, got '" + get(key) + "'");
  }
  return static_cast<std::int64_t>(v);
}

bool ScenarioConfig::flag(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(*this, key, "expected true or false, got '" + v + "'");
}

std::uint64_t ScenarioConfig::seed() const {
  const std::string& v = get("seed");
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size()) {
    bad_value(*this, "seed", "expected an unsigned integer, got '" + v + "'");
  }
  return s;
}

std::filesystem::path ScenarioConfig::output_dir() const { return get("output"); }

void ScenarioConfig::set(const std::string& key, const std::string& value, int line) {
  for (const auto& [k, l] : lines) {
    if (k == key) {
      throw ConfigError("key '" + key + "' set twice" +
                            (l > 0 ? " (first on line " + std::to_string(l) + ")" : ""),
                        line);
    }
  }
  for (auto& [k, v] : values) {
    if (k == key) {
      v = value;
      lines.emplace_back(key, line);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "' for scenario '" + scenario + "'", line);
}

void ScenarioConfig::override_value(const std::string& key, const std::string& value) {
  for (auto& [k, v] : values) {
    if (k != key) continue;
    v = value;
    std::erase_if(lines, [&](const auto& e) { return e.first == key; });
    lines.emplace_back(key, 0);
    return;
  }
  throw ConfigError("unknown key '" + key + "' for scenario '" + scenario + "'");
}

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  for (const auto& k : scenario_schema(scenario)) c.values.emplace_back(k.name, k.default_value);
  return c;
}

ScenarioConfig parse_config(std::istream& in, const std::string& scenario) {
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };
  std::vector<Entry> entries;
  std::string name = scenario;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.resize(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (key == "scenario") {
      if (!scenario.empty() && value != scenario) {
        throw ConfigError("file is for scenario '" + value + "', not '" + scenario + "'", line);
      }
      if (schemas().count(value) == 0) throw ConfigError("unknown scenario '" + value + "'", line);
      name = value;
      continue;
    }
    entries.push_back({key, value, line});
  }
  if (name.empty()) throw ConfigError("no scenario given");
  ScenarioConfig c = default_config(name);
  for (const auto& e : entries) c.set(e.key, e.value, e.line);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in, scenario);
}

std::string canonical_config(const ScenarioConfig& config) {
  std::string out = "scenario=" + config.scenario + "\n";
  for (const auto& [k, v] : config.values) out += k + "=" + v + "\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 computation failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string version() { return QJUMP_VERSION; }

// ---------------------------------------------------------------------------
// Output helpers

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

class Csv {
 public:
  Csv(const std::string& config_digest, std::vector<std::string> header) {
    text_ = "# manifest=manifest.json config_sha256=" + config_digest + "\n";
    row(header);
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += csv_field(fields[i]);
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json regime_json(const RegimeEntry& r) {
  return Json{{"name", r.name},
              {"satisfied", r.satisfied},
              {"ratio", json_number(r.ratio)},
              {"description", r.description}};
}

RegimeEntry regime_entry(const std::string& name, const RegimeReport& r) {
  return {name, r.satisfied, r.ratio, r.description};
}

/// Everything a scenario produces before it is written to disk.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  Json summary = Json::object();
  std::vector<RegimeEntry> regime;
  std::vector<std::string> messages;
  bool passed = true;
};

unsigned threads_of(const ScenarioConfig& c) {
  const auto t = c.integer("threads");
  if (t < 0) bad_value(c, "threads", "must be >= 0");
  return static_cast<unsigned>(t);
}

std::int64_t positive_int(const ScenarioConfig& c, const std::string& key, std::int64_t min) {
  const auto v = c.integer(key);
  if (v < min) bad_value(c, key, "must be >= " + std::to_string(min));
  return v;
}

double nonnegative(const ScenarioConfig& c, const std::string& key) {
  const double v = c.number(key);
  if (v < 0.0) bad_value(c, key, "must be >= 0");
  return v;
}

std::vector<double> number_list(const ScenarioConfig& c, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(c.get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double(item, v) || !std::isfinite(v)) {
      bad_value(c, key, "bad list entry '" + trim(item) + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) bad_value(c, key, "empty list");
  return out;
}

// ---------------------------------------------------------------------------
// entangle-two

Artifacts run_entangle_two(const ScenarioConfig& c, const std::string& digest) {
  const SystemParams params{nonnegative(c, "g"), nonnegative(c, "kappa"), nonnegative(c, "gamma"), 2};
  const double tmax = nonnegative(c, "tmax");
  const auto points = positive_int(c, "points", 2);
  const auto n_traj = positive_int(c, "n_traj", 0);
  const std::string& init = c.get("initial");
  if (init.size() != 3 || init.find_first_not_of("01") != std::string::npos) {
    bad_value(c, "initial", "expected three binary digits n a1 a2, got '" + init + "'");
  }
  const CompositeBasis basis = two_atom_basis();
  const StateVector psi0 = ket(basis, init[0] - '0', {init[1] - '0', init[2] - '0'});
  const StateVector target = singlet_target(basis);

  Artifacts out;
  const RegimeReport regime = regime_check(params);
  out.regime.push_back(regime_entry("gamma << kappa, g^2/kappa", regime));
  if (!regime.satisfied) warn("entangle-two: " + regime.description);

  const OperatorMatrix h = build_h_cond(params, basis);
  const double step = tmax / double(points - 1);
  const CMatrix u = expm(Complex(0.0, -step) * h.matrix());
  Csv csv(digest, {"t", "|c100|", "|c010|", "|c001|", "P0"});
  CVector v = psi0.amps();
  const Index i100 = basis.index_of(1, {0, 0});
  const Index i010 = basis.index_of(0, {1, 0});
  const Index i001 = basis.index_of(0, {0, 1});
  double p0 = 1.0;
  for (std::int64_t i = 0; i < points; ++i) {
    if (i > 0) v = u * v;
    p0 = v.squaredNorm();
    const double s = std::sqrt(p0);
    csv.row({num(step * double(i)), num(std::abs(v(i100)) / s), num(std::abs(v(i010)) / s),
             num(std::abs(v(i001)) / s), num(p0)});
  }
  out.files.emplace_back("entangle-two.csv", csv.text());
  const StateVector final_state(basis, v);
  out.summary["no_jump_probability"] = p0;
  out.summary["fidelity_to_singlet"] = state_fidelity(final_state, target);
  out.summary["minimum_preparation_time"] = minimum_preparation_time(params);

  if (n_traj > 0) {
    double dt = nonnegative(c, "dt");
    if (dt == 0.0) dt = max_step(params);
    const auto recs = simulate_ensemble(params, psi0, tmax, dt, c.seed(), std::size_t(n_traj),
                                        threads_of(c));
    Csv traj(digest, {"seed", "n_jumps", "first_jump_time", "survived", "fidelity_to_target"});
    for (const auto& r : recs) {
      traj.row({std::to_string(r.seed), std::to_string(r.jumps.size()),
                r.jumps.empty() ? "" : num(r.first_jump_time()), r.survived ? "1" : "0",
                num(state_fidelity(r.final_state, target))});
    }
    out.files.emplace_back("entangle-two_trajectories.csv", traj.text());
    out.summary["trajectories"] = n_traj;
    out.summary["trajectory_step"] = dt;
    out.summary["survival_fraction"] = survival_fraction(recs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// dfs-basis

Artifacts run_dfs_basis(const ScenarioConfig& c, const std::string& digest) {
  const int n = static_cast<int>(positive_int(c, "n", 1));
  const int cutoff = static_cast<int>(positive_int(c, "fock_cutoff", 1));
  const std::string& how = c.get("construction");
  auto build = [&]() -> DfsBasis {
    if (how == "kernel") return kernel_basis(n, cutoff);
    if (how == "singlet") return singlet_product_basis(n, cutoff);
    if (how != "dicke") bad_value(c, "construction", "expected kernel, singlet or dicke, got '" + how + "'");
    const auto states = dicke_ground_states(n, cutoff);
    CMatrix m(states.front().state.dim(), Index(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) m.col(Index(i)) = states[i].state.amps();
    return DfsBasis{n, states.front().state.basis(), std::move(m)};
  };
  const DfsBasis dfs = build();

  Artifacts out;
  Csv csv(digest, {"vector", "basis_index", "ket", "amplitude_real", "amplitude_imag"});
  Json residuals = Json::array();
  for (Index k = 0; k < dfs.dimension(); ++k) {
    for (Index i = 0; i < dfs.basis.dim(); ++i) {
      const Complex a = dfs.vectors(i, k);
      if (std::abs(a) <= 1e-14) continue;
      csv.row({std::to_string(k), std::to_string(i), dfs.basis.ket_label(i), num(a.real()), num(a.imag())});
    }
    residuals.push_back(is_decoherence_free(dfs.state(k)).residual);
  }
  out.files.emplace_back("dfs-basis.csv", csv.text());
  out.summary["n_atoms"] = n;
  out.summary["construction"] = how;
  out.summary["dimension"] = dfs.dimension();
  out.summary["expected_dimension"] = dfs_dimension(n);
  out.summary["asymptotic_dimension"] = dfs_dimension_asymptotic(n);
  out.summary["orthonormality_residual"] =
      (dfs.vectors.adjoint() * dfs.vectors - CMatrix::Identity(dfs.dimension(), dfs.dimension()))
          .cwiseAbs()
          .maxCoeff();
  out.summary["residuals"] = residuals;
  return out;
}

// ---------------------------------------------------------------------------
// zeno

Artifacts run_zeno_oscillation(const ScenarioConfig& c, const std::string& digest) {
  const SystemParams params{nonnegative(c, "g"), nonnegative(c, "kappa"), nonnegative(c, "gamma"), 2};
  const double omega1 = c.number("omega1");
  const double omega2 = c.get("omega2") == "auto" ? -omega1 : c.number("omega2");
  const LaserConfig laser{{omega1, omega2}, 0.0};
  double tmax = nonnegative(c, "tmax");
  const double coupling = effective_coupling(laser);
  if (tmax == 0.0) {
    if (coupling == 0.0) bad_value(c, "tmax", "required when the drive does not couple |000> and |0a>");
    tmax = 4.0 * half_transfer_time(laser);
  }
  const auto points = positive_int(c, "points", 2);

  Artifacts out;
  const ZenoComparison z = simulate_zeno_pulse(params, laser, ket(two_atom_basis(), 0, {0, 0}),
                                               tmax, static_cast<int>(points));
  out.regime.push_back(regime_entry("gamma << |Omega_i| << kappa, g^2/kappa", z.regime));
  Csv csv(digest, {"t", "pop_000", "pop_0a", "pop_outside", "P0"});
  for (std::size_t i = 0; i < z.t.size(); ++i) {
    csv.row({num(z.t[i]), num(z.full_populations[0][i]), num(z.full_populations[1][i]),
             num(z.outside_population[i]), num(z.no_jump_probability[i])});
  }
  out.files.emplace_back("zeno-oscillation.csv", csv.text());
  out.summary["effective_coupling"] = coupling;
  out.summary["half_transfer_time"] = coupling > 0.0 ? json_number(half_transfer_time(laser)) : Json(nullptr);
  out.summary["t_pulse"] = tmax;
  out.summary["max_deviation"] = z.max_deviation;
  out.summary["final_no_jump_probability"] = z.final_no_jump_probability;
  return out;
}

Artifacts run_zeno_sweep(const ScenarioConfig& c, const std::string& digest) {
  const SystemParams params{nonnegative(c, "g"), nonnegative(c, "kappa"), 0.0, 2};
  const std::vector<double> gammas = number_list(c, "gammas");
  for (double g : gammas) {
    if (g < 0.0) bad_value(c, "gammas", "rates must be >= 0");
  }
  const double lo = c.number("omega_min");
  const double hi = c.number("omega_max");
  if (!(lo > 0.0) || !(hi >= lo)) bad_value(c, "omega_min", "need 0 < omega_min <= omega_max");
  const auto n = positive_int(c, "omega_points", 1);
  std::vector<double> omegas;
  for (std::int64_t i = 0; i < n; ++i) {
    omegas.push_back(n == 1 ? lo : lo * std::pow(hi / lo, double(i) / double(n - 1)));
  }

  Artifacts out;
  const auto sweep = success_sweep(params, omegas, gammas, threads_of(c));
  Csv csv(digest, {"omega1", "gamma", "P0", "fidelity"});
  for (const auto& p : sweep) csv.row({num(p.omega1), num(p.gamma), num(p.p0), num(p.fidelity)});
  out.files.emplace_back("zeno-success-sweep.csv", csv.text());

  Json optima = Json::array();
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    std::size_t best = gi * omegas.size();
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      if (sweep[gi * omegas.size() + k].p0 > sweep[best].p0) best = gi * omegas.size() + k;
    }
    const std::size_t local = best - gi * omegas.size();
    optima.push_back(Json{{"gamma", gammas[gi]},
                          {"omega1", sweep[best].omega1},
                          {"P0", sweep[best].p0},
                          {"fidelity", sweep[best].fidelity},
                          {"interior", local > 0 && local + 1 < omegas.size()}});
  }
  out.summary["optima"] = optima;
  return out;
}

// ---------------------------------------------------------------------------
// teleport

Complex parse_complex(const ScenarioConfig& c, const std::string& key) {
  std::string s = trim(c.get(key));
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  double re = 0.0;
  double im = 0.0;
  if (!s.empty() && s.back() == 'i') {
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
    }
    const std::string re_part = split == std::string::npos ? "0" : s.substr(0, split);
    std::string im_part = split == std::string::npos ? s : s.substr(split);
    if (im_part.empty() || im_part == "+" || im_part == "-") im_part += "1";
    if (!parse_double(re_part, re) || !parse_double(im_part, im)) {
      bad_value(c, key, "expected x or x+yi, got '" + c.get(key) + "'");
    }
  } else if (!parse_double(s, re)) {
    bad_value(c, key, "expected x or x+yi, got '" + c.get(key) + "'");
  }
  return {re, im};
}

// "x" or "x/kappa"; the divisor is kappa as typed in the active units.
double parse_time(const ScenarioConfig& c, const std::string& key, const std::string& text,
                  double kappa_typed, double time_scale) {
  std::string s = trim(text);
  double divisor = 1.0;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    if (trim(s.substr(slash + 1)) != "kappa") bad_value(c, key, "only '/kappa' is supported, got '" + text + "'");
    if (!(kappa_typed > 0.0)) bad_value(c, key, "'/kappa' needs kappa > 0");
    divisor = kappa_typed;
    s = s.substr(0, slash);
  }
  double v = 0.0;
  if (!parse_double(s, v) || !std::isfinite(v) || v < 0.0) {
    bad_value(c, key, "expected a non-negative time, got '" + text + "'");
  }
  return v / divisor * time_scale;
}

Artifacts run_teleport(const ScenarioConfig& c, const std::string& digest) {
  const std::string& regime = c.get("regime");
  if (regime != "reference" && regime != "custom") bad_value(c, "regime", "expected reference or custom");
  std::string units = c.get("units");
  if (units == "auto") units = regime == "reference" ? "MHz" : "rate";
  if (units != "rate" && units != "MHz") bad_value(c, "units", "expected rate, MHz or auto");

  // Typed rates: in MHz they are nu / 2pi and become angular rates in rad/us.
  std::map<std::string, double> typed;
  for (const char* k : {"g", "omega", "kappa", "gamma", "delta"}) {
    if (regime == "reference") {
      for (const auto& [key, line] : c.lines) {
        if (key == k) bad_value(c, k, "cannot be overridden with regime = reference");
      }
    }
    typed[k] = nonnegative(c, k);
  }
  if (regime == "reference" && units != "MHz") bad_value(c, "units", "the reference regime is stated in MHz");
  const double scale = units == "MHz" ? 2.0 * std::numbers::pi : 1.0;
  TeleportParams p;
  p.g = typed["g"] * scale;
  p.omega = typed["omega"] * scale;
  p.kappa = typed["kappa"] * scale;
  p.gamma = typed["gamma"] * scale;
  p.delta = typed["delta"] * scale;
  p.constraint_ratio = c.number("constraint_ratio");
  p.validate();
  const AdiabaticRates rates = adiabatic_rates(p);  // DomainError when overdamped

  const double eta = c.number("eta");
  if (!(eta >= 0.0 && eta <= 1.0)) bad_value(c, "eta", "must lie in [0, 1]");
  const bool average = c.flag("average");
  const auto n_runs = positive_int(c, "n_runs", 0);
  if (average && n_runs > 0) bad_value(c, "n_runs", "Monte Carlo runs need a single input, not average");

  std::vector<double> windows;
  const std::string& sweep = c.get("td_sweep");
  if (sweep.empty()) {
    windows.push_back(parse_time(c, "td", c.get("td"), typed["kappa"], 1.0));
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(sweep);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) bad_value(c, "td_sweep", "expected start:stop:count");
    const double a = parse_time(c, "td_sweep", parts[0], typed["kappa"], 1.0);
    const double b = parse_time(c, "td_sweep", parts[1], typed["kappa"], 1.0);
    double count = 0.0;
    if (!parse_double(parts[2], count) || count < 2 || count != std::floor(count)) {
      bad_value(c, "td_sweep", "count must be an integer >= 2");
    }
    if (b < a) bad_value(c, "td_sweep", "stop must not precede start");
    for (int i = 0; i < int(count); ++i) windows.push_back(a + (b - a) * i / (count - 1.0));
  }

  QubitAmplitudes input{parse_complex(c, "a"), parse_complex(c, "b")};
  const double norm = std::sqrt(std::norm(input.a) + std::norm(input.b));
  if (!(norm > 0.0)) bad_value(c, "a", "input state has zero norm");
  if (std::abs(norm - 1.0) > 1e-12) {
    if (!average) warn(fmt::format("teleport: input normalized (norm was {:.12g})", norm));
    input.a /= norm;
    input.b /= norm;
  }

  Artifacts out;
  for (const auto& r : p.constraint_checks()) out.regime.push_back(regime_entry(r.description, r));
  for (const auto& r : out.regime) {
    if (!r.satisfied) warn("teleport: constraint violated: " + r.description);
  }

  const double t_i = mapping_time(rates.e, p.kappa);
  const double t_e = entangling_time(rates.e, p.kappa);
  const double alpha = alpha_coefficient(rates.e, p.kappa, t_i);
  Json& s = out.summary;
  s["units"] = units;
  s["time_unit"] = units == "MHz" ? "us" : "1/rate";
  s["angular_rates"] = Json{{"g", p.g}, {"omega", p.omega}, {"kappa", p.kappa}, {"gamma", p.gamma}, {"delta", p.delta}};
  s["E"] = rates.e;
  s["omega_kappa"] = rates.omega_kappa;
  s["t_I"] = t_i;
  s["t_E"] = t_e;
  s["t_E_minus_kappa_variant"] = entangling_time_minus_kappa(rates.e, p.kappa);
  s["alpha"] = alpha;
  s["beta"] = beta_coefficient(rates.e, p.kappa, t_e);
  s["eta"] = eta;

  if (average) {
    Csv csv(digest, {"t_D", "avg_fidelity", "success_prob"});
    Json notes = Json::array();
    for (double td : windows) {
      const AverageFidelity f = average_fidelity(p, td, eta);
      csv.row({num(td), num(f.fidelity), num(f.success_probability)});
      if (!f.note.empty() && notes.empty()) notes.push_back(f.note);
    }
    out.files.emplace_back("teleport.csv", csv.text());
    const AverageFidelity last = average_fidelity(p, windows.back(), eta);
    s["final_window"] = windows.back();
    s["final_avg_fidelity"] = json_number(last.fidelity);
    s["final_success_weighted_fidelity"] = json_number(last.success_weighted_fidelity);
    s["final_success_prob"] = last.success_probability;
    s["average_measure"] = "uniform Bloch sphere, 32-point Gauss-Legendre in cos(theta) x 64 azimuths";
    s["notes"] = notes;
    return out;
  }

  s["input"] = Json{{"a", {input.a.real(), input.a.imag()}}, {"b", {input.b.real(), input.b.imag()}}};
  const MappingResult mapped = map_atom_to_cavity(input, p);
  s["P_ND_A"] = mapped.no_decay_probability;
  s["P_ND_A_exponent_one"] = no_decay_probability_linear_alpha(input, p);
  s["preparation_probability"] = preparation_probability(input, p);
  Csv csv(digest, {"t_D", "fidelity", "success_prob"});
  for (double td : windows) {
    const BranchProbabilities br = branch_probabilities(input, p, td, eta);
    const double single = br.plus + br.minus;
    const double f = single > 0.0 ? fidelity_eta(input, p, td, eta) : NAN;
    csv.row({num(td), num(f), num(preparation_probability(input, p) * single)});
  }
  out.files.emplace_back("teleport.csv", csv.text());

  if (n_runs > 0) {
    ProtocolOptions opt;
    opt.threads = threads_of(c);
    Csv mc(digest, {"t_D", "n_runs", "prepared", "successes", "mc_fidelity", "analytic_fidelity",
                    "trace_distance"});
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const double td = windows[w];
      const auto runs = run_protocol_ensemble(input, p, td, eta, derive_seed(c.seed(), w),
                                              std::size_t(n_runs), opt);
      std::size_t prepared = 0;
      std::size_t ok = 0;
      for (const auto& r : runs) {
        prepared += r.stage != ProtocolStage::kPreparation;
        ok += r.success;
      }
      double mc_f = NAN;
      double dist = NAN;
      double analytic = NAN;
      if (ok > 0) {
        const CMatrix rho = success_conditioned_density(runs);
        const CVector v = input.vector();
        mc_f = std::real(v.dot(rho * v));
        analytic = fidelity_eta(input, p, td, eta);
        dist = trace_distance(rho, teleported_density(input, p, td, eta));
      }
      mc.row({num(td), std::to_string(n_runs), std::to_string(prepared), std::to_string(ok),
              num(mc_f), num(analytic), num(dist)});
    }
    out.files.emplace_back("teleport_mc.csv", mc.text());
  }
  return out;
}

// ---------------------------------------------------------------------------
// validate

Artifacts run_validate(const ScenarioConfig& c, const std::string& digest) {
  ValidationOptions opt;
  opt.inject_failure = c.get("inject_failure");
  opt.n_trajectories = std::size_t(positive_int(c, "n_traj", 10));
  opt.seed = c.seed();
  opt.threads = threads_of(c);
  const auto& names = validation_check_names();
  if (!opt.inject_failure.empty() &&
      std::find(names.begin(), names.end(), opt.inject_failure) == names.end()) {
    bad_value(c, "inject_failure", "unknown check '" + opt.inject_failure + "'");
  }
  const ValidationReport report = run_validation(opt);
  Artifacts out;
  Csv csv(digest, {"check", "passed", "value", "tolerance", "detail"});
  Json failed = Json::array();
  for (const auto& r : report.checks) {
    csv.row({r.name, r.passed ? "1" : "0", num(r.value), num(r.tolerance), r.detail});
    if (!r.passed) failed.push_back(r.name);
    out.messages.push_back(fmt::format("{} {:<28} {:>12.4g} <= {:<10.4g} {}", r.passed ? "PASS" : "FAIL",
                                       r.name, r.value, r.tolerance, r.detail));
  }
  for (const auto& n : report.notes) out.messages.push_back("note: " + n);
  out.files.emplace_back("validate.csv", csv.text());
  out.summary["checks"] = report.checks.size();
  out.summary["failed"] = failed;
  out.summary["notes"] = report.notes;
  out.passed = report.all_passed();
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  f << contents;
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

}  // namespace

RunManifest run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.version = version();
  m.scenario = config.scenario;
  m.config = config;
  // The output location and thread count never change results, so they stay
  // out of the digest that is stamped into every CSV.
  ScenarioConfig stamped = config;
  stamped.override_value("output", "");
  stamped.override_value("threads", "");
  m.config_sha256 = sha256_hex(canonical_config(stamped));
  (void)scenario_schema(config.scenario);

  std::vector<std::string> warnings;
  set_warning_sink([&warnings](const std::string& w) {
    warnings.push_back(w);
    std::clog << "qjump warning: " << w << '\n';
  });
  struct Restore {
    ~Restore() { set_warning_sink({}); }
  } restore;

  Artifacts art;
  try {
    const std::string& s = config.scenario;
    if (s == "entangle-two") art = run_entangle_two(config, m.config_sha256);
    else if (s == "dfs-basis") art = run_dfs_basis(config, m.config_sha256);
    else if (s == "zeno-oscillation") art = run_zeno_oscillation(config, m.config_sha256);
    else if (s == "zeno-success-sweep") art = run_zeno_sweep(config, m.config_sha256);
    else if (s == "teleport") art = run_teleport(config, m.config_sha256);
    else art = run_validate(config, m.config_sha256);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const DimensionLimitExceeded& e) {
    throw ConfigError(e.what());
  }

  const std::filesystem::path dir = config.output_dir();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  Json summary = Json::object();
  summary["scenario"] = config.scenario;
  summary["manifest"] = "manifest.json";
  for (auto& [k, v] : art.summary.items()) summary[k] = v;
  art.files.emplace_back(config.scenario + "_summary.json", summary.dump(2) + "\n");
  for (const auto& [name, contents] : art.files) {
    write_file(dir / name, contents);
    m.outputs.push_back({name, sha256_hex(contents), contents.size()});
  }
  m.regime = art.regime;
  m.warnings = warnings;
  m.passed = art.passed;
  m.messages = art.messages;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json cfg = Json::object();
  for (const auto& [k, v] : config.values) cfg[k] = v;
  Json regime = Json::array();
  for (const auto& r : m.regime) regime.push_back(regime_json(r));
  Json outputs = Json::array();
  for (const auto& o : m.outputs) outputs.push_back(Json{{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  const Json manifest{{"version", m.version},
                      {"scenario", m.scenario},
                      {"config", cfg},
                      {"config_sha256", m.config_sha256},
                      {"regime", regime},
                      {"warnings", m.warnings},
                      {"passed", m.passed},
                      {"started_utc", utc_timestamp()},
                      {"wall_clock_seconds", m.wall_clock_seconds},
                      {"outputs", outputs}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return m;
}

}  // namespace qjump
