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


#include "qjump/teleport.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "qjump/errors.hpp"

namespace qjump {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_rate(double v, const char* name, bool strictly_positive) {
  if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0)) {
    throw InvalidArgument(std::string(name) + (strictly_positive ? " must be > 0" : " must be >= 0"));
  }
}

double omega_kappa_of(double e, double kappa) {
  const double d = 4.0 * e * e - kappa * kappa;
  if (!(d > 0.0)) {
    std::ostringstream msg;
    msg << "overdamped regime: 4E^2 = " << 4.0 * e * e << " <= kappa^2 = " << kappa * kappa
        << ", Omega_kappa is not real";
    throw DomainError(msg.str());
  }
  return std::sqrt(d);
}

// Root of c sin(x) + w cos(x) = 0 on [pi/2, pi] (tan x = -w/c), by bisection
// to 1e-12 in x.
double branch_root(double c, double w) {
  double lo = std::numbers::pi / 2;
  double hi = std::numbers::pi;
  auto f = [&](double x) { return c * std::sin(x) + w * std::cos(x); };
  if (f(lo) <= 0.0) return lo;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Derived {
  double e;
  double omega_kappa;
  double t_i;
  double t_e;
  double alpha;
  double beta;
};

Derived derive(const TeleportParams& params) {
  params.validate();
  Derived d{};
  d.e = params.e_rate();
  d.omega_kappa = params.omega_kappa();
  d.t_i = mapping_time(d.e, params.kappa);
  d.t_e = entangling_time(d.e, params.kappa);
  d.alpha = alpha_coefficient(d.e, params.kappa, d.t_i);
  d.beta = beta_coefficient(d.e, params.kappa, d.t_e);
  return d;
}

void check_time(double t_d) {
  if (!(t_d >= 0.0) || !std::isfinite(t_d)) throw InvalidArgument("detection time must be >= 0");
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("detector efficiency must be in [0, 1]");
}

// Sector weights of the prepared joint state and the detection-window
// single-click weights for the pure and contaminated Bob states.
struct Sectors {
  double s;      // |a|^2
  double n;      // |a|^2 alpha^2 + |b|^2
  double u2;     // |a|^2 alpha^2 / n
  double w0;     // no photon
  double w1;     // one photon (always 1/2)
  double w2;     // one photon in each cavity
  double p;      // 1 - exp(-2 kappa t_D)
};

Sectors sectors(const QubitAmplitudes& input, const TeleportParams& params, double alpha,
                double t_d) {
  Sectors x{};
  x.s = std::norm(input.a);
  const double bb = std::norm(input.b);
  x.n = x.s * alpha * alpha + bb;
  x.u2 = x.s * alpha * alpha / x.n;
  x.w0 = bb / (2.0 * x.n);
  x.w1 = 0.5;
  x.w2 = x.u2 / 2.0;
  x.p = -std::expm1(-2.0 * params.kappa * t_d);
  return x;
}

}  // namespace

TeleportParams TeleportParams::reference_regime() {
  TeleportParams p;
  p.g = kTwoPi * 10.0;
  p.omega = kTwoPi * 10.0;
  p.kappa = kTwoPi * 0.01;
  p.gamma = kTwoPi * 1.0;
  p.delta = kTwoPi * 100.0;
  return p;
}

void TeleportParams::validate() const {
  check_rate(g, "g", true);
  check_rate(omega, "Omega", true);
  check_rate(kappa, "kappa", false);
  check_rate(gamma, "gamma", false);
  check_rate(delta, "Delta", true);
  if (!(constraint_ratio > 0.0)) throw InvalidArgument("constraint ratio must be > 0");
}

double TeleportParams::e_rate() const { return g * omega / delta; }

double TeleportParams::omega_kappa() const { return omega_kappa_of(e_rate(), kappa); }

double TeleportParams::cavity_lifetime() const {
  if (!(kappa > 0.0)) return std::numeric_limits<double>::infinity();
  return kTwoPi / kappa;
}

std::vector<RegimeReport> TeleportParams::constraint_checks() const {
  validate();
  auto report = [&](double ratio, const std::string& what) {
    RegimeReport r;
    r.ratio = ratio;
    r.threshold = constraint_ratio;
    r.satisfied = ratio >= constraint_ratio;
    std::ostringstream d;
    d << what << ": ratio " << ratio << (r.satisfied ? " >= " : " < ") << constraint_ratio;
    r.description = d.str();
    return r;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<RegimeReport> out;
  out.push_back(report(delta * delta / (g * omega), "g Omega / Delta^2 << 1"));
  out.push_back(report(gamma > 0.0 ? delta / gamma : inf, "Delta >> gamma"));
  const double e = e_rate();
  const double ok2 = 4.0 * e * e - kappa * kappa;
  out.push_back(report(ok2 <= 0.0 ? 0.0 : (kappa > 0.0 ? std::sqrt(ok2) / kappa : inf),
                       "Omega_kappa >> kappa"));
  return out;
}

AdiabaticRates adiabatic_rates(const TeleportParams& params) {
  params.validate();
  return {params.e_rate(), params.omega_kappa()};
}

double mapping_time(double e, double kappa) {
  check_rate(kappa, "kappa", false);
  const double w = omega_kappa_of(e, kappa);
  return 2.0 * branch_root(kappa, w) / w;
}

double entangling_time(double e, double kappa) {
  check_rate(kappa, "kappa", false);
  const double w = omega_kappa_of(e, kappa);
  return 2.0 * branch_root(2.0 * e + kappa, w) / w;
}

double entangling_time_minus_kappa(double e, double kappa) {
  check_rate(kappa, "kappa", false);
  const double w = omega_kappa_of(e, kappa);
  return 2.0 * branch_root(2.0 * e - kappa, w) / w;
}

double alpha_coefficient(double e, double kappa, double t) {
  const double w = omega_kappa_of(e, kappa);
  return std::exp(-kappa * t / 2.0) / w * 2.0 * e * std::sin(w * t / 2.0);
}

double beta_coefficient(double e, double kappa, double t) {
  return std::numbers::sqrt2 * alpha_coefficient(e, kappa, t);
}

std::array<Complex, 2> damped_exchange_amplitudes(double e, double kappa, double t) {
  const double w = omega_kappa_of(e, kappa);
  const double x = w * t / 2.0;
  const double decay = std::exp(-kappa * t / 2.0);
  return {Complex(decay * (std::cos(x) + kappa / w * std::sin(x)), 0.0),
          Complex(0.0, -alpha_coefficient(e, kappa, t))};
}

void QubitAmplitudes::validate() const {
  const double n = std::norm(a) + std::norm(b);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12) {
    throw InvalidArgument("qubit amplitudes must satisfy |a|^2 + |b|^2 = 1");
  }
}

QubitAmplitudes QubitAmplitudes::bloch(double theta, double phi) {
  return {Complex(std::cos(theta / 2.0), 0.0), std::polar(std::sin(theta / 2.0), phi)};
}

CVector QubitAmplitudes::vector() const {
  CVector v(2);
  v << a, b;
  return v;
}

MappingResult map_atom_to_cavity(const QubitAmplitudes& input, const TeleportParams& params) {
  input.validate();
  const Derived d = derive(params);
  const double n = std::norm(input.a) * d.alpha * d.alpha + std::norm(input.b);
  CVector cavity(2);
  cavity << input.b, input.a * d.alpha;
  return {cavity / std::sqrt(n), n};
}

MappingResult map_atom_to_cavity_integrated(const QubitAmplitudes& input,
                                            const TeleportParams& params) {
  input.validate();
  const Derived d = derive(params);
  const CompositeBasis basis = build_basis(1, {2});
  const OperatorMatrix b = cavity_annihilation(basis);
  const OperatorMatrix s = lowering_op(basis, 0, 1, 0);
  const OperatorMatrix h = (b * s.adjoint() + b.adjoint() * s) * Complex(d.e) +
                           photon_number(basis) * Complex(0.0, -params.kappa);
  CVector amps = CVector::Zero(basis.dim());
  amps(basis.index_of(0, {1})) = kI * input.a;  // Zeeman pre-phase
  amps(basis.index_of(0, {0})) = input.b;
  const StateVector out = propagate_nojump(h, StateVector(basis, amps), d.t_i);
  CVector cavity(2);
  cavity << out[basis.index_of(0, {0})], out[basis.index_of(1, {0})];
  const double p = out.norm_squared();
  return {cavity / std::sqrt(p), p};
}

double no_decay_probability_linear_alpha(const QubitAmplitudes& input, const TeleportParams& params) {
  input.validate();
  return std::norm(input.a) * derive(params).alpha + std::norm(input.b);
}

std::string to_string(DetectorRecord record) {
  switch (record) {
    case DetectorRecord::kNone: return "none";
    case DetectorRecord::kPlus: return "D+";
    case DetectorRecord::kMinus: return "D-";
    case DetectorRecord::kMultiple: return "multiple";
  }
  return "unknown";
}

BranchProbabilities branch_probabilities(const QubitAmplitudes& input,
                                         const TeleportParams& params, double t_d, double eta) {
  input.validate();
  check_time(t_d);
  check_eta(eta);
  const Derived d = derive(params);
  const Sectors x = sectors(input, params, d.alpha, t_d);
  const double p = x.p;
  const double q = 1.0 - p;
  // One photon: a single physical click with probability p, split evenly.
  const double one_single = x.w1 * p * eta;
  // Two photons: single recorded click from one emission, or from two
  // emissions with one missed; both recorded otherwise.
  const double two_single = x.w2 * (2.0 * p * q * eta + 2.0 * p * p * eta * (1.0 - eta));
  BranchProbabilities out;
  out.plus = 0.5 * (one_single + two_single);
  out.minus = out.plus;
  out.multiple = x.w2 * p * p * eta * eta;
  out.none = x.w0 + x.w1 * (1.0 - p * eta) +
             x.w2 * (q * q + 2.0 * p * q * (1.0 - eta) + p * p * (1.0 - eta) * (1.0 - eta));
  return out;
}

double preparation_probability(const QubitAmplitudes& input, const TeleportParams& params) {
  input.validate();
  const Derived d = derive(params);
  return (std::norm(input.a) * d.alpha * d.alpha + std::norm(input.b)) * d.beta * d.beta;
}

CMatrix teleported_density(const QubitAmplitudes& input, const TeleportParams& params,
                           double t_d, double eta) {
  input.validate();
  check_time(t_d);
  check_eta(eta);
  const Derived d = derive(params);
  const Sectors x = sectors(input, params, d.alpha, t_d);
  const double w_pure = x.w1 * x.p * eta;
  const double w_ground = x.w2 * (2.0 * x.p * (1.0 - x.p) * eta + 2.0 * x.p * x.p * eta * (1.0 - eta));
  const double total = w_pure + w_ground;
  if (!(total > 0.0)) {
    throw DomainError("no single-click events possible (eta = 0 or t_D = 0); Bob's state is undefined");
  }
  CVector psi(2);
  psi << input.a * d.alpha, input.b;
  psi /= std::sqrt(x.n);
  CMatrix rho = w_pure * (psi * psi.adjoint());
  rho(1, 1) += w_ground;
  return rho / total;
}

double fidelity_state_dependent(const QubitAmplitudes& input, const TeleportParams& params,
                                double t_d) {
  input.validate();
  check_time(t_d);
  const double alpha = derive(params).alpha;
  const double s = std::norm(input.a);
  const double bb = std::norm(input.b);
  const double e = std::exp(-2.0 * params.kappa * t_d);
  const double overlap = s * alpha + bb;
  const double contamination = 2.0 * s * alpha * alpha * e;
  return (overlap * overlap + contamination * bb) / (s * alpha * alpha + bb + contamination);
}

double fidelity_state_dependent_linear_alpha(const QubitAmplitudes& input,
                                        const TeleportParams& params, double t_d) {
  input.validate();
  check_time(t_d);
  const double alpha = derive(params).alpha;
  const double s = std::norm(input.a);
  const double bb = std::norm(input.b);
  const double e = std::exp(-2.0 * params.kappa * t_d);
  const double p_nd = s * alpha + bb;
  const double contamination = 2.0 * s * alpha * alpha * e;
  return (p_nd * p_nd + contamination * bb) / (p_nd + contamination);
}

double fidelity_eta(const QubitAmplitudes& input, const TeleportParams& params, double t_d,
                    double eta) {
  input.validate();
  check_time(t_d);
  check_eta(eta);
  const Derived d = derive(params);
  const Sectors x = sectors(input, params, d.alpha, t_d);
  const double e = 1.0 - x.p;
  const double p1d = x.p / 2.0 * (1.0 + 2.0 * x.u2 * e);
  const double p2d = x.u2 / 2.0 * x.p * x.p;
  const double p_suc = eta * p1d + 2.0 * eta * (1.0 - eta) * p2d;
  if (!(p_suc > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double f = fidelity_state_dependent(input, params, t_d);
  return (eta * p1d * f + 2.0 * eta * (1.0 - eta) * p2d * std::norm(input.b)) / p_suc;
}

double branch_fidelity(const QubitAmplitudes& input, const TeleportParams& params,
                       DetectorRecord branch, bool phase_correction) {
  input.validate();
  if (branch != DetectorRecord::kPlus && branch != DetectorRecord::kMinus) {
    throw InvalidArgument("branch fidelity is defined for single D+ or D- clicks");
  }
  const double alpha = derive(params).alpha;
  const double sign = branch == DetectorRecord::kPlus ? 1.0 : -1.0;
  Complex g_amp = kI * sign * input.b;
  if (phase_correction) g_amp *= -kI * sign;
  CVector psi(2);
  psi << input.a * alpha, g_amp;
  return std::norm(input.vector().dot(psi)) / psi.squaredNorm();
}

AverageFidelity average_fidelity(const TeleportParams& params, double t_d, double eta) {
  check_time(t_d);
  check_eta(eta);
  params.validate();
  constexpr int kAzimuths = 64;
  AverageFidelity out;
  if (eta == 0.0) {
    out.fidelity = std::numeric_limits<double>::quiet_NaN();
    out.success_weighted_fidelity = out.fidelity;
    out.success_probability = 0.0;
    out.note = "eta = 0: no click is ever recorded, so the teleported state and its fidelity are undefined";
    return out;
  }
  // Integrand means over the azimuth for a given cos(theta).
  auto mean_over_phi = [&](double c, int which) {
    const double theta = std::acos(std::clamp(c, -1.0, 1.0));
    double acc = 0.0;
    for (int k = 0; k < kAzimuths; ++k) {
      const QubitAmplitudes in = QubitAmplitudes::bloch(theta, kTwoPi * k / kAzimuths);
      const BranchProbabilities br = branch_probabilities(in, params, t_d, eta);
      const double single = br.plus + br.minus;
      switch (which) {
        case 0: acc += single > 0.0 ? fidelity_eta(in, params, t_d, eta) : 0.0; break;
        case 1: acc += single > 0.0 ? single * fidelity_eta(in, params, t_d, eta) : 0.0; break;
        case 2: acc += single; break;
        default: acc += preparation_probability(in, params) * single; break;
      }
    }
    return acc / kAzimuths;
  };
  using Rule = boost::math::quadrature::gauss<double, 32>;
  auto integrate = [&](int which) {
    return Rule::integrate([&](double c) { return mean_over_phi(c, which); }, -1.0, 1.0) / 2.0;
  };
  const double single = integrate(2);
  out.fidelity = integrate(0);
  out.success_weighted_fidelity = single > 0.0 ? integrate(1) / single
                                               : std::numeric_limits<double>::quiet_NaN();
  out.success_probability = integrate(3);
  if (t_d == 0.0) {
    out.fidelity = std::numeric_limits<double>::quiet_NaN();
    out.note = "t_D = 0: no click can be recorded";
  }
  return out;
}

}  // namespace qjump
