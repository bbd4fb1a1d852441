/* Copyright 2026 The Kerrblock Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "kerrblock/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrblock/errors.hpp"
#include "kerrblock/quadrature.hpp"

namespace kerrblock {

using std::numbers::pi;

SinePulse::SinePulse(double duration, std::vector<cplx> coeffs)
    : duration_(duration), coeffs_(std::move(coeffs)) {
  if (!(duration_ > 0.0)) throw ContractError("pulse duration must be positive");
  if (coeffs_.empty()) throw ContractError("sine ansatz needs k_max >= 1");
}

cplx SinePulse::value(double t) const {
  cplx acc = 0.0;
  const double w = pi * t / duration_;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) acc += coeffs_[k] * std::sin((k + 1) * w);
  return acc;
}

cplx SinePulse::derivative(double t) const {
  cplx acc = 0.0;
  const double w = pi * t / duration_;
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    acc += coeffs_[k] * ((k + 1) * pi / duration_) * std::cos((k + 1) * w);
  return acc;
}

std::vector<double> SinePulse::basis(double t) const {
  std::vector<double> out(coeffs_.size());
  const double w = pi * t / duration_;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::sin((k + 1) * w);
  return out;
}

PulseSample eval_pulse(const SinePulse& pulse, double t) {
  const double slack = 1e-12 * pulse.duration();
  if (t < -slack || t > pulse.duration() + slack) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << pulse.duration() << "]";
    throw DomainError(os.str());
  }
  return {pulse.value(t), pulse.derivative(t)};
}

PlateauPulse::PlateauPulse(double duration, cplx amplitude, double ramp)
    : duration_(duration), amplitude_(amplitude), ramp_(ramp) {
  if (!(duration_ > 0.0)) throw ContractError("pulse duration must be positive");
  if (ramp_ < 0.0 || 2.0 * ramp_ > duration_) throw ContractError("ramp must lie in [0, T/2]");
}

cplx PlateauPulse::value(double t) const {
  if (ramp_ == 0.0) return amplitude_;
  const double edge = std::min(t, duration_ - t);
  if (edge >= ramp_) return amplitude_;
  const double s = std::sin(0.5 * pi * std::max(edge, 0.0) / ramp_);
  return amplitude_ * s * s;
}

cplx PlateauPulse::derivative(double t) const {
  if (ramp_ == 0.0) return 0.0;
  if (t < ramp_) return amplitude_ * (0.5 * pi / ramp_) * std::sin(pi * std::max(t, 0.0) / ramp_);
  const double tail = duration_ - t;
  if (tail < ramp_) return -amplitude_ * (0.5 * pi / ramp_) * std::sin(pi * std::max(tail, 0.0) / ramp_);
  return 0.0;
}

double duration(const Envelope& envelope) {
  return std::visit([](const auto& p) { return p.duration(); }, envelope);
}

PulseSample sample(const Envelope& envelope, double t) {
  return std::visit([t](const auto& p) { return PulseSample{p.value(t), p.derivative(t)}; }, envelope);
}

cplx profile_double_pump(double t, double period) {
  return 1.0 + kI * std::sqrt(2.0) * std::cos(2.0 * pi * t / period);
}

namespace {

double frac_phase(double t, double period) {
  const double x = t / period;
  return x - std::floor(x);
}

cplx semi_rotation_at(double s) { return kI * (pi / 2.0) * std::exp(-kI * 2.0 * pi * std::abs(s - 0.5)); }

cplx two_point_at(double s) {
  const cplx lo = std::sqrt(2.0) * std::exp(-kI * pi / 4.0);
  const cplx hi = std::sqrt(2.0) * std::exp(kI * pi / 4.0);
  return (s < 0.25 || s > 0.75) ? lo : hi;
}

}  // namespace

cplx profile_semi_rotation(double t, double period) { return semi_rotation_at(frac_phase(t, period)); }

cplx profile_two_point(double t, double period) { return two_point_at(frac_phase(t, period)); }

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::DoublePump: return "double_pump";
    case ProfileKind::SemiRotation: return "semi_rotation";
    case ProfileKind::TwoPoint: return "two_point";
    case ProfileKind::Custom: return "custom";
  }
  return "?";
}

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "double_pump") return ProfileKind::DoublePump;
  if (name == "semi_rotation") return ProfileKind::SemiRotation;
  if (name == "two_point") return ProfileKind::TwoPoint;
  throw ConfigError("unknown profile '" + std::string(name) + "'");
}

ModulationProfile::ModulationProfile(ProfileKind kind, int periods, double duration)
    : kind_(kind), periods_(periods), duration_(duration) {
  if (periods_ < 1) throw ContractError("profile needs M >= 1 periods");
  if (!(duration_ > 0.0)) throw ContractError("profile duration must be positive");
  if (kind_ == ProfileKind::Custom) throw ContractError("use ModulationProfile::custom for sampled profiles");
}

ModulationProfile ModulationProfile::custom(std::vector<cplx> period_samples, int periods, double duration) {
  if (period_samples.size() < 4) throw ContractError("custom profile needs at least 4 samples");
  ModulationProfile p(ProfileKind::DoublePump, periods, duration);
  p.kind_ = ProfileKind::Custom;
  p.samples_ = std::move(period_samples);
  return p;
}

double ModulationProfile::omega_r() const noexcept { return 2.0 * pi * periods_ / duration_; }

cplx ModulationProfile::at_phase(double s) const {
  switch (kind_) {
    case ProfileKind::DoublePump: return 1.0 + kI * std::sqrt(2.0) * std::cos(2.0 * pi * s);
    case ProfileKind::SemiRotation: return semi_rotation_at(s);
    case ProfileKind::TwoPoint: return two_point_at(s);
    case ProfileKind::Custom: {
      const auto n = static_cast<long>(samples_.size());
      const double u = s * static_cast<double>(n);
      const long k = static_cast<long>(std::floor(u));
      const double w = u - static_cast<double>(k);
      const auto at = [&](long j) { return samples_[static_cast<std::size_t>(((j % n) + n) % n)]; };
      return (1.0 - w) * at(k) + w * at(k + 1);
    }
  }
  return 0.0;
}

cplx ModulationProfile::derivative_at_phase(double s) const {
  switch (kind_) {
    case ProfileKind::DoublePump: return -kI * std::sqrt(2.0) * 2.0 * pi * std::sin(2.0 * pi * s);
    case ProfileKind::SemiRotation: {
      const double sign = (s > 0.5) - (s < 0.5);
      return pi * pi * sign * std::exp(-kI * 2.0 * pi * std::abs(s - 0.5));
    }
    case ProfileKind::TwoPoint: return 0.0;
    case ProfileKind::Custom: {
      const auto n = static_cast<long>(samples_.size());
      const double h = 1.0 / static_cast<double>(n);
      const auto at = [&](long j) { return samples_[static_cast<std::size_t>(((j % n) + n) % n)]; };
      const auto node = [&](long j) { return (at(j + 1) - at(j - 1)) / (2.0 * h); };
      const double u = s * static_cast<double>(n);
      const long k = static_cast<long>(std::floor(u));
      const double w = u - static_cast<double>(k);
      return (1.0 - w) * node(k) + w * node(k + 1);
    }
  }
  return 0.0;
}

double ModulationProfile::phase(double t) const { return frac_phase(t, period()); }

cplx ModulationProfile::value(double t) const { return at_phase(phase(t)); }

cplx ModulationProfile::derivative(double t) const { return derivative_at_phase(phase(t)) / period(); }

std::vector<double> ModulationProfile::breakpoints() const {
  switch (kind_) {
    case ProfileKind::DoublePump: return {};
    case ProfileKind::SemiRotation: return {0.5};
    case ProfileKind::TwoPoint: return {0.25, 0.75};
    case ProfileKind::Custom: {
      std::vector<double> out;
      for (std::size_t k = 1; k < samples_.size(); ++k) out.push_back(static_cast<double>(k) / samples_.size());
      return out;
    }
  }
  return {};
}

ProfileReport check_profile(const ModulationProfile& profile) {
  ProfileReport rep;
  std::vector<double> edges{0.0};
  for (double b : profile.breakpoints()) edges.push_back(b);
  edges.push_back(1.0);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    rep.mean += quad::gauss_kronrod([&](double s) { return profile.at_phase(s); }, edges[k], edges[k + 1], 1e-13);
    rep.mean_square += quad::gauss_kronrod(
        [&](double s) {
          const cplx f = profile.at_phase(s);
          return f * f;
        },
        edges[k], edges[k + 1], 1e-13);
  }
  constexpr int kProbe = 2000;
  for (int k = 0; k <= kProbe; ++k) {
    const double s = static_cast<double>(k) / kProbe;
    rep.symmetry_error = std::max(rep.symmetry_error, std::abs(profile.at_phase(s) - profile.at_phase(1.0 - s)));
  }
  std::ostringstream os;
  if (std::abs(rep.mean - 1.0) > 1e-10) {
    os.str("");
    os << "avg f = " << rep.mean << ", expected 1";
    rep.failures.push_back(os.str());
  }
  if (std::abs(rep.mean_square) > 1e-10) {
    os.str("");
    os << "avg f^2 = " << rep.mean_square << ", expected 0";
    rep.failures.push_back(os.str());
  }
  if (rep.symmetry_error > 1e-12) {
    os.str("");
    os << "f(dT - t) differs from f(t) by up to " << rep.symmetry_error;
    rep.failures.push_back(os.str());
  }
  rep.passed = rep.failures.empty();
  return rep;
}

ModulatedPulse::ModulatedPulse(Envelope envelope, ModulationProfile profile)
    : envelope_(std::move(envelope)), profile_(std::move(profile)) {}

cplx ModulatedPulse::value(double t) const { return kerrblock::sample(envelope_, t).value * profile_.value(t); }

cplx ModulatedPulse::derivative(double t) const { return sample(t).derivative; }

PulseSample ModulatedPulse::sample(double t) const {
  const PulseSample a = kerrblock::sample(envelope_, t);
  const cplx f = profile_.value(t);
  const cplx df = profile_.derivative(t);
  return {a.value * f, a.derivative * f + a.value * df};
}

ModulatedPulse modulate(Envelope envelope, ModulationProfile profile) {
  const double t_env = duration(envelope);
  if (std::abs(t_env - profile.duration()) > 1e-12 * t_env)
    throw ContractError("profile and pulse durations differ");
  const ProfileReport rep = check_profile(profile);
  if (!rep.passed) {
    std::string msg = "modulation profile violates its constraints:";
    for (const auto& f : rep.failures) msg += " " + f + ";";
    throw ContractError(msg);
  }
  return ModulatedPulse(std::move(envelope), std::move(profile));
}

}  // namespace kerrblock
