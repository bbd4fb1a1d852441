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
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kerrblock/fock.hpp"

namespace kerrblock {

/// Value of a control trajectory and its time derivative at one instant.
struct PulseSample {
  cplx value;
  cplx derivative;
};

/// alpha(t) = sum_k alpha_k sin(k pi t / T), k = 1..k_max. The sine basis
/// pins alpha(0) = alpha(T) = 0.
class SinePulse {
 public:
  SinePulse(double duration, std::vector<cplx> coeffs);

  double duration() const noexcept { return duration_; }
  int kmax() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }

  cplx value(double t) const;
  cplx derivative(double t) const;
  /// sin(k pi t / T) for k = 1..kmax, the Jacobian of alpha(t) w.r.t. alpha_k.
  std::vector<double> basis(double t) const;

 private:
  double duration_;
  std::vector<cplx> coeffs_;
};

/// Throws DomainError for t outside [0, T].
PulseSample eval_pulse(const SinePulse& pulse, double t);

/// Constant amplitude over [0, T], optionally with sin^2 ramps of length
/// `ramp` at both ends. With ramp = 0 the amplitude switches on abruptly,
/// which is the idealized Fock-1 preparation protocol.
class PlateauPulse {
 public:
  PlateauPulse(double duration, cplx amplitude, double ramp = 0.0);

  double duration() const noexcept { return duration_; }
  cplx amplitude() const noexcept { return amplitude_; }
  double ramp() const noexcept { return ramp_; }
  cplx value(double t) const;
  cplx derivative(double t) const;

 private:
  double duration_;
  cplx amplitude_;
  double ramp_;
};

using Envelope = std::variant<SinePulse, PlateauPulse>;

double duration(const Envelope& envelope);
PulseSample sample(const Envelope& envelope, double t);

// Built-in modulation profiles as functions of time and period.
cplx profile_double_pump(double t, double period);
cplx profile_semi_rotation(double t, double period);
cplx profile_two_point(double t, double period);

enum class ProfileKind { DoublePump, SemiRotation, TwoPoint, Custom };

std::string_view to_string(ProfileKind kind);
/// Accepts "double_pump", "semi_rotation", "two_point".
ProfileKind parse_profile_kind(std::string_view name);

/// Periodic f(t) with M periods over [0, T]. Periods are resolved through the
/// phase s = frac(t M / T) so long runs do not accumulate drift.
class ModulationProfile {
 public:
  ModulationProfile(ProfileKind kind, int periods, double duration);
  /// Custom profile from uniform samples of one period at s_k = k/n.
  /// Linear interpolation; derivatives by centered differences, O(h^2).
  static ModulationProfile custom(std::vector<cplx> period_samples, int periods, double duration);

  ProfileKind kind() const noexcept { return kind_; }
  int periods() const noexcept { return periods_; }
  double duration() const noexcept { return duration_; }
  double period() const noexcept { return duration_ / periods_; }
  double omega_r() const noexcept;

  /// f as a function of the phase s in [0, 1].
  cplx at_phase(double s) const;
  /// df/ds.
  cplx derivative_at_phase(double s) const;
  cplx value(double t) const;
  cplx derivative(double t) const;
  double phase(double t) const;
  /// Phases where f or f' is non-smooth (quadrature panel edges).
  std::vector<double> breakpoints() const;

 private:
  ProfileKind kind_;
  int periods_;
  double duration_;
  std::vector<cplx> samples_;
};

struct ProfileReport {
  bool passed = false;
  cplx mean{};          // per-period average of f (should be 1)
  cplx mean_square{};   // per-period average of f^2 (should be 0)
  double symmetry_error = 0.0;  // max |f(s) - f(1 - s)|
  std::vector<std::string> failures;
};

/// Verifies f(dT - t) = f(t) (to 1e-12), avg f = 1 and avg f^2 = 0 (to 1e-10).
ProfileReport check_profile(const ModulationProfile& profile);

/// alpha~(t) = alpha(t) f(t) together with its analytic derivative.
class ModulatedPulse {
 public:
  ModulatedPulse(Envelope envelope, ModulationProfile profile);

  const Envelope& envelope() const noexcept { return envelope_; }
  const ModulationProfile& profile() const noexcept { return profile_; }
  double duration() const noexcept { return kerrblock::duration(envelope_); }
  cplx value(double t) const;
  cplx derivative(double t) const;
  PulseSample sample(double t) const;

 private:
  Envelope envelope_;
  ModulationProfile profile_;
};

/// Throws ContractError when the profile fails check_profile or the
/// durations disagree.
ModulatedPulse modulate(Envelope envelope, ModulationProfile profile);

}  // namespace kerrblock
