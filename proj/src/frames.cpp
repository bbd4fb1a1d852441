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
#include "kerrblock/frames.hpp"

#include <cmath>
#include <numbers>

#include "kerrblock/errors.hpp"
#include "kerrblock/quadrature.hpp"

namespace kerrblock {

namespace {

void require_dim(const FockSpace& space, int needed, const char* what) {
  if (space.dim() < needed) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(space.dim()) + " < " +
                         std::to_string(needed));
  }
}

// a^dag (n - r), the raising part of the engineered drive.
Operator blockade_raising(const FockSpace& space, int r) {
  Operator op = space.zeros();
  for (int n = 0; n + 1 < space.dim(); ++n) {
    op(n + 1, n) = static_cast<double>(n - r) * std::sqrt(static_cast<double>(n + 1));
  }
  return op;
}

Operator two_photon_raising(const FockSpace& space) {
  Operator op = space.zeros();
  for (int n = 0; n + 2 < space.dim(); ++n) {
    op(n + 2, n) = std::sqrt(static_cast<double>((n + 1) * (n + 2)));
  }
  return op;
}

// X + X^dag for a lower-triangular raising operator X = c * R.
Operator hermitian_pair(cplx c, const Operator& raising) {
  Operator x = c * raising;
  Operator h = x + x.adjoint();
  return h;
}

Operator detuned_kerr(const BlockadeConfig& config, const FockSpace& space) {
  Operator h = kerr(space, config.chi);
  for (int n = 0; n < space.dim(); ++n) h(n, n) += config.delta0 * n;
  return h;
}

}  // namespace

Operator ControlSystem::at(std::span<const double> coeffs) const {
  if (coeffs.size() != controls.size()) {
    throw ContractError("ControlSystem: coefficient count does not match controls");
  }
  Operator h = drift;
  for (std::size_t j = 0; j < controls.size(); ++j) {
    if (coeffs[j] != 0.0) h += coeffs[j] * controls[j];
  }
  return h;
}

Operator h_dr(cplx alpha, const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 2, "h_dr");
  Operator h = detuned_kerr(config, space);
  h += hermitian_pair(config.chi * alpha, blockade_raising(space, config.r));
  return h;
}

ProjectedHamiltonian h_dr_projected(const BlockadeConfig& config) {
  if (config.r < 1) throw ContractError("h_dr_projected: r must be >= 1");
  const FockSpace space(config.r + 1);
  const Operator raise = blockade_raising(space, config.r);
  ProjectedHamiltonian p;
  p.drift = detuned_kerr(config, space);
  p.control_re = raise + raise.adjoint();
  Operator raise_i = kI * raise;
  p.control_im = raise_i + raise_i.adjoint();
  return p;
}

Operator h_dr_prime(cplx alpha_tilde, const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 3, "h_dr_prime");
  Operator h = kerr(space, config.chi);
  h += hermitian_pair(config.chi * alpha_tilde, blockade_raising(space, config.r));
  h += hermitian_pair(0.5 * config.chi * alpha_tilde * alpha_tilde, two_photon_raising(space));
  return h;
}

Operator h_eta(cplx alpha_tilde, cplx eta, cplx lambda1, const BlockadeConfig& config, const FockSpace& space) {
  Operator h = h_dr_prime(alpha_tilde, config, space);
  h += hermitian_pair(eta * lambda1, creation(space));
  return h;
}

Operator h_dr_new(cplx alpha_new, cplx lambda1_new, const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 3, "h_dr_new");
  Operator h = kerr(space, config.chi);
  h += hermitian_pair(config.chi * alpha_new, creation(space) * number(space));
  h += hermitian_pair(0.5 * config.chi * alpha_new * alpha_new, two_photon_raising(space));
  h += hermitian_pair(lambda1_new, creation(space));
  return h;
}

ControlSystem blockade_control_system(const BlockadeConfig& config) {
  const ProjectedHamiltonian p = h_dr_projected(config);
  return {p.drift, {config.chi * p.control_re, config.chi * p.control_im}};
}

ControlSystem full_blockade_control_system(const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 2, "full_blockade_control_system");
  const Operator raise = blockade_raising(space, config.r);
  return {detuned_kerr(config, space),
          {hermitian_pair(config.chi, raise), hermitian_pair(kI * config.chi, raise)}};
}

ControlSystem single_drive_control_system(const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 3, "single_drive_control_system");
  const Operator raise = blockade_raising(space, config.r);
  const Operator two = two_photon_raising(space);
  const double half = 0.5 * config.chi;
  return {kerr(space, config.chi),
          {hermitian_pair(config.chi, raise), hermitian_pair(kI * config.chi, raise), hermitian_pair(half, two),
           hermitian_pair(kI * half, two)}};
}

ControlSystem new_frame_control_system(const BlockadeConfig& config, const FockSpace& space) {
  require_dim(space, config.r + 3, "new_frame_control_system");
  const Operator lin = creation(space) * number(space);
  const Operator two = two_photon_raising(space);
  const Operator up = creation(space);
  const double half = 0.5 * config.chi;
  return {kerr(space, config.chi),
          {hermitian_pair(config.chi, lin), hermitian_pair(kI * config.chi, lin), hermitian_pair(half, two),
           hermitian_pair(kI * half, two), hermitian_pair(1.0, up), hermitian_pair(kI, up)}};
}

namespace {

std::vector<double> uniform_grid(double duration, int samples) {
  if (samples < 2) throw ContractError("drive program needs at least 2 samples");
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = duration * i / (samples - 1);
  t.back() = duration;
  return t;
}

// int_0^t |sum_k a_k sin(k w s)|^2 ds, w = pi / T.
double sine_power_integral(const SinePulse& pulse, double t) {
  const double w = std::numbers::pi / pulse.duration();
  const auto& a = pulse.coeffs();
  const int n = pulse.kmax();
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= n; ++k) {
      const double c = std::real(a[j - 1] * std::conj(a[k - 1]));
      if (c == 0.0) continue;
      double integral;
      if (j == k) {
        integral = 0.5 * t - std::sin(2.0 * k * w * t) / (4.0 * k * w);
      } else {
        integral = std::sin((j - k) * w * t) / (2.0 * (j - k) * w) - std::sin((j + k) * w * t) / (2.0 * (j + k) * w);
      }
      acc += c * integral;
    }
  }
  return acc;
}

}  // namespace

DriveProgram drives_from_alpha(const SinePulse& pulse, const BlockadeConfig& config, int samples,
                               bool include_loss_correction) {
  DriveProgram prog;
  prog.times = uniform_grid(pulse.duration(), samples);
  const double carrier = config.omega_c.value_or(0.0) - config.delta0;
  const double chi = config.chi;
  prog.lambda1.reserve(samples);
  prog.lambda2.reserve(samples);
  prog.phase.reserve(samples);
  for (double t : prog.times) {
    const cplx a = pulse.value(t);
    const cplx da = pulse.derivative(t);
    cplx l1 = chi * a * (2.0 * std::norm(a) - config.r) - config.delta0 * a + kI * da;
    if (include_loss_correction) l1 += kI * config.kappa() * a / 2.0;
    prog.lambda1.push_back(l1);
    prog.lambda2.push_back(-0.5 * chi * a * a);
    prog.phase.push_back(carrier * t + 2.0 * chi * sine_power_integral(pulse, t));
  }
  prog.phase.front() = 0.0;
  return prog;
}

cplx single_drive_amplitude(const PulseSample& at, const BlockadeConfig& config, bool include_loss_correction) {
  cplx l1 = config.chi * at.value * (std::norm(at.value) - config.r) + kI * at.derivative;
  if (include_loss_correction) l1 += kI * config.kappa() * at.value / 2.0;
  return l1;
}

DriveProgram drive_single_from_alpha_tilde(const ModulatedPulse& pulse, const BlockadeConfig& config, int samples,
                                           bool include_loss_correction) {
  DriveProgram prog;
  prog.times = uniform_grid(pulse.duration(), samples);
  // The single-drive frame carries no detuning.
  const double carrier = config.omega_c.value_or(0.0);
  auto power = [&](double s) { return std::norm(pulse.value(s)); };
  double accumulated = 0.0;
  double prev = 0.0;
  for (double t : prog.times) {
    prog.lambda1.push_back(single_drive_amplitude(pulse.sample(t), config, include_loss_correction));
    prog.lambda2.push_back(0.0);
    if (t > prev) accumulated += quad::gauss_kronrod(power, prev, t, 1e-13);
    prev = t;
    prog.phase.push_back(carrier * t + 2.0 * config.chi * accumulated);
  }
  prog.phase.front() = 0.0;
  return prog;
}

}  // namespace kerrblock
