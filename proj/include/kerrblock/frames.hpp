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

#include <vector>

#include "kerrblock/blockade_config.hpp"
#include "kerrblock/fock.hpp"
#include "kerrblock/pulse.hpp"

namespace kerrblock {

/// H(t) = drift + sum_j c_j(t) controls[j], every operator Hermitian.
struct ControlSystem {
  Operator drift;
  std::vector<Operator> controls;

  int dim() const noexcept { return static_cast<int>(drift.rows()); }
  Operator at(std::span<const double> coeffs) const;
};

/// Blockade Hamiltonian in the displaced rotating frame:
/// (chi/2) a^dag^2 a^2 + delta0 n + [chi alpha a^dag (n - r) + h.c.].
/// Requires dim >= r + 2.
Operator h_dr(cplx alpha, const BlockadeConfig& config, const FockSpace& space);

struct ProjectedHamiltonian {
  Operator drift;       // H_d0
  Operator control_re;  // H_cR, multiplies chi Re(alpha)
  Operator control_im;  // H_cI, multiplies chi Im(alpha)
};

/// Projection of h_dr onto span{|0>..|r>}: Pi h_dr(alpha) Pi = H_d0 + chi Re(alpha) H_cR + chi Im(alpha) H_cI.
ProjectedHamiltonian h_dr_projected(const BlockadeConfig& config);

/// Single-drive frame Hamiltonian, detuning fixed to zero:
/// (chi/2) a^dag^2 a^2 + [chi at a^dag (n - r) + h.c.] + [(chi/2) at^2 a^dag^2 + h.c.].
/// Requires dim >= r + 3.
Operator h_dr_prime(cplx alpha_tilde, const BlockadeConfig& config, const FockSpace& space);

/// h_dr_prime plus a miscalibrated linear drive [eta Lambda1 a^dag + h.c.].
Operator h_eta(cplx alpha_tilde, cplx eta, cplx lambda1, const BlockadeConfig& config, const FockSpace& space);

/// Frame with independent displacement and linear drive:
/// (chi/2) a^dag^2 a^2 + [chi a a^dag n + (chi/2) a^2 a^dag^2 + L a^dag + h.c.].
Operator h_dr_new(cplx alpha_new, cplx lambda1_new, const BlockadeConfig& config, const FockSpace& space);

/// Projected blockade frame as drift + {chi H_cR, chi H_cI}; coefficients (Re alpha, Im alpha).
ControlSystem blockade_control_system(const BlockadeConfig& config);
/// h_dr on a full truncated space; coefficients (Re alpha, Im alpha).
ControlSystem full_blockade_control_system(const BlockadeConfig& config, const FockSpace& space);
/// h_dr_prime; coefficients (Re at, Im at, Re at^2, Im at^2).
ControlSystem single_drive_control_system(const BlockadeConfig& config, const FockSpace& space);
/// h_dr_new; coefficients (Re a, Im a, Re a^2, Im a^2, Re L, Im L).
ControlSystem new_frame_control_system(const BlockadeConfig& config, const FockSpace& space);

/// Lab-frame drive program sampled on [0, T]. The carrier is exported as the
/// accumulated phase theta(t), so exp(-i w1(t) t) = exp(-i theta(t)).
struct DriveProgram {
  std::vector<double> times;
  std::vector<cplx> lambda1;
  std::vector<cplx> lambda2;
  std::vector<double> phase;
};

/// Two-drive translation of a sine-ansatz alpha(t):
///   Lambda1 = chi alpha (2|alpha|^2 - r) - delta0 alpha + i alpha' (+ i kappa alpha / 2)
///   Lambda2 = -(chi/2) alpha^2
///   theta   = (omega_c - delta0) t + int_0^t 2 chi |alpha|^2
/// with the phase integral evaluated in closed form. omega_c absent => 0.
DriveProgram drives_from_alpha(const SinePulse& pulse, const BlockadeConfig& config, int samples,
                               bool include_loss_correction);

/// 1-photon-only translation of a modulated pulse:
///   Lambda1' = chi at (|at|^2 - r) + i at' + i kappa at / 2,  Lambda2 = 0.
DriveProgram drive_single_from_alpha_tilde(const ModulatedPulse& pulse, const BlockadeConfig& config,
                                           int samples, bool include_loss_correction = true);

/// Lambda1'(t) at a single instant (same formula as above).
cplx single_drive_amplitude(const PulseSample& at, const BlockadeConfig& config, bool include_loss_correction = true);

}  // namespace kerrblock
