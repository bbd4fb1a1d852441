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

#include <optional>

namespace kerrblock {

/// Physical parameters of the driven Kerr resonator. Dynamics code treats
/// these as dimensionless (units of |chi|); the budget layer also accepts SI
/// angular frequencies / rates.
struct BlockadeConfig {
  double chi = 1.0;     // Kerr coefficient, signed
  double delta0 = 0.0;  // detuning in the displaced rotating frame
  int r = 1;            // blockade parameter, subspace dimension N = r + 1
  double kappa_i = 0.0;
  double kappa_e = 0.0;
  std::optional<double> omega_c;  // resonator angular frequency, SI only

  double kappa() const noexcept { return kappa_i + kappa_e; }
  int blockade_dim() const noexcept { return r + 1; }

  /// Throws ContractError unless r >= 1, chi != 0 and the loss rates are >= 0.
  void validate() const;
};

}  // namespace kerrblock
