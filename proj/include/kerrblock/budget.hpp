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
#include <string>
#include <vector>

#include "kerrblock/blockade_config.hpp"

namespace kerrblock {

inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Dimensionless: hbar = 1 and omega_c defaults to 1 (power in units of
/// hbar omega_c |chi|-scaled rates). SI: rates in rad/s, power in W.
enum class Units { Dimensionless, SI };

struct BudgetConstants {
  double c1 = 3.0 / 8.0;
  double c2 = 1.65;
  double c3_factor = 0.0;  // 0 => pi^6 / 4; c3 = c3_factor * hbar * omega_c
};

struct ErrorBudget {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double T = 0.0;
  double M = 0.0;
  std::optional<double> P_in;
  double eps_loss = 0.0;
  double eps_tt = 0.0;
  double eps_tot = 0.0;
  std::optional<double> T_opt;
  std::optional<double> eps_opt;
  double kappa_e = 0.0;  // external loss actually used
};

/// c3 = c3_factor hbar omega_c in the requested units.
double power_constant(const BlockadeConfig& config, Units units, const BudgetConstants& constants = {});

/// eps_loss = c1 kappa T, eps_tt = c2 / (M^4 (|chi| T)^6).
ErrorBudget total_error(const BlockadeConfig& config, double T, double M, const BudgetConstants& constants = {});

/// P_in = c3 M^2 / (kappa_e chi^2 T^4). Throws UndefinedPowerError when kappa_e = 0.
double power_required(const BlockadeConfig& config, double T, double M, Units units = Units::Dimensionless,
                      const BudgetConstants& constants = {});

/// Optimal T at fixed input power. With free_kappa_e the external loss is set
/// to kappa_i / 6. M is recovered from the power relation (not rounded).
ErrorBudget optimize_budget(const BlockadeConfig& config, double P_in, Units units = Units::Dimensionless,
                            bool free_kappa_e = false, const BudgetConstants& constants = {});

/// Input power at which the optimized infidelity equals eps (inverse of optimize_budget).
double power_for_eps_opt(const BlockadeConfig& config, double eps, Units units = Units::Dimensionless,
                         bool free_kappa_e = false, const BudgetConstants& constants = {});

struct PlatformSpec {
  std::string name;
  double omega_c = 0.0;  // rad/s
  double chi = 0.0;      // rad/s, signed
  double kappa_i = 0.0;  // 1/s
  std::string note;

  void validate() const;
  BlockadeConfig config(double kappa_e = 0.0) const;
};

/// 3 pi (kappa_i/|chi|)^(2/3) / (16 Q_i^(1/3)), Q_i = omega_c / kappa_i.
double eps_min_bound(const PlatformSpec& platform);
double eps_min_bound(const BlockadeConfig& config);

struct PowerBound {
  double P_in = 0.0;
  double kappa_e = 0.0;  // kappa_i / 5
};

/// P = 4 (3 pi c1)^6 / 5^5 hbar omega_c kappa_i^5 / (chi^4 eps^6), kappa_e = kappa_i / 5.
PowerBound power_lower_bound(const BlockadeConfig& config, double eps_target, Units units = Units::Dimensionless,
                             const BudgetConstants& constants = {});
/// eps(P) = c1 (pi/2) (kappa_e + kappa_i) kappa_e^(-1/6) (4 hbar omega_c / (P chi^4))^(1/6), kappa_e = kappa_i / 5.
double eps_from_power_bound(const BlockadeConfig& config, double P_in, Units units = Units::Dimensionless,
                            const BudgetConstants& constants = {});

struct FeasibilityReport {
  std::string platform;
  double fidelity_target = 0.0;
  double eps_target = 0.0;
  double eps_min = 0.0;
  double Q_i = 0.0;
  bool above_floor = false;  // eps_min < eps_target
  std::optional<double> P_in_at_target;
  std::optional<double> T_opt;
  std::optional<int> M;
  std::optional<double> alpha_at_target;
  std::optional<double> omega_r;
  std::optional<double> ratio_omega_r;     // omega_r / omega_c
  std::optional<double> ratio_alpha_omega; // alpha omega_r^2 / omega_c^2
  std::optional<double> ratio_chi_alpha;   // |chi| alpha^3 / omega_c
  bool rwa_violated = false;
  bool feasible = false;
  std::vector<std::string> notes;
};

/// Budget at the target fidelity with kappa_e = kappa_i / 6, SI units.
FeasibilityReport feasibility(const PlatformSpec& platform, double fidelity_target,
                              const BudgetConstants& constants = {});

/// Bundled catalog (PIC, ITO, GaAs, Ge, NbN and two ring resonators), or a
/// JSON file of the same layout.
std::vector<PlatformSpec> bundled_platforms();
std::vector<PlatformSpec> load_platforms(const std::string& path);
const PlatformSpec& find_platform(const std::vector<PlatformSpec>& catalog, const std::string& name);

struct C1Fit {
  double c1 = 0.0;
  std::vector<double> ratios;   // kappa / (chi alpha)
  std::vector<double> eps_per_kappa_t;
};

/// Two-level Fock-1 preparation under H = -chi alpha sigma_x with loss
/// dissipator_scale * kappa D[sigma_-]; eps/(kappa T) extrapolated linearly to kappa -> 0.
C1Fit fit_c1(double dissipator_scale = 1.0, std::vector<double> ratios = {1e-3, 3e-3, 1e-2});

/// Infidelity 1 - <1|rho(T)|1> of the two-level protocol at a single kappa.
double two_level_fock1_infidelity(double kappa_over_chi_alpha, double dissipator_scale = 1.0);

}  // namespace kerrblock
