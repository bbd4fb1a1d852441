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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kerrblock/blockade_config.hpp"
#include "kerrblock/fock.hpp"
#include "kerrblock/propagate.hpp"
#include "kerrblock/pulse.hpp"

namespace kerrblock {

/// H(t; period) on one period [0, period].
using PeriodFamily = std::function<Operator(double t, double period)>;

struct MagnusLadderOptions {
  std::vector<double> periods{0.4, 0.2, 0.1, 0.05, 0.025};
  bool require_symmetric = true;
  long oracle_substeps = 2048;  // fourth-order steps per period, multiple of 4
  double symmetry_tolerance = 1e-10;
};

struct MagnusFit {
  double slope = 0.0;
  std::vector<double> periods;
  std::vector<double> errors;  // ||T exp(-i int H) - exp(-i int H)||_max
};

/// Log-log slope of the time-ordering error over one period versus the period.
/// With require_symmetric, a family with H(t) != H(period - t) is rejected
/// (ContractError). Error floors below 1e-13 are excluded from the fit.
MagnusFit magnus_symmetry_order(const PeriodFamily& family, const MagnusLadderOptions& options = {});

/// H_eta(alpha~(t)) with Lambda1'(t) of the single-drive translation.
HamiltonianSampler modulated_hamiltonian(const ModulatedPulse& pulse, const BlockadeConfig& config, int dim,
                                         cplx eta = 0.0, bool include_loss_correction = true);

struct Fock1Options {
  int steps_per_period = 40;
  int order = 4;
  double tolerance = 1e-9;
  long max_steps = 1L << 24;
  // The dimension grows by 2 from r + 3 until the infidelity changes by less
  // than max(dim_tolerance, dim_rel_tolerance * infidelity), up to max_dim.
  int max_dim = 24;
  double dim_tolerance = 1e-8;
  double dim_rel_tolerance = 0.02;
  std::optional<int> fixed_dim;
  cplx eta = 0.0;
  bool lindblad = false;  // evolve with kappa D[a] using config.kappa()
};

struct Fock1Result {
  double fidelity = 0.0;  // population of |1> at T starting from |0>
  double infidelity = 1.0;
  int dim = 0;
  bool dim_converged = true;  // false when max_dim was reached first
  long steps = 0;
};

/// Fock-1 preparation |0> -> |1> under the single-drive frame.
Fock1Result simulate_modulated_fock1(const ModulatedPulse& pulse, const BlockadeConfig& config,
                                     const Fock1Options& options = {});

struct TrotterScanOptions {
  ProfileKind profile = ProfileKind::SemiRotation;
  Fock1Options simulation{};
  double fit_max_error = 0.2;  // points above this are outside the perturbative regime
};

struct TrotterPoint {
  int periods = 0;
  double chi_t = 0.0;
  double alpha = 0.0;
  double eps_tt = 0.0;
  int dim = 0;
  bool dim_converged = true;
  long steps = 0;
  bool in_fit = false;
};

struct TrotterScan {
  std::vector<TrotterPoint> points;
  double slope_m = 0.0;
  double slope_chi_t = 0.0;
  double c2_free = 0.0;    // exp(intercept) of the free two-slope fit
  double c2 = 0.0;         // geometric mean of eps M^4 (chi T)^6 over the corner points
  std::size_t fit_points = 0;
  std::size_t corner_points = 0;
};

/// eps_tt = 1 - |<1|U(T)|0>|^2 for the constant-alpha Fock-1 protocol on the
/// (M, chi T) grid. alpha0 absent means alpha = pi / (2 |chi| T). Fits
/// log eps against log M and log chi T over points with eps < fit_max_error;
/// the corner is the smallest chi T together with the two largest M.
TrotterScan trotter_error_scan(std::optional<double> alpha0, std::span<const int> m_list,
                               std::span<const double> chi_t_list, const BlockadeConfig& config,
                               const TrotterScanOptions& options = {});
/// Same grid evaluated on one thread; results are identical.
TrotterScan trotter_error_scan_serial(std::optional<double> alpha0, std::span<const int> m_list,
                                      std::span<const double> chi_t_list, const BlockadeConfig& config,
                                      const TrotterScanOptions& options = {});

/// Least-squares fit of log y = c + sum_j b_j log x_j. Returns {c, b_1, ...}.
std::vector<double> log_linear_fit(std::span<const std::vector<double>> xs, std::span<const double> y);

}  // namespace kerrblock
