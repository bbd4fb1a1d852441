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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kerrblock/blockade_config.hpp"
#include "kerrblock/fock.hpp"

namespace kerrblock {

enum class ObjectiveKind { Gate, State };

struct OptimizationProblem {
  ObjectiveKind kind = ObjectiveKind::Gate;
  Operator target_unitary;     // (r+1) x (r+1), gate mode
  StateVector initial_state;   // state mode, length >= r+1 (only the first r+1 entries may be nonzero)
  StateVector target_state;
  BlockadeConfig config;
  double duration = 0.2;
  int kmax = 5;
  bool escalate_kmax = false;  // kmax, kmax+2, ... up to 16 while the goal is missed by > 10x
  // Penalized mode (penalty > 0): single-drive frame with independent sine
  // ansatz for the displacement and the linear drive, objective F - penalty * g.
  double penalty = 0.0;
  int penalized_dim = 0;       // 0 => r + 4
  int restarts = 10;
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;
  double fidelity_goal = 1.0 - 1e-5;
  bool quasi_newton = true;
  double initial_step = 0.1;   // gradient-ascent trial step; BFGS starts from 1
  double shrink = 0.5;
  double armijo = 1e-4;
  double sigma_init = 2.0;
  std::optional<std::vector<cplx>> initial_guess;  // used by restart 0
  long steps = 1000;           // discretization of the objective
  bool verify = true;          // re-propagate the best pulse with step doubling

  bool penalized() const noexcept { return penalty > 0.0; }
  int blockade_dim() const noexcept { return config.r + 1; }
  /// Complex coefficients per harmonic budget: kmax, or 2 kmax when penalized.
  int coefficient_count(int k) const noexcept { return penalized() ? 2 * k : k; }
  /// Throws ContractError on an inconsistent problem.
  void validate() const;
};

struct ObjectiveValue {
  double value = 0.0;     // F, or F - penalty * g
  double fidelity = 0.0;
  double leakage = 0.0;
};

/// Discretized objective at the problem's step count. `coeffs` holds alpha_k
/// (then Lambda_k when penalized) for k = 1..kmax.
ObjectiveValue evaluate_objective(const OptimizationProblem& problem, const std::vector<cplx>& coeffs);

/// d value / d Re c_k + i d value / d Im c_k by the discrete adjoint.
std::vector<cplx> gradient(const OptimizationProblem& problem, const std::vector<cplx>& coeffs);

/// Central differences of evaluate_objective, same layout as gradient().
std::vector<cplx> finite_difference_gradient(const OptimizationProblem& problem, const std::vector<cplx>& coeffs,
                                             double h = 1e-5);

struct RestartTrace {
  int restart = 0;
  int kmax = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double fidelity = 0.0;
  double leakage = 0.0;
  int iterations = 0;
  bool reached_goal = false;
  std::string stop_reason;
  std::vector<double> history;  // accepted objective values
};

struct OptimizationReport {
  std::vector<cplx> coeffs;
  int kmax = 0;
  double objective = 0.0;
  double fidelity = 0.0;           // discretized
  double verified_fidelity = 0.0;  // step-doubled re-propagation (equals fidelity if not verified)
  double leakage = 0.0;
  long verification_steps = 0;
  double truncation_change = 0.0;  // penalized mode: fidelity change when the dimension grows by 2
  int dim = 0;
  int iterations = 0;              // of the best restart
  int restarts_run = 0;
  bool converged = false;
  double gradient_norm = 0.0;             // max-norm at the best point
  double gradient_check_residual = 0.0;   // max |adjoint - central difference|
  std::vector<RestartTrace> trace;
};

/// Multi-restart BFGS (or gradient) ascent with Armijo backtracking.
/// Restarts run in batches of four; the search stops after the first batch
/// that reaches the goal. The result depends only on (problem, seed).
OptimizationReport optimize(const OptimizationProblem& problem, std::uint64_t seed);
/// Same search on one thread.
OptimizationReport optimize_serial(const OptimizationProblem& problem, std::uint64_t seed);

/// Report for a given pulse without searching: discretized objective plus
/// the same verification optimize() performs.
OptimizationReport evaluate_pulse(const OptimizationProblem& problem, const std::vector<cplx>& coeffs);

/// Cyclic shift |n> -> |n-1 mod N>; for N = 3 this is |2><0| + |0><1| + |1><2|.
Operator permutation_gate(int n);
/// Discrete Fourier transform exp(2 pi i j k / N) / sqrt(N).
Operator fourier_gate(int n);

}  // namespace kerrblock
