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
#include <ostream>
#include <vector>

#include "kerrblock/fock.hpp"

namespace kerrblock {

/// t -> H(t). Must return a Hermitian operator of fixed size on [0, T].
using HamiltonianSampler = std::function<Operator(double)>;

struct PropagationOptions {
  long initial_steps = 64;
  double tolerance = 1e-9;  // max-norm change between successive doublings
  long max_steps = 1L << 20;
  /// 2: midpoint exponential. 4: two-point Gauss-Legendre Magnus step
  /// exp(-i dt [(H1 + H2)/2 - i sqrt(3) dt [H2, H1] / 12]), for long oscillatory runs.
  int order = 2;
};

struct PropagationResult {
  std::optional<Operator> final_unitary;
  std::optional<StateVector> final_state;
  std::optional<Operator> final_density;
  double gate_fidelity = 0.0;
  double state_fidelity = 0.0;
  double leakage_g = 0.0;
  long step_count = 0;
  double convergence_estimate = 0.0;
};

/// Product of midpoint exponentials exp(-i H(t_mid) dt) over `steps` uniform steps
/// (or fourth-order Magnus steps with order = 4).
Operator propagate_fixed(const HamiltonianSampler& h, double duration, long steps, int order = 2);
StateVector propagate_state_fixed(const HamiltonianSampler& h, const StateVector& psi0, double duration, long steps,
                                  int order = 2);

/// One step from t0 to t0 + dt.
Operator step_propagator(const HamiltonianSampler& h, double t0, double dt, int order = 2);

/// Midpoint rule with step doubling from options.initial_steps until two
/// successive results differ by less than options.tolerance. Throws
/// ConvergenceError (carrying the finest result) at the step cap.
PropagationResult propagate_unitary(const HamiltonianSampler& h, double duration, const PropagationOptions& options = {});
PropagationResult propagate_state(const HamiltonianSampler& h, const StateVector& psi0, double duration,
                                  const PropagationOptions& options = {});

/// U(t_k) on the macro-step grid t_k = k T / steps, including U(0) = I.
struct Trajectory {
  std::vector<double> times;
  std::vector<Operator> unitaries;
};

Trajectory propagate_trajectory(const HamiltonianSampler& h, double duration, long steps);

/// |Tr(Pi_N U_tar^dag U Pi_N)|^2 / N^2 on the leading N x N block.
double gate_fidelity(const Operator& u, const Operator& u_target, int n);
/// |<target|psi>|^2 for normalized vectors (target padded with zeros when shorter).
double state_fidelity(const StateVector& psi, const StateVector& target);

/// g_u = 1/((r+1)T) int Tr[U^dag (I - Pi_r) U Pi_r] dt, trapezoidal.
double leakage(const Trajectory& trajectory, int r);
/// g_st = 1/T int <psi|(I - Pi_r)|psi> dt, trapezoidal.
double leakage(std::span<const double> times, std::span<const StateVector> states, int r);

/// CSV rows "t,p_0,...,p_{D-1},leak" for psi(t) = U(t) psi0.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const StateVector& psi0, int r);

enum class LindbladMethod { Auto, Superoperator, Splitting };

struct LindbladOptions {
  long initial_steps = 64;
  double tolerance = 1e-9;
  long max_steps = 1L << 18;
  LindbladMethod method = LindbladMethod::Auto;
  int superoperator_max_dim = 6;  // Auto picks the superoperator up to this dimension
  int order = 2;                  // Hamiltonian part of the splitting, as in PropagationOptions
};

struct LindbladResult {
  Operator rho;
  long step_count = 0;
  double convergence_estimate = 0.0;
};

/// Throws ContractError unless rho is Hermitian, unit trace and positive
/// semidefinite (eigenvalues >= -1e-9).
void validate_density(const Operator& rho);

/// d rho/dt = -i[H, rho] + kappa D[a] rho, D[a] rho = a rho a^dag - {a^dag a, rho}/2,
/// with a the truncated annihilation operator of rho's dimension.
LindbladResult lindblad_propagate(const Operator& rho0, const HamiltonianSampler& h, double kappa, double duration,
                                  const LindbladOptions& options = {});

/// Same dynamics at a fixed step count, no refinement.
Operator lindblad_fixed(const Operator& rho0, const HamiltonianSampler& h, double kappa, double duration, long steps,
                        LindbladMethod method, int order = 2);

}  // namespace kerrblock
