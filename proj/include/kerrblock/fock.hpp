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

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrblock/blockade_config.hpp"

namespace kerrblock {

using cplx = std::complex<double>;
/// Dense complex operator on a truncated Fock space. Energies are in units
/// of |chi| unless a function says otherwise.
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Truncated bosonic Hilbert space spanned by |0>, ..., |dim-1>.
class FockSpace {
 public:
  explicit FockSpace(int dim);

  int dim() const noexcept { return dim_; }
  Operator zeros() const { return Operator::Zero(dim_, dim_); }
  Operator identity() const { return Operator::Identity(dim_, dim_); }
  /// Fock state |n>.
  StateVector basis(int n) const;

 private:
  int dim_;
};

Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
Operator number(const FockSpace& space);
/// (chi/2) a^dag^2 a^2, diagonal with entries (chi/2) n (n-1).
Operator kerr(const FockSpace& space, double chi);
/// Projector onto span{|0>, ..., |r>}.
Operator projector(const FockSpace& space, int r);

double max_abs(const Operator& a);
bool is_hermitian(const Operator& a, double tol = 1e-12);
bool is_anti_hermitian(const Operator& a, double tol = 1e-12);
/// max |(U^dag U - I)_ij|
double unitarity_defect(const Operator& u);
Operator commutator(const Operator& a, const Operator& b);

/// exp(A) by scaling and squaring with a [13/13] Pade approximant.
/// Throws NumericError on non-finite entries.
Operator matrix_exp(const Operator& a);

/// Spectral data of a Hermitian H used to form exp(-i H dt) and its
/// Frechet derivative along Hermitian directions.
class HermitianPropagator {
 public:
  HermitianPropagator(const Operator& h, double dt);

  const Operator& unitary() const noexcept { return unitary_; }
  const Operator& eigenvectors() const noexcept { return vecs_; }

  /// Directional derivative of exp(-i H dt) along E.
  Operator derivative(const Operator& e) const;
  /// Tr(X * D[exp(-i H dt)](E)) without forming the derivative. `x_eig` is
  /// V^dag X V and `e_eig` is V^dag E V.
  cplx trace_derivative(const Operator& x_eig, const Operator& e_eig) const;

 private:
  Operator vecs_;
  Eigen::VectorXd vals_;
  Operator divided_;  // first divided differences of exp(-i lambda dt)
  Operator unitary_;
};

/// Dimension of the real Lie algebra generated by anti-Hermitian operators
/// under repeated commutation. Singular values above 1e-9 x largest count.
int lie_closure(std::span<const Operator> generators);

struct SchirmerReport {
  bool passes = false;
  bool lowest_gap_branch = false;   // mu_0 != 0 and mu_k^2 != mu_0^2 for k > 0
  bool highest_gap_branch = false;  // mu_{N-2} != 0 and mu_k^2 != mu_{N-2}^2 for k < N-2
  bool trace_nonzero = false;       // Tr[H_d0] != 0  =>  U(N) rather than SU(N)
  std::vector<double> energies;     // E_k
  std::vector<double> gaps;         // mu_k = E_k - E_{k+1}
  std::string group;                // "U(N)" / "SU(N)" / "" when the test fails
  std::string diagnostic;
};

/// Sufficient controllability test on the projected drift of H_dr.
SchirmerReport check_schirmer(const BlockadeConfig& config);

}  // namespace kerrblock
