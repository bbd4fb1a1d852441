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
#include <cmath>
#include <limits>
#include <string>

#include "kerrblock/errors.hpp"
#include "kerrblock/propagate.hpp"

namespace kerrblock {

namespace {

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator sampled_hamiltonian(const HamiltonianSampler& h, double t, Eigen::Index dim) {
  Operator m = h(t);
  if (m.rows() != dim || m.cols() != dim) throw DimensionError("Hamiltonian and density operator sizes differ");
  if (!m.allFinite()) throw NumericError("Hamiltonian sampler returned non-finite entries");
  return m;
}

// Column-major vectorization: vec(A X B) = (B^T kron A) vec(X).
class Superoperator {
 public:
  Superoperator(int dim, double kappa) : dim_(dim), id_(Operator::Identity(dim, dim)) {
    const FockSpace space(dim);
    const Operator a = annihilation(space);
    const Operator n = number(space);
    dissipator_ = kappa * (kron(a.conjugate(), a) - 0.5 * kron(id_, n) - 0.5 * kron(n.transpose(), id_));
  }

  Operator step(const Operator& h, double dt) const {
    const Operator gen = -kI * (kron(id_, h) - kron(h.transpose(), id_)) + dissipator_;
    return matrix_exp(dt * gen);
  }

  Operator apply(const Operator& s, const Operator& rho) const {
    Eigen::Map<const Eigen::VectorXcd> v(rho.data(), rho.size());
    Eigen::VectorXcd w = s * v;
    return Eigen::Map<const Operator>(w.data(), dim_, dim_);
  }

 private:
  int dim_;
  Operator id_;
  Operator dissipator_;
};

// Exact amplitude-damping channel exp(tau kappa D[a]) in Kraus form.
std::vector<Operator> loss_channel(int dim, double kappa, double tau) {
  const double eta = std::exp(-kappa * tau);
  std::vector<Operator> kraus;
  for (int k = 0; k < dim; ++k) {
    Operator op = Operator::Zero(dim, dim);
    bool any = false;
    for (int n = k; n < dim; ++n) {
      const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      const double amp = std::sqrt(binom) * std::pow(eta, 0.5 * (n - k)) * std::pow(1.0 - eta, 0.5 * k);
      if (amp != 0.0) {
        op(n - k, n) = amp;
        any = true;
      }
    }
    if (any) kraus.push_back(std::move(op));
  }
  return kraus;
}

Operator apply_channel(const std::vector<Operator>& kraus, const Operator& rho) {
  Operator out = Operator::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

LindbladMethod resolve(LindbladMethod method, int dim, int superoperator_max_dim) {
  if (method != LindbladMethod::Auto) return method;
  return dim <= superoperator_max_dim ? LindbladMethod::Superoperator : LindbladMethod::Splitting;
}

}  // namespace

void validate_density(const Operator& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) throw ContractError("density operator must be square, dim >= 2");
  if (!rho.allFinite()) throw ContractError("density operator has non-finite entries");
  if (!is_hermitian(rho, 1e-10)) throw ContractError("density operator is not Hermitian");
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-9) throw ContractError("density operator trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Operator> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw ContractError("density operator has a negative eigenvalue");
}

Operator lindblad_fixed(const Operator& rho0, const HamiltonianSampler& h, double kappa, double duration, long steps,
                        LindbladMethod method, int order) {
  validate_density(rho0);
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ContractError("kappa must be finite and >= 0");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ContractError("propagation time must be finite and >= 0");
  if (steps < 1) throw ContractError("propagation needs at least one step");
  const int dim = static_cast<int>(rho0.rows());
  const double dt = duration / steps;
  method = resolve(method, dim, 6);

  Operator rho = rho0;
  if (method == LindbladMethod::Superoperator) {
    const Superoperator sup(dim, kappa);
    for (long k = 0; k < steps; ++k) {
      rho = sup.apply(sup.step(sampled_hamiltonian(h, (k + 0.5) * dt, dim), dt), rho);
    }
  } else {
    // Strang: half loss, midpoint unitary, half loss; interior halves merged.
    const auto half = loss_channel(dim, kappa, 0.5 * dt);
    const auto full = loss_channel(dim, kappa, dt);
    rho = apply_channel(half, rho);
    for (long k = 0; k < steps; ++k) {
      const Operator u = step_propagator(h, k * dt, dt, order);
      if (u.rows() != dim) throw DimensionError("Hamiltonian and density operator sizes differ");
      rho = u * rho * u.adjoint();
      rho = apply_channel(k + 1 == steps ? half : full, rho);
    }
  }
  // Re-symmetrize against roundoff drift.
  return 0.5 * (rho + rho.adjoint()).eval();
}

LindbladResult lindblad_propagate(const Operator& rho0, const HamiltonianSampler& h, double kappa, double duration,
                                  const LindbladOptions& options) {
  const LindbladMethod method =
      resolve(options.method, static_cast<int>(rho0.rows()), options.superoperator_max_dim);
  long steps = std::max<long>(1, options.initial_steps);
  Operator coarse = lindblad_fixed(rho0, h, kappa, duration, steps, method, options.order);
  double est = std::numeric_limits<double>::infinity();
  for (;;) {
    const long finer = 2 * steps;
    if (finer > options.max_steps) {
      throw ConvergenceError("lindblad_propagate: step cap reached before tolerance", coarse, est, steps);
    }
    Operator fine = lindblad_fixed(rho0, h, kappa, duration, finer, method, options.order);
    est = (fine - coarse).cwiseAbs().maxCoeff();
    if (est < options.tolerance) return {std::move(fine), finer, est};
    coarse = std::move(fine);
    steps = finer;
  }
}

}  // namespace kerrblock
