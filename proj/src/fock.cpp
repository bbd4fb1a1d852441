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
#include "kerrblock/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrblock/errors.hpp"

namespace kerrblock {

void BlockadeConfig::validate() const {
  if (r < 1) throw ContractError("blockade parameter r must be >= 1");
  if (chi == 0.0 || !std::isfinite(chi)) throw ContractError("chi must be finite and nonzero");
  if (!(kappa_i >= 0.0) || !(kappa_e >= 0.0)) throw ContractError("loss rates must be >= 0");
  if (omega_c && !(*omega_c > 0.0)) throw ContractError("omega_c must be positive when given");
}

FockSpace::FockSpace(int dim) : dim_(dim) {
  if (dim < 2) throw DimensionError("Fock space dimension must be >= 2, got " + std::to_string(dim));
}

StateVector FockSpace::basis(int n) const {
  if (n < 0 || n >= dim_) throw DimensionError("basis index outside the truncated space");
  StateVector v = StateVector::Zero(dim_);
  v(n) = 1.0;
  return v;
}

Operator annihilation(const FockSpace& space) {
  Operator a = space.zeros();
  for (int n = 1; n < space.dim(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator creation(const FockSpace& space) { return annihilation(space).adjoint(); }

Operator number(const FockSpace& space) {
  Operator n = space.zeros();
  for (int k = 0; k < space.dim(); ++k) n(k, k) = k;
  return n;
}

Operator kerr(const FockSpace& space, double chi) {
  Operator k = space.zeros();
  for (int n = 0; n < space.dim(); ++n) k(n, n) = 0.5 * chi * n * (n - 1);
  return k;
}

Operator projector(const FockSpace& space, int r) {
  if (r < 0 || r + 1 > space.dim())
    throw DimensionError("projector rank r+1 = " + std::to_string(r + 1) + " exceeds dim " +
                         std::to_string(space.dim()));
  Operator p = space.zeros();
  for (int n = 0; n <= r; ++n) p(n, n) = 1.0;
  return p;
}

double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Operator& a, double tol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

bool is_anti_hermitian(const Operator& a, double tol) {
  return a.rows() == a.cols() && max_abs(a + a.adjoint()) <= tol;
}

double unitarity_defect(const Operator& u) {
  return max_abs(u.adjoint() * u - Operator::Identity(u.rows(), u.cols()));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator matrix_exp(const Operator& a) {
  if (a.rows() != a.cols()) throw ContractError("matrix_exp needs a square matrix");
  if (!a.allFinite()) throw NumericError("matrix_exp: non-finite entries");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;

  // Higham (2005) degree-13 coefficients and theta_13.
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  const Operator x = a / std::ldexp(1.0, s);
  const Operator id = Operator::Identity(n, n);
  const Operator x2 = x * x;
  const Operator x4 = x2 * x2;
  const Operator x6 = x4 * x2;

  const Operator u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const Operator u = x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Operator v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const Operator v = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  Operator r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.allFinite()) throw NumericError("matrix_exp: overflow");
  return r;
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

HermitianPropagator::HermitianPropagator(const Operator& h, double dt) {
  if (!h.allFinite()) throw NumericError("Hamiltonian has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Operator> eig(h);
  if (eig.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  vecs_ = eig.eigenvectors();
  vals_ = eig.eigenvalues();
  const Eigen::Index n = vals_.size();
  Eigen::VectorXcd phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::exp(-kI * vals_(k) * dt);
  unitary_ = vecs_ * phase.asDiagonal() * vecs_.adjoint();
  divided_.resize(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      const double mean = 0.5 * (vals_(p) + vals_(q));
      const double half_gap = 0.5 * dt * (vals_(p) - vals_(q));
      divided_(p, q) = -kI * dt * std::exp(-kI * mean * dt) * sinc(half_gap);
    }
  }
}

Operator HermitianPropagator::derivative(const Operator& e) const {
  const Operator e_eig = vecs_.adjoint() * e * vecs_;
  return vecs_ * divided_.cwiseProduct(e_eig) * vecs_.adjoint();
}

cplx HermitianPropagator::trace_derivative(const Operator& x_eig, const Operator& e_eig) const {
  // sum_pq X~_qp Phi_pq E~_pq
  return (x_eig.transpose().cwiseProduct(divided_).cwiseProduct(e_eig)).sum();
}

namespace {

Eigen::VectorXd realify(const Operator& x) {
  const Eigen::Index m = x.size();
  Eigen::VectorXd v(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    v(k) = x.data()[k].real();
    v(m + k) = x.data()[k].imag();
  }
  return v;
}

class RealSpan {
 public:
  explicit RealSpan(Eigen::Index n) : n_(n) {}

  // Adds x if it is independent of the current span; returns true on growth.
  bool add(const Operator& x) {
    Eigen::VectorXd v = realify(x);
    const double norm0 = v.norm();
    if (norm0 < 1e-12) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : vectors_) v -= b.dot(v) * b;
    const double residual = v.norm();
    if (residual <= 1e-9 * norm0) return false;
    vectors_.push_back(v / residual);
    Operator op(n_, n_);
    const Eigen::Index m = op.size();
    for (Eigen::Index k = 0; k < m; ++k) op.data()[k] = cplx(v(k), v(m + k)) / residual;
    ops_.push_back(std::move(op));
    return true;
  }

  std::size_t size() const noexcept { return ops_.size(); }
  const Operator& op(std::size_t k) const { return ops_[k]; }

  int numerical_rank() const {
    if (vectors_.empty()) return 0;
    Eigen::MatrixXd m(vectors_.front().size(), static_cast<Eigen::Index>(vectors_.size()));
    for (std::size_t k = 0; k < vectors_.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = vectors_[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-9 * sv(0)) ++rank;
    return rank;
  }

 private:
  Eigen::Index n_;
  std::vector<Eigen::VectorXd> vectors_;
  std::vector<Operator> ops_;
};

}  // namespace

int lie_closure(std::span<const Operator> generators) {
  if (generators.empty()) return 0;
  const Eigen::Index n = generators.front().rows();
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) throw ContractError("lie_closure: generators differ in shape");
    if (!is_anti_hermitian(g, 1e-10 * std::max(1.0, max_abs(g))))
      throw ContractError("lie_closure: generator is not anti-Hermitian");
  }
  const std::size_t full = static_cast<std::size_t>(n * n);
  RealSpan span(n);
  for (const auto& g : generators) span.add(g);

  // Close under commutation; every pair is visited once as the basis grows.
  for (std::size_t i = 1; i < span.size() && span.size() < full; ++i)
    for (std::size_t j = 0; j < i && span.size() < full; ++j)
      span.add(commutator(span.op(i), span.op(j)));
  return span.numerical_rank();
}

SchirmerReport check_schirmer(const BlockadeConfig& config) {
  config.validate();
  const int n_levels = config.r + 1;
  SchirmerReport rep;
  for (int k = 0; k < n_levels; ++k)
    rep.energies.push_back(config.chi * (k * k - k) / 2.0 + config.delta0 * k);
  for (int k = 0; k + 1 < n_levels; ++k) rep.gaps.push_back(rep.energies[k] - rep.energies[k + 1]);

  const double scale = std::max({std::abs(config.chi), std::abs(config.delta0), 1.0});
  const double tol = 1e-12 * scale;
  const auto& mu = rep.gaps;
  const int last = n_levels - 2;
  auto branch = [&](int ref) {
    if (std::abs(mu[ref]) <= tol) return false;
    for (int k = 0; k <= last; ++k)
      if (k != ref && std::abs(mu[k] * mu[k] - mu[ref] * mu[ref]) <= tol * scale) return false;
    return true;
  };
  rep.lowest_gap_branch = branch(0);
  rep.highest_gap_branch = branch(last);
  rep.passes = rep.lowest_gap_branch || rep.highest_gap_branch;

  double trace = 0.0;
  for (double e : rep.energies) trace += e;
  rep.trace_nonzero = std::abs(trace) > tol;
  if (rep.passes) rep.group = rep.trace_nonzero ? "U(" + std::to_string(n_levels) + ")"
                                                : "SU(" + std::to_string(n_levels) + ")";

  std::ostringstream os;
  os << "N=" << n_levels << " mu=[";
  for (std::size_t k = 0; k < mu.size(); ++k) os << (k ? ", " : "") << mu[k];
  os << "] lowest-gap branch " << (rep.lowest_gap_branch ? "passes" : "fails")
     << ", highest-gap branch " << (rep.highest_gap_branch ? "passes" : "fails")
     << ", Tr[H_d0] " << (rep.trace_nonzero ? "!= 0" : "= 0");
  if (rep.passes)
    os << " => dynamical Lie group " << rep.group;
  else
    os << " => sufficient condition not met; the two-quadrature controls may still "
          "generate SU(N), see lie_closure";
  rep.diagnostic = os.str();
  return rep;
}

}  // namespace kerrblock
