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
#include "kerrblock/propagate.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>
#include <tuple>

#include "kerrblock/errors.hpp"

namespace kerrblock {

namespace {

Operator checked_sample(const HamiltonianSampler& h, double t) {
  Operator m = h(t);
  if (m.rows() != m.cols()) throw DimensionError("Hamiltonian sampler returned a non-square matrix");
  if (!m.allFinite()) throw NumericError("Hamiltonian sampler returned non-finite entries");
  const double scale = std::max(1.0, max_abs(m));
  if (!is_hermitian(m, 1e-10 * scale)) throw ContractError("Hamiltonian sampler returned a non-Hermitian matrix");
  return m;
}

void check_order(int order) {
  if (order != 2 && order != 4) throw ContractError("propagation order must be 2 or 4");
}

void check_duration(double duration, long steps) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ContractError("propagation time must be finite and >= 0");
  if (steps < 1) throw ContractError("propagation needs at least one step");
}

template <class Run>
auto refine(Run run, long initial, double tol, long cap, const char* what) {
  long steps = std::max<long>(1, initial);
  auto coarse = run(steps);
  double est = std::numeric_limits<double>::infinity();
  for (;;) {
    const long finer = 2 * steps;
    if (finer > cap) {
      throw ConvergenceError(std::string(what) + ": step cap reached before tolerance", Eigen::MatrixXcd(coarse), est,
                             steps);
    }
    auto fine = run(finer);
    est = (fine - coarse).cwiseAbs().maxCoeff();
    if (est < tol) return std::tuple{std::move(fine), finer, est};
    coarse = std::move(fine);
    steps = finer;
  }
}

}  // namespace

Operator step_propagator(const HamiltonianSampler& h, double t0, double dt, int order) {
  if (order == 2) return HermitianPropagator(checked_sample(h, t0 + 0.5 * dt), dt).unitary();
  check_order(order);
  const double off = std::sqrt(3.0) / 6.0;
  const Operator h1 = checked_sample(h, t0 + (0.5 - off) * dt);
  const Operator h2 = checked_sample(h, t0 + (0.5 + off) * dt);
  const Operator eff = 0.5 * (h1 + h2) - kI * (std::sqrt(3.0) * dt / 12.0) * commutator(h2, h1);
  return HermitianPropagator(eff, dt).unitary();
}

Operator propagate_fixed(const HamiltonianSampler& h, double duration, long steps, int order) {
  check_duration(duration, steps);
  check_order(order);
  const double dt = duration / steps;
  Operator u = step_propagator(h, 0.0, dt, order);
  for (long k = 1; k < steps; ++k) u = step_propagator(h, k * dt, dt, order) * u;
  return u;
}

StateVector propagate_state_fixed(const HamiltonianSampler& h, const StateVector& psi0, double duration, long steps,
                                  int order) {
  check_duration(duration, steps);
  check_order(order);
  const double dt = duration / steps;
  StateVector psi = psi0;
  for (long k = 0; k < steps; ++k) psi = step_propagator(h, k * dt, dt, order) * psi;
  return psi;
}

PropagationResult propagate_unitary(const HamiltonianSampler& h, double duration, const PropagationOptions& options) {
  auto [u, steps, est] = refine([&](long s) { return propagate_fixed(h, duration, s, options.order); }, options.initial_steps,
                                options.tolerance, options.max_steps, "propagate_unitary");
  PropagationResult res;
  res.final_unitary = std::move(u);
  res.step_count = steps;
  res.convergence_estimate = est;
  return res;
}

PropagationResult propagate_state(const HamiltonianSampler& h, const StateVector& psi0, double duration,
                                  const PropagationOptions& options) {
  auto [psi, steps, est] = refine([&](long s) { return propagate_state_fixed(h, psi0, duration, s, options.order); },
                                  options.initial_steps, options.tolerance, options.max_steps, "propagate_state");
  PropagationResult res;
  res.final_state = std::move(psi);
  res.step_count = steps;
  res.convergence_estimate = est;
  return res;
}

Trajectory propagate_trajectory(const HamiltonianSampler& h, double duration, long steps) {
  check_duration(duration, steps);
  const double dt = duration / steps;
  Trajectory tr;
  tr.times.reserve(steps + 1);
  tr.unitaries.reserve(steps + 1);
  const Operator h0 = checked_sample(h, 0.0);
  tr.times.push_back(0.0);
  tr.unitaries.push_back(Operator::Identity(h0.rows(), h0.cols()));
  for (long k = 0; k < steps; ++k) {
    tr.unitaries.push_back(step_propagator(h, k * dt, dt) * tr.unitaries.back());
    tr.times.push_back(k + 1 == steps ? duration : (k + 1) * dt);
  }
  return tr;
}

double gate_fidelity(const Operator& u, const Operator& u_target, int n) {
  if (n < 1 || u.rows() < n || u.cols() < n || u_target.rows() < n || u_target.cols() < n) {
    throw DimensionError("gate_fidelity: operators smaller than the compared block");
  }
  const cplx tr = (u_target.topLeftCorner(n, n).adjoint() * u.topLeftCorner(n, n)).trace();
  return std::min(1.0, std::norm(tr) / (static_cast<double>(n) * n));
}

double state_fidelity(const StateVector& psi, const StateVector& target) {
  const Eigen::Index n = std::min(psi.size(), target.size());
  for (Eigen::Index k = n; k < target.size(); ++k) {
    if (target(k) != cplx{}) throw DimensionError("state_fidelity: target has support outside the state space");
  }
  return std::min(1.0, std::norm(target.head(n).dot(psi.head(n))));
}

double leakage(const Trajectory& trajectory, int r) {
  const auto& t = trajectory.times;
  if (t.size() < 2) throw ContractError("leakage needs at least two samples");
  const double duration = t.back() - t.front();
  if (!(duration > 0.0)) throw ContractError("leakage needs a positive time span");
  const int d = static_cast<int>(trajectory.unitaries.front().rows());
  if (r + 1 > d) throw DimensionError("leakage: r + 1 exceeds the dimension");
  auto integrand = [&](const Operator& u) {
    // Tr[U^dag (I - Pi) U Pi] = sum over columns j <= r of the weight outside the blockade.
    return u.bottomLeftCorner(d - r - 1, r + 1).squaredNorm();
  };
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    acc += 0.5 * (t[k] - t[k - 1]) * (integrand(trajectory.unitaries[k - 1]) + integrand(trajectory.unitaries[k]));
  }
  return acc / ((r + 1) * duration);
}

double leakage(std::span<const double> times, std::span<const StateVector> states, int r) {
  if (times.size() < 2 || times.size() != states.size()) throw ContractError("leakage needs matching samples");
  const double duration = times.back() - times.front();
  if (!(duration > 0.0)) throw ContractError("leakage needs a positive time span");
  const Eigen::Index d = states.front().size();
  if (r + 1 > d) throw DimensionError("leakage: r + 1 exceeds the dimension");
  auto integrand = [&](const StateVector& psi) { return psi.tail(d - r - 1).squaredNorm(); };
  double acc = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    acc += 0.5 * (times[k] - times[k - 1]) * (integrand(states[k - 1]) + integrand(states[k]));
  }
  return acc / duration;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const StateVector& psi0, int r) {
  const Eigen::Index d = psi0.size();
  out << "t";
  for (Eigen::Index n = 0; n < d; ++n) out << ",p_" << n;
  out << ",leak\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::scientific << std::setprecision(16);
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    const StateVector psi = trajectory.unitaries[k] * psi0;
    out << trajectory.times[k];
    for (Eigen::Index n = 0; n < d; ++n) out << ',' << std::norm(psi(n));
    out << ',' << psi.tail(d - r - 1).squaredNorm() << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

}  // namespace kerrblock
