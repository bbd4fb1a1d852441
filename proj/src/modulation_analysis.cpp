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
#include "kerrblock/modulation_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>

#include "kerrblock/errors.hpp"
#include "kerrblock/frames.hpp"

namespace kerrblock {

namespace {

// Fourth-order Gauss-Legendre Magnus steps over [0, period].
Operator time_ordered(const PeriodFamily& family, double period, long substeps) {
  const double h = period / substeps;
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  Operator u;
  for (long k = 0; k < substeps; ++k) {
    const double t0 = k * h;
    const Operator a1 = -kI * family(t0 + c1 * h, period);
    const Operator a2 = -kI * family(t0 + c2 * h, period);
    const Operator omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * commutator(a2, a1);
    const Operator step = matrix_exp(omega);
    u = k == 0 ? step : (step * u).eval();
  }
  return u;
}

// int_0^period H dt by three-point Gauss-Legendre on the same panels.
Operator integrated(const PeriodFamily& family, double period, long panels) {
  const double h = period / panels;
  const double x = std::sqrt(0.6);
  Operator acc;
  for (long k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    Operator part = (5.0 / 18.0) * family(mid - 0.5 * h * x, period) + (8.0 / 18.0) * family(mid, period) +
                    (5.0 / 18.0) * family(mid + 0.5 * h * x, period);
    if (k == 0) {
      acc = h * part;
    } else {
      acc += h * part;
    }
  }
  return acc;
}

void check_symmetric(const PeriodFamily& family, double period, double tol) {
  constexpr int kProbes = 41;
  for (int i = 0; i <= kProbes; ++i) {
    // Irregular probe points avoid landing only on breakpoints.
    const double s = (i + 0.1234567) / (kProbes + 1.0);
    const Operator a = family(s * period, period);
    const Operator b = family((1.0 - s) * period, period);
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a - b) > tol * scale) {
      throw ContractError("magnus_symmetry_order: H(t) != H(period - t) at t/period = " + std::to_string(s));
    }
  }
}

}  // namespace

std::vector<double> log_linear_fit(std::span<const std::vector<double>> xs, std::span<const double> y) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index p = static_cast<Eigen::Index>(xs.size()) + 1;
  if (n < p) throw ContractError("log_linear_fit: fewer points than parameters");
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) throw ContractError("log_linear_fit: non-positive response");
    a(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      const double xv = xs[j - 1].at(i);
      if (!(xv > 0.0)) throw ContractError("log_linear_fit: non-positive regressor");
      a(i, j) = std::log(xv);
    }
    b(i) = std::log(y[i]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < p) throw ContractError("log_linear_fit: regressors are degenerate");
  const Eigen::VectorXd sol = qr.solve(b);
  return {sol.data(), sol.data() + sol.size()};
}

MagnusFit magnus_symmetry_order(const PeriodFamily& family, const MagnusLadderOptions& options) {
  if (options.periods.size() < 2) throw ContractError("magnus_symmetry_order: need at least two periods");
  if (options.oracle_substeps < 4 || options.oracle_substeps % 4 != 0) {
    throw ContractError("magnus_symmetry_order: oracle_substeps must be a positive multiple of 4");
  }
  if (options.require_symmetric) {
    for (double p : options.periods) check_symmetric(family, p, options.symmetry_tolerance);
  }
  MagnusFit fit;
  std::vector<double> fit_x, fit_y;
  for (double p : options.periods) {
    if (!(p > 0.0)) throw ContractError("magnus_symmetry_order: periods must be positive");
    const Operator exact = time_ordered(family, p, options.oracle_substeps);
    const Operator plain = matrix_exp(-kI * integrated(family, p, options.oracle_substeps));
    const double err = max_abs(exact - plain);
    fit.periods.push_back(p);
    fit.errors.push_back(err);
    if (err > 1e-13) {
      fit_x.push_back(p);
      fit_y.push_back(err);
    }
  }
  if (fit_x.size() < 2) {
    // Everything at roundoff: the family commutes with itself.
    fit.slope = std::numeric_limits<double>::infinity();
    return fit;
  }
  const std::vector<std::vector<double>> xs{fit_x};
  fit.slope = log_linear_fit(xs, fit_y)[1];
  return fit;
}

HamiltonianSampler modulated_hamiltonian(const ModulatedPulse& pulse, const BlockadeConfig& config, int dim, cplx eta,
                                         bool include_loss_correction) {
  const FockSpace space(dim);
  auto sys = std::make_shared<ControlSystem>(single_drive_control_system(config, space));
  const Operator up = creation(space);
  sys->controls.push_back(up + up.adjoint());
  sys->controls.push_back(kI * up - kI * up.adjoint());
  return [sys, pulse, config, eta, include_loss_correction](double t) {
    const PulseSample at = pulse.sample(t);
    const cplx sq = at.value * at.value;
    const cplx drive = eta == cplx{} ? cplx{} : eta * single_drive_amplitude(at, config, include_loss_correction);
    const double c[6] = {at.value.real(), at.value.imag(), sq.real(), sq.imag(), drive.real(), drive.imag()};
    return sys->at(c);
  };
}

namespace {

Fock1Result fock1_at_dim(const ModulatedPulse& pulse, const BlockadeConfig& config, const Fock1Options& options,
                         int dim) {
  const HamiltonianSampler h = modulated_hamiltonian(pulse, config, dim, options.eta, true);
  const long initial = static_cast<long>(options.steps_per_period) * pulse.profile().periods();
  const FockSpace space(dim);
  Fock1Result res;
  res.dim = dim;
  if (options.lindblad) {
    const StateVector v0 = space.basis(0);
    const Operator rho0 = v0 * v0.adjoint();
    LindbladOptions lo;
    lo.initial_steps = initial;
    lo.tolerance = options.tolerance;
    lo.max_steps = options.max_steps;
    lo.order = options.order;
    const LindbladResult lr = lindblad_propagate(rho0, h, config.kappa(), pulse.duration(), lo);
    res.fidelity = std::clamp(lr.rho(1, 1).real(), 0.0, 1.0);
    res.steps = lr.step_count;
  } else {
    PropagationOptions po;
    po.initial_steps = initial;
    po.tolerance = options.tolerance;
    po.max_steps = options.max_steps;
    po.order = options.order;
    const PropagationResult pr = propagate_state(h, space.basis(0), pulse.duration(), po);
    res.fidelity = std::min(1.0, std::norm((*pr.final_state)(1)));
    res.steps = pr.step_count;
  }
  res.infidelity = 1.0 - res.fidelity;
  return res;
}

}  // namespace

Fock1Result simulate_modulated_fock1(const ModulatedPulse& pulse, const BlockadeConfig& config,
                                     const Fock1Options& options) {
  config.validate();
  if (options.fixed_dim) return fock1_at_dim(pulse, config, options, *options.fixed_dim);
  int dim = config.r + 3;
  Fock1Result prev = fock1_at_dim(pulse, config, options, dim);
  while (dim + 2 <= options.max_dim) {
    dim += 2;
    Fock1Result next = fock1_at_dim(pulse, config, options, dim);
    const double tol = std::max(options.dim_tolerance, options.dim_rel_tolerance * std::abs(next.infidelity));
    if (std::abs(next.infidelity - prev.infidelity) < tol) return next;
    prev = std::move(next);
  }
  prev.dim_converged = false;
  return prev;
}

namespace {

TrotterPoint scan_point(std::optional<double> alpha0, int m, double chi_t, const BlockadeConfig& config,
                        const TrotterScanOptions& options) {
  const double chi = std::abs(config.chi);
  const double duration = chi_t / chi;
  const double alpha = alpha0.value_or(std::numbers::pi / (2.0 * chi * duration));
  const ModulatedPulse pulse =
      modulate(PlateauPulse(duration, alpha), ModulationProfile(options.profile, m, duration));
  const Fock1Result res = simulate_modulated_fock1(pulse, config, options.simulation);
  TrotterPoint pt;
  pt.periods = m;
  pt.chi_t = chi_t;
  pt.alpha = alpha;
  pt.eps_tt = res.infidelity;
  pt.dim = res.dim;
  pt.dim_converged = res.dim_converged;
  pt.steps = res.steps;
  return pt;
}

void validate_scan(std::span<const int> m_list, std::span<const double> chi_t_list, const BlockadeConfig& config) {
  config.validate();
  if (config.kappa() != 0.0) throw ContractError("trotter_error_scan: requires kappa = 0");
  if (m_list.size() < 2 || chi_t_list.size() < 2) {
    throw ContractError("trotter_error_scan: need at least two values of M and of chi T");
  }
  for (int m : m_list) {
    if (m < 1) throw ContractError("trotter_error_scan: M must be >= 1");
  }
  for (double x : chi_t_list) {
    if (!(x > 0.0)) throw ContractError("trotter_error_scan: chi T must be > 0");
  }
}

TrotterScan fit_scan(std::vector<TrotterPoint> points, const TrotterScanOptions& options) {
  TrotterScan scan;
  std::vector<double> lm, lt, y;
  std::vector<int> ms;
  std::vector<double> ts;
  for (auto& p : points) {
    p.in_fit = p.eps_tt > 0.0 && p.eps_tt < options.fit_max_error;
    if (!p.in_fit) continue;
    lm.push_back(p.periods);
    lt.push_back(p.chi_t);
    y.push_back(p.eps_tt);
    if (std::find(ms.begin(), ms.end(), p.periods) == ms.end()) ms.push_back(p.periods);
    if (std::find(ts.begin(), ts.end(), p.chi_t) == ts.end()) ts.push_back(p.chi_t);
  }
  if (y.size() < 4 || ms.size() < 2 || ts.size() < 2) {
    throw ContractError("trotter_error_scan: fewer than 4 perturbative points or a degenerate axis");
  }
  const std::vector<std::vector<double>> xs{lm, lt};
  const auto coef = log_linear_fit(xs, y);
  scan.c2_free = std::exp(coef[0]);
  scan.slope_m = coef[1];
  scan.slope_chi_t = coef[2];
  scan.fit_points = y.size();

  // Corner: smallest chi T, two largest M, among the perturbative points.
  const double t_min = *std::min_element(ts.begin(), ts.end());
  std::vector<int> corner_m;
  for (const auto& p : points) {
    if (p.in_fit && p.chi_t == t_min) corner_m.push_back(p.periods);
  }
  std::sort(corner_m.rbegin(), corner_m.rend());
  if (corner_m.size() > 2) corner_m.resize(2);
  double log_sum = 0.0;
  for (const auto& p : points) {
    if (p.in_fit && p.chi_t == t_min && std::find(corner_m.begin(), corner_m.end(), p.periods) != corner_m.end()) {
      log_sum += std::log(p.eps_tt * std::pow(p.periods, 4) * std::pow(p.chi_t, 6));
      ++scan.corner_points;
    }
  }
  scan.c2 = scan.corner_points ? std::exp(log_sum / scan.corner_points) : scan.c2_free;
  scan.points = std::move(points);
  return scan;
}

}  // namespace

TrotterScan trotter_error_scan_serial(std::optional<double> alpha0, std::span<const int> m_list,
                                      std::span<const double> chi_t_list, const BlockadeConfig& config,
                                      const TrotterScanOptions& options) {
  validate_scan(m_list, chi_t_list, config);
  std::vector<TrotterPoint> points;
  for (double t : chi_t_list) {
    for (int m : m_list) points.push_back(scan_point(alpha0, m, t, config, options));
  }
  return fit_scan(std::move(points), options);
}

TrotterScan trotter_error_scan(std::optional<double> alpha0, std::span<const int> m_list,
                               std::span<const double> chi_t_list, const BlockadeConfig& config,
                               const TrotterScanOptions& options) {
  validate_scan(m_list, chi_t_list, config);
  const long nm = static_cast<long>(m_list.size());
  const long n = nm * static_cast<long>(chi_t_list.size());
  std::vector<TrotterPoint> points(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      points[i] = scan_point(alpha0, m_list[i % nm], chi_t_list[i / nm], config, options);
    } catch (...) {
#pragma omp critical(kerrblock_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return fit_scan(std::move(points), options);
}

}  // namespace kerrblock
