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
#include "kerrblock/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numbers>
#include <random>

#include "kerrblock/errors.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/propagate.hpp"

namespace kerrblock {

namespace {

constexpr int kBatch = 4;
constexpr int kMaxKmax = 16;

int harmonics_of(const OptimizationProblem& p, std::size_t ncoeff) {
  if (ncoeff == 0 || (p.penalized() && ncoeff % 2 != 0)) {
    throw ContractError("coefficient vector has the wrong length for this problem");
  }
  return static_cast<int>(p.penalized() ? ncoeff / 2 : ncoeff);
}

int system_dim(const OptimizationProblem& p) {
  if (!p.penalized()) return p.blockade_dim();
  return p.penalized_dim > 0 ? p.penalized_dim : p.config.r + 4;
}

Eigen::VectorXd to_real(const std::vector<cplx>& c) {
  Eigen::VectorXd x(2 * c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    x(2 * k) = c[k].real();
    x(2 * k + 1) = c[k].imag();
  }
  return x;
}

std::vector<cplx> to_complex(const Eigen::VectorXd& x) {
  std::vector<cplx> c(x.size() / 2);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = {x(2 * k), x(2 * k + 1)};
  return c;
}

Operator embed(const Operator& block, int n) {
  Operator out = Operator::Zero(n, n);
  out.topLeftCorner(block.rows(), block.cols()) = block;
  return out;
}

StateVector pad(const StateVector& v, int n) {
  StateVector out = StateVector::Zero(n);
  out.head(v.size()) = v;
  return out;
}

// Discretized objective and its discrete adjoint for one harmonic budget.
class Evaluator {
 public:
  Evaluator(const OptimizationProblem& p, int kmax, int dim)
      : p_(p), kmax_(kmax), steps_(p.steps), dt_(p.duration / p.steps), n_(dim), nb_(p.blockade_dim()) {
    if (p.penalized()) {
      sys_ = new_frame_control_system(p.config, FockSpace(n_));
    } else {
      sys_ = blockade_control_system(p.config);
    }
    if (p.kind == ObjectiveKind::Gate) {
      x_ = embed(p.target_unitary.adjoint(), n_);
      fid_norm_ = static_cast<double>(nb_) * nb_;
      weight_proj_ = embed(Operator::Identity(nb_, nb_), n_);
      leak_scale_ = 1.0 / (nb_ * p.duration);
    } else {
      const StateVector psi0 = pad(p.initial_state, n_);
      const StateVector psit = pad(p.target_state, n_);
      x_ = psi0 * psit.adjoint();
      fid_norm_ = 1.0;
      weight_proj_ = psi0 * psi0.adjoint();
      leak_scale_ = 1.0 / p.duration;
    }
    outside_ = Operator::Identity(n_, n_) - embed(Operator::Identity(nb_, nb_), n_);
    sines_.resize(steps_ * kmax_);
    for (long j = 0; j < steps_; ++j) {
      const double t = (j + 0.5) * dt_;
      for (int k = 1; k <= kmax_; ++k) sines_[j * kmax_ + k - 1] = std::sin(k * std::numbers::pi * t / p.duration);
    }
  }

  int real_size() const { return 2 * p_.coefficient_count(kmax_); }

  ObjectiveValue value(const Eigen::VectorXd& x) const { return run(x, nullptr); }
  ObjectiveValue value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& g) const { return run(x, &g); }

 private:
  // Controls at step j and the displacement / drive values.
  void controls(const Eigen::VectorXd& x, long j, double* c, cplx& alpha, cplx& lambda) const {
    alpha = lambda = 0.0;
    const double* s = &sines_[j * kmax_];
    for (int k = 0; k < kmax_; ++k) alpha += cplx{x(2 * k), x(2 * k + 1)} * s[k];
    if (p_.penalized()) {
      for (int k = 0; k < kmax_; ++k) lambda += cplx{x(2 * (kmax_ + k)), x(2 * (kmax_ + k) + 1)} * s[k];
      const cplx sq = alpha * alpha;
      c[0] = alpha.real();
      c[1] = alpha.imag();
      c[2] = sq.real();
      c[3] = sq.imag();
      c[4] = lambda.real();
      c[5] = lambda.imag();
    } else {
      c[0] = alpha.real();
      c[1] = alpha.imag();
    }
  }

  ObjectiveValue run(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    if (x.size() != real_size()) throw ContractError("coefficient vector has the wrong length");
    const bool pen = p_.penalized();
    const std::size_t nc = sys_.controls.size();
    std::vector<HermitianPropagator> props;
    std::vector<Operator> f;  // f[j] = U_j ... U_1
    props.reserve(steps_);
    f.reserve(steps_ + 1);
    f.push_back(Operator::Identity(n_, n_));
    std::vector<cplx> alphas(steps_);
    double c[6];
    double leak = 0.0;
    auto leak_term = [&](const Operator& fm) {
      // Tr(P F^dag Q F)
      return (weight_proj_ * fm.adjoint() * outside_ * fm).trace().real();
    };
    for (long j = 0; j < steps_; ++j) {
      cplx lambda;
      controls(x, j, c, alphas[j], lambda);
      props.emplace_back(sys_.at(std::span<const double>(c, nc)), dt_);
      f.push_back(props.back().unitary() * f.back());
    }
    if (pen) {
      for (long m = 1; m <= steps_; ++m) leak += (m == steps_ ? 0.5 : 1.0) * dt_ * leak_term(f[m]);
      leak *= leak_scale_;
    }
    const cplx z = (x_ * f.back()).trace();
    ObjectiveValue out;
    out.fidelity = std::min(1.0, std::norm(z) / fid_norm_);
    out.leakage = leak;
    out.value = out.fidelity - (pen ? p_.penalty * leak : 0.0);
    if (!grad) return out;

    grad->setZero(real_size());
    auto g_term = [&](long m) -> Operator {
      // Co-state source at grid point m.
      Operator gm = Operator::Zero(n_, n_);
      if (pen && m > 0) {
        const double w = (m == steps_ ? 0.5 : 1.0) * dt_;
        gm += (-p_.penalty * leak_scale_ * 2.0 * w) * (weight_proj_ * f[m].adjoint() * outside_);
      }
      if (m == steps_) gm += (2.0 / fid_norm_) * std::conj(z) * x_;
      return gm;
    };
    Operator lam = g_term(steps_);
    std::vector<double> dc(nc);
    for (long j = steps_; j >= 1; --j) {
      const HermitianPropagator& pr = props[j - 1];
      const Operator& v = pr.eigenvectors();
      const Operator x_eig = v.adjoint() * (f[j - 1] * lam) * v;
      for (std::size_t q = 0; q < nc; ++q) {
        const Operator e_eig = v.adjoint() * sys_.controls[q] * v;
        dc[q] = pr.trace_derivative(x_eig, e_eig).real();
      }
      const cplx a = alphas[j - 1];
      double wa_re = dc[0], wa_im = dc[1];
      if (pen) {
        const cplx two_a = 2.0 * a;
        const cplx two_ia = 2.0 * kI * a;
        wa_re += two_a.real() * dc[2] + two_a.imag() * dc[3];
        wa_im += two_ia.real() * dc[2] + two_ia.imag() * dc[3];
      }
      const double* s = &sines_[(j - 1) * kmax_];
      for (int k = 0; k < kmax_; ++k) {
        (*grad)(2 * k) += wa_re * s[k];
        (*grad)(2 * k + 1) += wa_im * s[k];
        if (pen) {
          (*grad)(2 * (kmax_ + k)) += dc[4] * s[k];
          (*grad)(2 * (kmax_ + k) + 1) += dc[5] * s[k];
        }
      }
      if (j > 1) lam = g_term(j - 1) + lam * pr.unitary();
    }
    return out;
  }

  const OptimizationProblem& p_;
  int kmax_;
  long steps_;
  double dt_;
  int n_;
  int nb_;
  ControlSystem sys_;
  Operator x_;
  double fid_norm_ = 1.0;
  Operator weight_proj_;
  Operator outside_;
  double leak_scale_ = 0.0;
  std::vector<double> sines_;
};

std::vector<cplx> draw_initial(const OptimizationProblem& p, int kmax, std::uint64_t seed, int restart) {
  std::vector<cplx> c(p.coefficient_count(kmax));
  if (restart == 0 && p.initial_guess) {
    const auto& guess = *p.initial_guess;
    const int hg = harmonics_of(p, guess.size());
    for (int k = 0; k < std::min(hg, kmax); ++k) {
      c[k] = guess[k];
      if (p.penalized()) c[kmax + k] = guess[hg + k];
    }
    return c;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), static_cast<std::uint32_t>(kmax)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 1; k <= kmax; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    c[k - 1] = (p.sigma_init / k) * cplx{re, im} / std::sqrt(2.0);
  }
  if (p.penalized()) {
    for (int k = 0; k < kmax; ++k) c[kmax + k] = -static_cast<double>(p.config.r) * p.config.chi * c[k];
  }
  return c;
}

struct RestartResult {
  RestartTrace trace;
  Eigen::VectorXd x;
};

RestartResult run_restart(const OptimizationProblem& p, const Evaluator& ev, int kmax, std::uint64_t seed, int restart) {
  RestartResult res;
  res.trace.restart = restart;
  res.trace.kmax = kmax;
  Eigen::VectorXd x = to_real(draw_initial(p, kmax, seed, restart));
  Eigen::VectorXd g;
  ObjectiveValue cur = ev.value_grad(x, g);
  res.trace.initial_objective = cur.value;
  res.trace.history.push_back(cur.value);
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  int it = 0;
  std::string reason = "max_iterations";
  for (; it < p.max_iterations; ++it) {
    if (cur.fidelity >= p.fidelity_goal) {
      reason = "goal";
      break;
    }
    if (g.lpNorm<Eigen::Infinity>() <= p.gradient_tolerance) {
      reason = "gradient";
      break;
    }
    Eigen::VectorXd d = p.quasi_newton ? Eigen::VectorXd(hinv * g) : g;
    double slope = g.dot(d);
    if (!(slope > 0.0)) {
      hinv.setIdentity();
      d = g;
      slope = g.dot(d);
    }
    double step = p.quasi_newton ? 1.0 : p.initial_step;
    bool accepted = false;
    Eigen::VectorXd x_new, g_new;
    ObjectiveValue trial;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      trial = ev.value(x_new);
      if (std::isfinite(trial.value) && trial.value >= cur.value + p.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= p.shrink;
    }
    if (!accepted) {
      reason = "line_search";
      break;
    }
    trial = ev.value_grad(x_new, g_new);
    if (p.quasi_newton) {
      // BFGS on -value: s = dx, y = -(g_new - g).
      const Eigen::VectorXd s = x_new - x;
      const Eigen::VectorXd y = g - g_new;
      const double sy = s.dot(y);
      if (sy > 1e-14 * s.norm() * y.norm()) {
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = hinv * y;
        hinv += (rho * rho * y.dot(hy) + rho) * s * s.transpose() - rho * (hy * s.transpose() + s * hy.transpose());
      }
    }
    x = std::move(x_new);
    g = std::move(g_new);
    cur = trial;
    res.trace.history.push_back(cur.value);
  }
  if (it == p.max_iterations && cur.fidelity >= p.fidelity_goal) reason = "goal";
  res.trace.iterations = it;
  res.trace.final_objective = cur.value;
  res.trace.fidelity = cur.fidelity;
  res.trace.leakage = cur.leakage;
  res.trace.reached_goal = cur.fidelity >= p.fidelity_goal;
  res.trace.stop_reason = reason;
  res.x = std::move(x);
  return res;
}

// Higher fidelity wins, then the lower restart index.
bool better(const RestartResult& a, const RestartResult& b) {
  if (a.trace.final_objective != b.trace.final_objective) return a.trace.final_objective > b.trace.final_objective;
  return a.trace.restart < b.trace.restart;
}

void verify(const OptimizationProblem& p, OptimizationReport& rep) {
  const int k = rep.kmax;
  const SinePulse alpha(p.duration, std::vector<cplx>(rep.coeffs.begin(), rep.coeffs.begin() + k));
  PropagationOptions opts;
  opts.initial_steps = p.steps;
  auto fidelity_of = [&](const Operator& u) {
    if (p.kind == ObjectiveKind::Gate) return gate_fidelity(u, p.target_unitary, p.blockade_dim());
    const auto n = static_cast<int>(u.rows());
    return std::norm(pad(p.target_state, n).dot(u * pad(p.initial_state, n)));
  };
  auto run = [&](int dim) -> std::pair<double, HamiltonianSampler> {
    HamiltonianSampler h;
    if (p.penalized()) {
      const SinePulse lambda(p.duration, std::vector<cplx>(rep.coeffs.begin() + k, rep.coeffs.end()));
      const FockSpace space(dim);
      auto sys = std::make_shared<ControlSystem>(new_frame_control_system(p.config, space));
      h = [sys, alpha, lambda](double t) {
        const cplx a = alpha.value(t), l = lambda.value(t), sq = a * a;
        const double c[6] = {a.real(), a.imag(), sq.real(), sq.imag(), l.real(), l.imag()};
        return sys->at(c);
      };
    } else {
      auto sys = std::make_shared<ControlSystem>(full_blockade_control_system(p.config, FockSpace(dim)));
      h = [sys, alpha](double t) {
        const cplx a = alpha.value(t);
        const double c[2] = {a.real(), a.imag()};
        return sys->at(c);
      };
    }
    const PropagationResult pr = propagate_unitary(h, p.duration, opts);
    rep.verification_steps = pr.step_count;
    return {fidelity_of(*pr.final_unitary), h};
  };
  const int dim = p.penalized() ? rep.dim : p.config.r + 2;
  auto [fid, h] = run(dim);
  rep.verified_fidelity = fid;
  const Trajectory tr = propagate_trajectory(h, p.duration, rep.verification_steps);
  if (p.kind == ObjectiveKind::Gate) {
    rep.leakage = leakage(tr, p.config.r);
  } else {
    std::vector<StateVector> states;
    const StateVector psi0 = pad(p.initial_state, dim);
    for (const auto& u : tr.unitaries) states.push_back(u * psi0);
    rep.leakage = leakage(tr.times, states, p.config.r);
  }
  if (p.penalized()) {
    const long steps = rep.verification_steps;
    rep.truncation_change = std::abs(run(dim + 2).first - fid);
    rep.verification_steps = steps;
  }
}

OptimizationReport optimize_impl(const OptimizationProblem& p, std::uint64_t seed, bool parallel) {
  p.validate();
  const int dim = system_dim(p);
  std::vector<int> budgets{p.kmax};
  if (p.escalate_kmax) {
    for (int k = p.kmax + 2; k <= kMaxKmax; k += 2) budgets.push_back(k);
  }
  OptimizationReport rep;
  rep.dim = dim;
  std::optional<RestartResult> best;
  int best_kmax = p.kmax;
  for (int kmax : budgets) {
    const Evaluator ev(p, kmax, dim);
    std::optional<RestartResult> best_here;
    for (int start = 0; start < p.restarts; start += kBatch) {
      const int count = std::min(kBatch, p.restarts - start);
      std::vector<RestartResult> batch(count);
      std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
      for (int i = 0; i < count; ++i) {
        try {
          batch[i] = run_restart(p, ev, kmax, seed, start + i);
        } catch (...) {
#pragma omp critical(kerrblock_restart_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      bool hit = false;
      for (auto& r : batch) {
        hit = hit || r.trace.reached_goal;
        rep.trace.push_back(r.trace);
        if (!best_here || better(r, *best_here)) best_here = std::move(r);
      }
      rep.restarts_run += count;
      if (hit) break;
    }
    if (!best || better(*best_here, *best)) {
      best = std::move(best_here);
      best_kmax = kmax;
    }
    const double miss = 1.0 - best->trace.fidelity;
    if (best->trace.reached_goal || miss <= 10.0 * (1.0 - p.fidelity_goal)) break;
  }

  rep.kmax = best_kmax;
  rep.coeffs = to_complex(best->x);
  rep.objective = best->trace.final_objective;
  rep.fidelity = best->trace.fidelity;
  rep.leakage = best->trace.leakage;
  rep.iterations = best->trace.iterations;
  rep.converged = best->trace.reached_goal;
  const Evaluator ev(p, best_kmax, dim);
  Eigen::VectorXd g;
  ev.value_grad(best->x, g);
  rep.gradient_norm = g.lpNorm<Eigen::Infinity>();
  const auto fd = finite_difference_gradient(p, rep.coeffs);
  const auto adj = to_complex(g);
  for (std::size_t k = 0; k < fd.size(); ++k) {
    rep.gradient_check_residual = std::max(
        {rep.gradient_check_residual, std::abs(fd[k].real() - adj[k].real()), std::abs(fd[k].imag() - adj[k].imag())});
  }
  rep.verified_fidelity = rep.fidelity;
  if (p.verify) verify(p, rep);
  return rep;
}

}  // namespace

void OptimizationProblem::validate() const {
  config.validate();
  const int nb = blockade_dim();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ContractError("duration must be > 0");
  if (kmax < 1) throw ContractError("kmax must be >= 1");
  if (escalate_kmax && kmax > kMaxKmax) throw ContractError("kmax escalation starts above its cap of 16");
  if (restarts < 1) throw ContractError("restarts must be >= 1");
  if (max_iterations < 0) throw ContractError("max_iterations must be >= 0");
  if (!(fidelity_goal > 0.0 && fidelity_goal <= 1.0)) throw ContractError("fidelity goal must lie in (0, 1]");
  if (!(penalty >= 0.0)) throw ContractError("penalty must be >= 0");
  if (steps < 1) throw ContractError("steps must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0) || !(initial_step > 0.0) || !(armijo > 0.0 && armijo < 1.0)) {
    throw ContractError("line-search parameters out of range");
  }
  if (penalized() && penalized_dim != 0 && penalized_dim < config.r + 3) {
    throw ContractError("penalized_dim must be >= r + 3");
  }
  if (kind == ObjectiveKind::Gate) {
    if (target_unitary.rows() != nb || target_unitary.cols() != nb) {
      throw ContractError("target unitary must be (r+1) x (r+1)");
    }
    if (!target_unitary.allFinite() || unitarity_defect(target_unitary) > 1e-10) {
      throw ContractError("target is not unitary");
    }
  } else {
    for (const StateVector* v : {&initial_state, &target_state}) {
      if (v->size() < nb || !v->allFinite()) throw ContractError("states need at least r+1 finite entries");
      if (v->size() > nb && v->tail(v->size() - nb).norm() > 0.0) {
        throw ContractError("states must lie in the blockade subspace");
      }
      if (std::abs(v->norm() - 1.0) > 1e-10) throw ContractError("states must be normalized");
    }
  }
  if (initial_guess) harmonics_of(*this, initial_guess->size());
}

ObjectiveValue evaluate_objective(const OptimizationProblem& problem, const std::vector<cplx>& coeffs) {
  problem.validate();
  const Evaluator ev(problem, harmonics_of(problem, coeffs.size()), system_dim(problem));
  return ev.value(to_real(coeffs));
}

OptimizationReport evaluate_pulse(const OptimizationProblem& problem, const std::vector<cplx>& coeffs) {
  problem.validate();
  OptimizationReport rep;
  rep.kmax = harmonics_of(problem, coeffs.size());
  rep.dim = system_dim(problem);
  rep.coeffs = coeffs;
  const Evaluator ev(problem, rep.kmax, rep.dim);
  const ObjectiveValue v = ev.value(to_real(coeffs));
  rep.objective = v.value;
  rep.fidelity = v.fidelity;
  rep.leakage = v.leakage;
  rep.converged = v.fidelity >= problem.fidelity_goal;
  rep.verified_fidelity = rep.fidelity;
  if (problem.verify) verify(problem, rep);
  return rep;
}

std::vector<cplx> gradient(const OptimizationProblem& problem, const std::vector<cplx>& coeffs) {
  problem.validate();
  const Evaluator ev(problem, harmonics_of(problem, coeffs.size()), system_dim(problem));
  Eigen::VectorXd g;
  ev.value_grad(to_real(coeffs), g);
  return to_complex(g);
}

std::vector<cplx> finite_difference_gradient(const OptimizationProblem& problem, const std::vector<cplx>& coeffs,
                                             double h) {
  problem.validate();
  const Evaluator ev(problem, harmonics_of(problem, coeffs.size()), system_dim(problem));
  const Eigen::VectorXd x = to_real(coeffs);
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (ev.value(xp).value - ev.value(xm).value) / (2.0 * h);
  }
  return to_complex(g);
}

OptimizationReport optimize(const OptimizationProblem& problem, std::uint64_t seed) {
  return optimize_impl(problem, seed, true);
}

OptimizationReport optimize_serial(const OptimizationProblem& problem, std::uint64_t seed) {
  return optimize_impl(problem, seed, false);
}

Operator permutation_gate(int n) {
  if (n < 2) throw ContractError("permutation_gate: n must be >= 2");
  Operator u = Operator::Zero(n, n);
  for (int k = 0; k < n; ++k) u((k + n - 1) % n, k) = 1.0;
  return u;
}

Operator fourier_gate(int n) {
  if (n < 2) throw ContractError("fourier_gate: n must be >= 2");
  Operator u(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) u(j, k) = std::polar(1.0 / std::sqrt(n), 2.0 * std::numbers::pi * j * k / n);
  }
  return u;
}

}  // namespace kerrblock
