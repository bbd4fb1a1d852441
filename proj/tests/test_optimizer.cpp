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
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrblock/errors.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/optimizer.hpp"

using namespace kerrblock;
using std::numbers::pi;

namespace {

std::vector<cplx> random_coeffs(unsigned seed, int n, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<cplx> c(n);
  for (auto& x : c) x = {d(rng), d(rng)};
  return c;
}

OptimizationProblem gate_problem(int r, const Operator& target) {
  OptimizationProblem p;
  p.config.r = r;
  p.target_unitary = target;
  p.duration = 0.5;
  p.kmax = 4;
  p.steps = 400;
  return p;
}

OptimizationProblem fock1_problem() {
  OptimizationProblem p;
  p.kind = ObjectiveKind::State;
  p.config.r = 1;
  p.initial_state = FockSpace(2).basis(0);
  p.target_state = FockSpace(2).basis(1);
  p.duration = 1.0;
  p.kmax = 3;
  p.steps = 300;
  p.restarts = 4;
  return p;
}

double relative_gap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return num / std::max(den, 1e-12);
}

}  // namespace

TEST_CASE("target gates") {
  const Operator p3 = permutation_gate(3);
  Operator expect = Operator::Zero(3, 3);
  expect(2, 0) = 1.0;
  expect(0, 1) = 1.0;
  expect(1, 2) = 1.0;
  CHECK(max_abs(p3 - expect) == 0.0);
  for (int n = 2; n <= 5; ++n) {
    const Operator f = fourier_gate(n);
    CHECK(unitarity_defect(f) < 1e-14);
    CHECK(std::abs(f(1, 1) - std::exp(2.0 * pi * kI / double(n)) / std::sqrt(double(n))) < 1e-15);
    CHECK(unitarity_defect(permutation_gate(n)) == 0.0);
  }
}

TEST_CASE("adjoint gradient matches central differences") {
  SUBCASE("gate") {
    const OptimizationProblem p = gate_problem(2, fourier_gate(3));
    const auto c = random_coeffs(51, p.kmax);
    CHECK(relative_gap(gradient(p, c), finite_difference_gradient(p, c)) < 1e-5);
  }
  SUBCASE("state") {
    const OptimizationProblem p = fock1_problem();
    const auto c = random_coeffs(52, p.kmax);
    const auto g = gradient(p, c);
    CHECK(relative_gap(g, finite_difference_gradient(p, c)) < 1e-5);
    CHECK(std::abs(g[0].imag()) > 1e-6);
  }
  SUBCASE("detuned") {
    OptimizationProblem p = gate_problem(3, permutation_gate(4));
    p.config.delta0 = 0.4;
    const auto c = random_coeffs(53, p.kmax);
    CHECK(relative_gap(gradient(p, c), finite_difference_gradient(p, c)) < 1e-5);
  }
  SUBCASE("penalized") {
    OptimizationProblem p = gate_problem(1, permutation_gate(2));
    p.penalty = 0.5;
    p.kmax = 2;
    p.steps = 200;
    const auto c = random_coeffs(54, p.coefficient_count(p.kmax), 0.3);
    CHECK(relative_gap(gradient(p, c), finite_difference_gradient(p, c)) < 1e-5);
  }
}

TEST_CASE("objective is invariant under a global phase of the target") {
  OptimizationProblem p = gate_problem(2, fourier_gate(3));
  const auto c = random_coeffs(55, p.kmax);
  const double f0 = evaluate_objective(p, c).fidelity;
  p.target_unitary *= std::exp(kI * 1.234);
  CHECK(evaluate_objective(p, c).fidelity == doctest::Approx(f0).epsilon(1e-12));
}

TEST_CASE("zero pulse against the permutation target has zero fidelity") {
  const OptimizationProblem p = gate_problem(2, permutation_gate(3));
  CHECK(evaluate_objective(p, std::vector<cplx>(p.kmax)).fidelity < 1e-20);
}

TEST_CASE("drift target is reached without iterations") {
  BlockadeConfig c;
  c.r = 2;
  const double T = 0.5;
  const Operator drift = h_dr_projected(c).drift;
  OptimizationProblem p = gate_problem(2, matrix_exp(-kI * T * drift));
  p.duration = T;
  p.initial_guess = std::vector<cplx>(p.kmax);
  const OptimizationReport rep = optimize(p, 1);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(rep.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.verified_fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimizer is deterministic across threading and histories are monotone") {
  const OptimizationProblem p = fock1_problem();
  const OptimizationReport a = optimize(p, 7);
  const OptimizationReport b = optimize_serial(p, 7);
  const OptimizationReport c = optimize(p, 7);
  REQUIRE(a.coeffs.size() == b.coeffs.size());
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
    CHECK(a.coeffs[k] == b.coeffs[k]);
    CHECK(a.coeffs[k] == c.coeffs[k]);
  }
  CHECK(a.fidelity == b.fidelity);
  CHECK(a.converged);
  CHECK(a.verified_fidelity >= p.fidelity_goal - 1e-6);
  for (const auto& t : a.trace) {
    for (std::size_t k = 1; k < t.history.size(); ++k) CHECK(t.history[k] >= t.history[k - 1]);
  }
}

TEST_CASE("evaluate_pulse reproduces the optimizer's report") {
  const OptimizationProblem p = fock1_problem();
  const OptimizationReport a = optimize(p, 3);
  const OptimizationReport e = evaluate_pulse(p, a.coeffs);
  CHECK(e.fidelity == a.fidelity);
  CHECK(e.verified_fidelity == doctest::Approx(a.verified_fidelity).epsilon(1e-12));
}

TEST_CASE("problem validation") {
  OptimizationProblem p = gate_problem(2, fourier_gate(3));
  Operator bad = fourier_gate(3);
  bad(0, 0) += 0.1;
  p.target_unitary = bad;
  CHECK_THROWS_AS(p.validate(), ContractError);
  p.target_unitary = fourier_gate(2);
  CHECK_THROWS_AS(p.validate(), ContractError);
  OptimizationProblem s = fock1_problem();
  s.target_state = StateVector::Zero(2);
  CHECK_THROWS_AS(s.validate(), ContractError);
  s = fock1_problem();
  s.target_state = FockSpace(3).basis(2);
  CHECK_THROWS_AS(s.validate(), ContractError);
}
