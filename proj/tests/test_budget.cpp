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

#include "kerrblock/budget.hpp"
#include "kerrblock/errors.hpp"
#include "oracles.hpp"

using namespace kerrblock;
using std::numbers::pi;

namespace {

BlockadeConfig dimensionless(double chi, double kappa_i, double kappa_e) {
  BlockadeConfig c;
  c.chi = chi;
  c.kappa_i = kappa_i;
  c.kappa_e = kappa_e;
  return c;
}

// Total error along the power constraint: M follows from P_in at each T.
double eps_at_power(const BlockadeConfig& c, double P, double T, Units units) {
  const double c3 = power_constant(c, units);
  const double M = std::sqrt(P * c.kappa_e * c.chi * c.chi / c3) * T * T;
  const double chi = std::abs(c.chi);
  return 0.375 * c.kappa() * T + 1.65 / (std::pow(M, 4) * std::pow(chi * T, 6));
}

}  // namespace

TEST_CASE("total error arithmetic") {
  BlockadeConfig c = dimensionless(1.0, 0.05, 0.05);
  const ErrorBudget b = total_error(c, 1.0, 1e6);
  CHECK(b.eps_loss == doctest::Approx(0.0375));
  CHECK(b.eps_tot == doctest::Approx(0.0375).epsilon(1e-9));
  CHECK(b.eps_tot == doctest::Approx(b.eps_loss + b.eps_tt));
  const ErrorBudget m1 = total_error(c, 0.5, 10.0), m2 = total_error(c, 0.5, 20.0);
  CHECK(m1.eps_tt / m2.eps_tt == doctest::Approx(16.0));
  CHECK(m1.eps_tt == doctest::Approx(1.65 / (1e4 * std::pow(0.5, 6))));
  const BlockadeConfig lossless = dimensionless(1.0, 0.0, 0.0);
  CHECK(total_error(lossless, 1.0, 1e8).eps_tot < 1e-30);
  CHECK_THROWS_AS(total_error(c, 0.0, 10.0), ContractError);
  CHECK_THROWS_AS(total_error(c, 1.0, 0.5), ContractError);
}

TEST_CASE("total error monotonicity") {
  const BlockadeConfig c = dimensionless(-2.0, 0.1, 0.02);
  double prev_loss = 0.0, prev_tt = INFINITY;
  for (double T = 0.1; T < 5.0; T *= 1.3) {
    const ErrorBudget b = total_error(c, T, 20.0);
    CHECK(b.eps_loss > prev_loss);
    CHECK(b.eps_tt < prev_tt);
    prev_loss = b.eps_loss;
    prev_tt = b.eps_tt;
  }
  prev_tt = INFINITY;
  for (double M = 1.0; M < 1000.0; M *= 1.7) {
    const double tt = total_error(c, 0.7, M).eps_tt;
    CHECK(tt < prev_tt);
    prev_tt = tt;
  }
}

TEST_CASE("required power") {
  const BlockadeConfig c = dimensionless(1.0, 0.1, 0.05);
  const double p = power_required(c, 2.0, 10.0);
  CHECK(p == doctest::Approx(pi * pi * pi * pi * pi * pi / 4.0 * 100.0 / (0.05 * 16.0)));
  CHECK(power_required(c, 2.0, 20.0) / p == doctest::Approx(4.0));
  CHECK(p / power_required(c, 4.0, 10.0) == doctest::Approx(16.0));
  CHECK_THROWS_AS(power_required(dimensionless(1.0, 0.1, 0.0), 1.0, 1.0), UndefinedPowerError);
  CHECK_THROWS_AS(power_required(c, 1.0, 1.0, Units::SI), ConfigError);
}

TEST_CASE("optimized budget matches a golden-section search") {
  for (const BlockadeConfig& c : {dimensionless(1.0, 1e-3, 2e-4), dimensionless(-3.0, 0.02, 0.01)}) {
    for (double P : {1e4, 1e7, 1e10}) {
      const ErrorBudget b = optimize_budget(c, P);
      REQUIRE(b.T_opt);
      REQUIRE(b.eps_opt);
      const double t_ref = oracle::golden_section([&](double T) { return eps_at_power(c, P, T, Units::Dimensionless); },
                                                  *b.T_opt / 20, *b.T_opt * 20, 1e-10);
      CHECK(*b.T_opt == doctest::Approx(t_ref).epsilon(1e-6));
      CHECK(*b.eps_opt == doctest::Approx(eps_at_power(c, P, *b.T_opt, Units::Dimensionless)).epsilon(1e-10));
      // Stationarity: relative central difference of the total error.
      const double T = *b.T_opt, h = 1e-6 * T;
      const double d = (eps_at_power(c, P, T + h, Units::Dimensionless) - eps_at_power(c, P, T - h, Units::Dimensionless)) /
                       (2 * h);
      CHECK(std::abs(d * T / *b.eps_opt) < 1e-8);
      CHECK(b.M == doctest::Approx(std::sqrt(P * c.kappa_e * c.chi * c.chi / power_constant(c, Units::Dimensionless)) * T * T));
    }
  }
}

TEST_CASE("optimized budget scaling laws") {
  const BlockadeConfig c = dimensionless(1.0, 1e-3, 0.0);
  const double e1 = *optimize_budget(c, 1e6, Units::Dimensionless, true).eps_opt;
  const double e2 = *optimize_budget(c, 1e7, Units::Dimensionless, true).eps_opt;
  CHECK(e2 / e1 == doctest::Approx(std::pow(10.0, -2.0 / 15.0)).epsilon(1e-12));
  CHECK(optimize_budget(c, 1e6, Units::Dimensionless, true).kappa_e == doctest::Approx(1e-3 / 6));
  // Free kappa_e prefactor.
  const double c3 = power_constant(c, Units::Dimensionless);
  const double pref = 15.0 * std::pow(std::pow(0.375, 14) * 1.65 * c3 * c3, 1.0 / 15.0) /
                      (std::pow(2.0, 14.0 / 15.0) * std::pow(6.0, 0.8));
  CHECK(e1 == doctest::Approx(pref * std::pow(1e-3, 0.8) / std::pow(1e6, 2.0 / 15.0)).epsilon(1e-12));
  // kappa_i x10 at fixed eps_opt needs P_in x10^6.
  BlockadeConfig c10 = c;
  c10.kappa_i *= 10;
  const double ratio = power_for_eps_opt(c10, 0.05, Units::Dimensionless, true) /
                       power_for_eps_opt(c, 0.05, Units::Dimensionless, true);
  CHECK(ratio == doctest::Approx(1e6).epsilon(1e-9));
  const double P = power_for_eps_opt(c, 0.05, Units::Dimensionless, true);
  CHECK(*optimize_budget(c, P, Units::Dimensionless, true).eps_opt == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("budget is invariant under a common rescaling of rates") {
  BlockadeConfig c;
  c.chi = -2.0 * pi * 1e3;
  c.kappa_i = 2.0 * pi * 2e3;
  c.kappa_e = c.kappa_i / 6;
  c.omega_c = 2.0 * pi * 100e9;
  for (double s : {1e-3, 7.0, 1e4}) {
    BlockadeConfig d = c;
    d.chi *= s;
    d.kappa_i *= s;
    d.kappa_e *= s;
    *d.omega_c *= s;
    const double T = 3e-4;
    CHECK(total_error(d, T / s, 17.0).eps_tot == doctest::Approx(total_error(c, T, 17.0).eps_tot).epsilon(1e-12));
    // Power carries hbar omega_c times a rate squared.
    const double P = 3e-8;
    const ErrorBudget a = optimize_budget(c, P, Units::SI), b = optimize_budget(d, P * s * s, Units::SI);
    CHECK(*b.eps_opt == doctest::Approx(*a.eps_opt).epsilon(1e-12));
    CHECK(*b.T_opt * s == doctest::Approx(*a.T_opt).epsilon(1e-12));
    CHECK(b.M == doctest::Approx(a.M).epsilon(1e-12));
    CHECK(eps_min_bound(d) == doctest::Approx(eps_min_bound(c)).epsilon(1e-12));
    CHECK(eps_from_power_bound(d, P * s * s, Units::SI) ==
          doctest::Approx(eps_from_power_bound(c, P, Units::SI)).epsilon(1e-12));
  }
}

TEST_CASE("power lower bound") {
  const BlockadeConfig c = dimensionless(1.0, 1e-3, 0.0);
  const PowerBound b = power_lower_bound(c, 0.1);
  CHECK(b.kappa_e == doctest::Approx(2e-4));
  CHECK(power_lower_bound(c, 0.05).P_in / b.P_in == doctest::Approx(64.0));
  BlockadeConfig c2 = c;
  c2.kappa_i *= 2;
  CHECK(power_lower_bound(c2, 0.1).P_in / b.P_in == doctest::Approx(32.0));
  for (double eps : {0.5, 0.1, 1e-3}) {
    CHECK(eps_from_power_bound(c, power_lower_bound(c, eps).P_in) == doctest::Approx(eps).epsilon(1e-10));
  }
  const double expect = 4.0 * std::pow(3.0 * pi * 0.375, 6) / std::pow(5.0, 5) * std::pow(1e-3, 5) / std::pow(0.1, 6);
  CHECK(b.P_in == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(power_lower_bound(c, 1.5), ContractError);
}

TEST_CASE("RWA floor") {
  PlatformSpec p{"x", 2 * pi * 100e12, -2 * pi * 1e6, 2 * pi * 1e8, ""};
  const double q = p.omega_c / p.kappa_i;
  CHECK(eps_min_bound(p) == doctest::Approx(3 * pi * std::pow(100.0, 2.0 / 3.0) / (16 * std::cbrt(q))).epsilon(1e-13));
  const auto cat = bundled_platforms();
  CHECK(eps_min_bound(find_platform(cat, "GaAs")) == doctest::Approx(0.088).epsilon(0.03));
  CHECK(eps_min_bound(find_platform(cat, "Ge")) == doctest::Approx(1.76).epsilon(0.03));
  CHECK(eps_min_bound(find_platform(cat, "ring_mittal")) == doctest::Approx(102).epsilon(0.03));
  CHECK_THROWS_AS(find_platform(cat, "nope"), ConfigError);
}

TEST_CASE("feasibility reports") {
  const auto cat = bundled_platforms();
  CHECK(cat.size() == 8);
  const FeasibilityReport ge = feasibility(find_platform(cat, "Ge"), 0.9);
  CHECK_FALSE(ge.feasible);
  CHECK_FALSE(ge.above_floor);
  const FeasibilityReport gaas = feasibility(find_platform(cat, "GaAs"), 0.9);
  REQUIRE(gaas.ratio_alpha_omega);
  CHECK(gaas.rwa_violated);
  CHECK(*gaas.ratio_alpha_omega == doctest::Approx(112).epsilon(0.05));
  const FeasibilityReport low = feasibility(find_platform(cat, "GaAs_kappa_i_div10"), 0.9);
  REQUIRE(low.P_in_at_target);
  CHECK(low.feasible);
  CHECK(*low.P_in_at_target == doctest::Approx(4.3e2).epsilon(0.1));
  CHECK(*low.ratio_omega_r == doctest::Approx(1.5e-3).epsilon(0.1));
  CHECK(*low.ratio_chi_alpha == doctest::Approx(1.3e-3).epsilon(0.1));
  CHECK(*low.ratio_alpha_omega == doctest::Approx(1.1e-4).epsilon(0.1));
  // Internal consistency of the reported point.
  const PlatformSpec& spec = find_platform(cat, "GaAs_kappa_i_div10");
  CHECK(*low.alpha_at_target == doctest::Approx(pi / (2 * std::abs(spec.chi) * *low.T_opt)));
  CHECK(*low.omega_r == doctest::Approx(2 * pi * *low.M / *low.T_opt));
  CHECK(*low.ratio_omega_r == doctest::Approx(*low.omega_r / spec.omega_c));

  const FeasibilityReport nbn = feasibility(find_platform(cat, "NbN"), 0.9);
  REQUIRE(nbn.P_in_at_target);
  CHECK(*nbn.P_in_at_target > 15e-9);
  CHECK(*nbn.P_in_at_target < 60e-9);
  CHECK(*nbn.alpha_at_target == doctest::Approx(15.0).epsilon(0.2));
  CHECK_THROWS_AS(feasibility(spec, 1.0), ContractError);
}

TEST_CASE("platform catalog parsing") {
  CHECK_THROWS_AS(load_platforms("/nonexistent/platforms.json"), Error);
  PlatformSpec bad{"bad", 1.0, 0.0, 1.0, ""};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const BlockadeConfig c = find_platform(bundled_platforms(), "NbN").config(5.0);
  CHECK(c.kappa_e == 5.0);
  CHECK(c.chi == doctest::Approx(-2 * pi * 1e3));
  REQUIRE(c.omega_c);
}

TEST_CASE("loss prefactor fit") {
  const C1Fit f = fit_c1();
  CHECK(f.c1 == doctest::Approx(0.375).epsilon(0.01));
  CHECK(f.ratios.size() == 3);
  const C1Fit g = fit_c1(2.0);
  CHECK(g.c1 / f.c1 == doctest::Approx(2.0).epsilon(0.01));
  CHECK(two_level_fock1_infidelity(0.0) < 1e-10);
}
