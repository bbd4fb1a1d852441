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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kerrblock/errors.hpp"
#include "kerrblock/pulse.hpp"

using namespace kerrblock;
using std::numbers::pi;

namespace {

// Composite Simpson on each smooth panel of one period.
template <class F>
cplx period_average(const ModulationProfile& p, F&& g) {
  std::vector<double> edges{0.0};
  for (double b : p.breakpoints()) edges.push_back(b);
  edges.push_back(1.0);
  cplx total = 0.0;
  constexpr int n = 4000;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1], h = (b - a) / n;
    // Evaluate just inside the panel so jump discontinuities take the panel's own limit.
    const auto at = [&](double s) { return g(p.at_phase(std::clamp(s, a + 1e-15, b - 1e-15))); };
    cplx sum = at(a) + at(b);
    for (int j = 1; j < n; ++j) sum += (j % 2 ? 4.0 : 2.0) * at(a + j * h);
    total += sum * (h / 3.0);
  }
  return total;
}

}  // namespace

TEST_CASE("sine ansatz") {
  const SinePulse p(2.0, {cplx(1.0, 0.5), cplx(-0.3, 0.0), cplx(0.0, 0.2)});
  CHECK(std::abs(p.value(0.0)) < 1e-15);
  CHECK(std::abs(p.value(2.0)) < 1e-14);
  const double t = 0.37;
  const cplx expect = cplx(1.0, 0.5) * std::sin(pi * t / 2) - 0.3 * std::sin(2 * pi * t / 2) +
                      cplx(0.0, 0.2) * std::sin(3 * pi * t / 2);
  CHECK(std::abs(p.value(t) - expect) < 1e-15);
  const double h = 1e-5;
  CHECK(std::abs(p.derivative(t) - (p.value(t + h) - p.value(t - h)) / (2 * h)) < 1e-8);
  const auto b = p.basis(t);
  REQUIRE(b.size() == 3);
  CHECK(b[1] == doctest::Approx(std::sin(pi * t)));
  CHECK_THROWS_AS(eval_pulse(p, 2.1), DomainError);
  CHECK_THROWS_AS(eval_pulse(p, -0.1), DomainError);
  CHECK_NOTHROW(eval_pulse(p, 2.0));
  CHECK_THROWS_AS(SinePulse(0.0, {1.0}), ContractError);
  CHECK_THROWS_AS(SinePulse(1.0, {}), ContractError);
}

TEST_CASE("plateau pulse") {
  const PlateauPulse flat(1.0, cplx(0.5, 0.1));
  CHECK(flat.value(0.0) == cplx(0.5, 0.1));
  CHECK(flat.derivative(0.3) == cplx(0.0));
  const PlateauPulse ramped(1.0, 2.0, 0.2);
  CHECK(std::abs(ramped.value(0.0)) < 1e-15);
  CHECK(std::abs(ramped.value(0.1) - 1.0) < 1e-14);
  CHECK(ramped.value(0.5) == cplx(2.0));
  const double h = 1e-6;
  for (double t : {0.05, 0.13, 0.85, 0.97}) {
    CHECK(std::abs(ramped.derivative(t) - (ramped.value(t + h) - ramped.value(t - h)) / (2 * h)) < 1e-6);
  }
  CHECK_THROWS_AS(PlateauPulse(1.0, 1.0, 0.6), ContractError);
}

TEST_CASE("built-in profiles satisfy their constraints") {
  for (ProfileKind k : {ProfileKind::DoublePump, ProfileKind::SemiRotation, ProfileKind::TwoPoint}) {
    const ModulationProfile p(k, 7, 1.3);
    const ProfileReport rep = check_profile(p);
    CHECK(rep.passed);
    CHECK(std::abs(rep.mean - 1.0) < 1e-10);
    CHECK(std::abs(rep.mean_square) < 1e-10);
    CHECK(rep.symmetry_error <= 1e-12);
    const cplx mean = period_average(p, [](cplx f) { return f; });
    const cplx mean_sq = period_average(p, [](cplx f) { return f * f; });
    CHECK(std::abs(mean - 1.0) < 1e-10);
    CHECK(std::abs(mean_sq) < 1e-10);
    CHECK(std::abs(rep.mean - mean) < 1e-10);
  }
}

TEST_CASE("profile values") {
  CHECK(std::abs(profile_double_pump(0.0, 1.0) - cplx(1.0, std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(profile_two_point(0.1, 1.0) - cplx(1.0, -1.0)) < 1e-15);
  CHECK(std::abs(profile_two_point(0.5, 1.0) - cplx(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(profile_semi_rotation(0.5, 1.0) - kI * pi / 2.0) < 1e-15);
  for (double s = 0.0; s < 1.0; s += 0.0137) CHECK(std::abs(profile_semi_rotation(s, 1.0)) == doctest::Approx(pi / 2));
  const ModulationProfile p(ProfileKind::SemiRotation, 10, 5.0);
  CHECK(p.period() == doctest::Approx(0.5));
  CHECK(p.omega_r() == doctest::Approx(2 * pi * 2.0));
  CHECK(std::abs(p.value(0.6) - p.at_phase(0.2)) < 1e-12);
  CHECK(std::abs(p.value(4.95) - profile_semi_rotation(4.95, 0.5)) < 1e-12);
}

TEST_CASE("profile derivatives match finite differences away from breakpoints") {
  const double h = 1e-6;
  for (ProfileKind k : {ProfileKind::DoublePump, ProfileKind::SemiRotation, ProfileKind::TwoPoint}) {
    const ModulationProfile p(k, 3, 1.0);
    for (double s : {0.1, 0.2, 0.4, 0.6, 0.9}) {
      const cplx fd = (p.at_phase(s + h) - p.at_phase(s - h)) / (2 * h);
      CHECK(std::abs(p.derivative_at_phase(s) - fd) < 1e-6);
    }
    const double t = 0.21;
    const cplx fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    CHECK(std::abs(p.derivative(t) - fd) < 1e-5);
  }
}

TEST_CASE("profile names") {
  for (ProfileKind k : {ProfileKind::DoublePump, ProfileKind::SemiRotation, ProfileKind::TwoPoint}) {
    CHECK(parse_profile_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_profile_kind("square"), ConfigError);
  CHECK_THROWS_AS(ModulationProfile(ProfileKind::DoublePump, 0, 1.0), ContractError);
  CHECK_THROWS_AS(ModulationProfile(ProfileKind::Custom, 2, 1.0), ContractError);
}

TEST_CASE("custom profiles") {
  const int n = 64;
  std::vector<cplx> good(n), bad(n, 1.0);
  for (int k = 0; k < n; ++k) good[k] = profile_double_pump(static_cast<double>(k) / n, 1.0);
  const ModulationProfile p = ModulationProfile::custom(good, 4, 2.0);
  CHECK(p.kind() == ProfileKind::Custom);
  CHECK(std::abs(p.at_phase(0.25) - good[16]) < 1e-14);
  // Linear interpolation of a smooth profile: error O(h^2).
  CHECK(std::abs(p.at_phase(0.3) - profile_double_pump(0.3, 1.0)) < 5e-3);
  const ProfileReport rep = check_profile(p);
  CHECK(std::abs(rep.mean - 1.0) < 1e-10);
  CHECK_FALSE(check_profile(ModulationProfile::custom(bad, 4, 2.0)).passed);
  CHECK_THROWS_AS(modulate(PlateauPulse(2.0, 1.0), ModulationProfile::custom(bad, 4, 2.0)), ContractError);
  CHECK_THROWS_AS(ModulationProfile::custom({1.0, 1.0}, 1, 1.0), ContractError);
}

TEST_CASE("modulated pulse") {
  const double T = 2.0;
  const SinePulse env(T, {cplx(0.7, 0.2), cplx(0.1, -0.1)});
  const ModulatedPulse m = modulate(env, ModulationProfile(ProfileKind::DoublePump, 5, T));
  const double h = 1e-6;
  for (double t : {0.1, 0.77, 1.5}) {
    CHECK(std::abs(m.value(t) - env.value(t) * profile_double_pump(t, T / 5)) < 1e-14);
    CHECK(std::abs(m.derivative(t) - (m.value(t + h) - m.value(t - h)) / (2 * h)) < 1e-6);
  }
  CHECK_THROWS_AS(modulate(env, ModulationProfile(ProfileKind::DoublePump, 5, 3.0)), ContractError);
}

TEST_CASE("non-symmetric profile is rejected") {
  // f(s) = 1 + sqrt(2) i exp(2 pi i s) lacks reflection symmetry.
  const int n = 256;
  std::vector<cplx> s(n);
  for (int k = 0; k < n; ++k) s[k] = 1.0 + std::sqrt(2.0) * kI * std::exp(2.0 * pi * kI * (double(k) / n));
  const ProfileReport rep = check_profile(ModulationProfile::custom(s, 2, 1.0));
  CHECK(rep.symmetry_error > 1e-3);
  CHECK_FALSE(rep.passed);
}
