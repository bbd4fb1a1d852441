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

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace kerrblock::quad {

/// Adaptive Gauss-Kronrod (7/15) integration of a real- or complex-valued
/// function on [a, b]. Bisects until each panel's Kronrod-Gauss difference
/// is below its share of `abs_tol`.
template <class F>
auto gauss_kronrod(F&& f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
  using R = decltype(f(a));
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  auto panel = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    R center = f(c);
    R kron = center * wk[7];
    R gauss = center * wg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * xk[j];
      const R pair = f(c - dx) + f(c + dx);
      kron += pair * wk[j];
      if (j % 2 == 1) gauss += pair * wg[j / 2];
    }
    return std::pair<R, R>{kron * h, gauss * h};
  };

  auto recurse = [&](auto&& self, double lo, double hi, double tol, int depth) -> R {
    auto [k, g] = panel(lo, hi);
    if (depth >= max_depth || std::abs(k - g) <= tol) return k;
    const double mid = 0.5 * (lo + hi);
    return self(self, lo, mid, 0.5 * tol, depth + 1) + self(self, mid, hi, 0.5 * tol, depth + 1);
  };
  return recurse(recurse, a, b, abs_tol, 0);
}

}  // namespace kerrblock::quad
