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
// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kerrblock/budget.hpp"
#include "kerrblock/errors.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/modulation_analysis.hpp"
#include "kerrblock/optimizer.hpp"
#include "kerrblock/pulse.hpp"

using namespace kerrblock;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

bool within(double x, double target, double rel) { return std::abs(x - target) <= rel * std::abs(target); }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<std::vector<double>> xs{x};
  return log_linear_fit(xs, y)[1];
}

Verdict gate_synthesis(const Operator& target, int kmax) {
  Verdict v;
  OptimizationProblem p;
  p.config.r = 2;
  p.target_unitary = target;
  p.duration = 0.2;
  p.kmax = kmax;
  p.restarts = 50;
  const OptimizationReport rep = optimize(p, 1);
  v.detail << "F=" << rep.fidelity << " verified F=" << rep.verified_fidelity << " restarts=" << rep.restarts_run;
  v.require(rep.verified_fidelity > 1.0 - 1e-4, "verified fidelity <= 1 - 1e-4");
  v.require(rep.restarts_run <= 50, "more than 50 restarts");
  return v;
}

Verdict c1_gate_permutation() { return gate_synthesis(permutation_gate(3), 5); }

Verdict c2_gate_fourier() { return gate_synthesis(fourier_gate(3), 8); }

Verdict c3_loss_coefficient() {
  Verdict v;
  const C1Fit f = fit_c1();
  v.detail << "eps/(kappa T) -> " << f.c1;
  v.require(within(f.c1, 0.375, 0.01), "outside 0.375 +- 1%");
  return v;
}

Verdict c4_trotter_scaling() {
  Verdict v;
  BlockadeConfig c;
  TrotterScanOptions o;
  o.profile = ProfileKind::SemiRotation;
  o.simulation.fixed_dim = 12;
  const std::vector<int> ms{20, 40, 80, 160};
  const std::vector<double> ts{0.1, 0.14, 0.2};
  const TrotterScan s = trotter_error_scan(std::nullopt, ms, ts, c, o);
  v.detail << "slope_M=" << s.slope_m << " slope_chiT=" << s.slope_chi_t << " c2=" << s.c2 << " (free fit "
           << s.c2_free << ", " << s.fit_points << " points)";
  v.require(std::abs(s.slope_m + 4.0) <= 0.15, "M slope outside -4 +- 0.15");
  v.require(std::abs(s.slope_chi_t + 6.0) <= 0.15, "chi T slope outside -6 +- 0.15");
  v.require(within(s.c2, 1.65, 0.25), "c2 outside 1.65 +- 25%");
  return v;
}

Verdict c5_profiles() {
  Verdict v;
  for (ProfileKind k : {ProfileKind::DoublePump, ProfileKind::SemiRotation, ProfileKind::TwoPoint}) {
    const ProfileReport r = check_profile(ModulationProfile(k, 1, 1.0));
    const double dm = std::abs(r.mean - 1.0), dsq = std::abs(r.mean_square);
    v.detail << to_string(k) << ": |avg f - 1|=" << dm << " |avg f^2|=" << dsq << " sym=" << r.symmetry_error << "; ";
    v.require(dm <= 1e-10 && dsq <= 1e-10 && r.symmetry_error <= 1e-12, std::string(to_string(k)));
  }
  return v;
}

Verdict c6_magnus_order() {
  Verdict v;
  BlockadeConfig c;
  const FockSpace s(5);
  const double alpha = 1.0;
  const ModulationProfile semi(ProfileKind::SemiRotation, 1, 1.0);
  const PeriodFamily symmetric = [&](double t, double p) { return h_dr_prime(alpha * semi.at_phase(t / p), c, s); };
  const PeriodFamily shifted = [&](double t, double p) {
    return h_dr_prime(alpha * profile_double_pump(t + p / 4, p), c, s);
  };
  const MagnusFit a = magnus_symmetry_order(symmetric);
  MagnusLadderOptions o;
  o.require_symmetric = false;
  const MagnusFit b = magnus_symmetry_order(shifted, o);
  bool rejected = false;
  try {
    magnus_symmetry_order(shifted);
  } catch (const ContractError&) {
    rejected = true;
  }
  v.detail << "symmetric slope=" << a.slope << " non-symmetric slope=" << b.slope;
  v.require(std::abs(a.slope - 3.0) <= 0.2, "symmetric slope outside 3 +- 0.2");
  v.require(std::abs(b.slope - 2.0) <= 0.2, "non-symmetric slope not near 2");
  v.require(rejected, "non-symmetric family accepted in strict mode");
  return v;
}

Verdict c7_controllability() {
  Verdict v;
  for (int r = 1; r <= 4; ++r) {
    BlockadeConfig c;
    c.r = r;
    const SchirmerReport rep = check_schirmer(c);
    const ProjectedHamiltonian ph = h_dr_projected(c);
    const std::vector<Operator> full{-kI * ph.drift, -kI * c.chi * ph.control_re, -kI * c.chi * ph.control_im};
    const std::vector<Operator> pair{full[1], full[2]};
    const int rank = lie_closure(full), pair_rank = lie_closure(pair);
    const int n = r + 1;
    v.detail << "r=" << r << ": " << (rep.passes ? "pass" : "fail") << " rank " << rank << "/" << pair_rank << "; ";
    if (r == 1) {
      v.require(!rep.passes && !rep.diagnostic.empty(), "r=1 not reported as a failure");
    } else {
      v.require(rep.passes, "Schirmer test fails at r=" + std::to_string(r));
      v.require(rank == n * n, "closure rank at r=" + std::to_string(r));
      v.require(pair_rank == n * n - 1, "pair closure rank at r=" + std::to_string(r));
    }
  }
  return v;
}

Verdict c8_blockade_exactness() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nrm(0.0, 1.0);
  std::uniform_int_distribution<int> rpick(1, 6);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    BlockadeConfig c;
    c.r = rpick(rng);
    c.chi = 3.0 * nrm(rng);
    c.delta0 = nrm(rng);
    const FockSpace s(c.r + 2 + k % 6);
    const cplx alpha(5.0 * nrm(rng), 5.0 * nrm(rng));
    const Operator h = h_dr(alpha, c, s);
    const Operator p = projector(s, c.r);
    worst = std::max(worst, max_abs((s.identity() - p) * h * p) / std::max(1.0, max_abs(h)));
  }
  v.detail << "max relative leak element=" << worst;
  v.require(worst <= 1e-15, "nonzero coupling out of the blockade subspace");
  return v;
}

struct PowerPoint {
  double kappa_i = 0.0, target = 0.0, P = 0.0, closed = 0.0, simulated = 0.0;
  int M = 0;
};

Verdict c9_power_scaling() {
  Verdict v;
  std::vector<PowerPoint> pts;
  for (double ki : {1.0, 4.0}) {
    for (double eps : {0.15, 0.1, 0.07, 0.05}) {
      PowerPoint q;
      q.kappa_i = ki;
      q.target = eps;
      pts.push_back(q);
    }
  }
  const long n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    PowerPoint& q = pts[i];
    BlockadeConfig c;
    c.kappa_i = q.kappa_i;
    q.P = power_for_eps_opt(c, q.target, Units::Dimensionless, true);
    const ErrorBudget b = optimize_budget(c, q.P, Units::Dimensionless, true);
    q.closed = *b.eps_opt;
    q.M = static_cast<int>(std::ceil(b.M));
    const double T = *b.T_opt;
    c.kappa_e = b.kappa_e;
    const ModulatedPulse pulse =
        modulate(PlateauPulse(T, pi / (2.0 * T)), ModulationProfile(ProfileKind::SemiRotation, q.M, T));
    Fock1Options o;
    o.lindblad = true;
    o.fixed_dim = 10;
    o.tolerance = 1e-7;
    q.simulated = simulate_modulated_fock1(pulse, c, o).infidelity;
  }
  for (double ki : {1.0, 4.0}) {
    std::vector<double> P, closed, sim;
    for (const auto& q : pts) {
      if (q.kappa_i != ki) continue;
      P.push_back(q.P);
      closed.push_back(q.closed);
      sim.push_back(q.simulated);
      v.require(within(q.simulated, q.closed, 0.25), "simulated vs closed form at kappa_i=" + std::to_string(ki));
    }
    const double sc = slope(P, closed), ss = slope(P, sim);
    v.detail << "kappa_i=" << ki << ": closed slope=" << sc << " simulated slope=" << ss << " ratios";
    for (std::size_t k = 0; k < sim.size(); ++k) v.detail << " " << sim[k] / closed[k];
    v.detail << "; ";
    v.require(std::abs(sc + 2.0 / 15.0) <= 1e-12, "closed-form slope");
    v.require(std::abs(ss + 2.0 / 15.0) <= 0.1 * 2.0 / 15.0, "simulated slope at kappa_i=" + std::to_string(ki));
  }
  return v;
}

Verdict c10_feasibility() {
  Verdict v;
  const auto cat = bundled_platforms();
  const auto check = [&](const std::string& what, double x, double target, double rel) {
    v.detail << what << "=" << x << " ";
    v.require(within(x, target, rel), what);
  };
  check("ITO eps_min", eps_min_bound(find_platform(cat, "ITO")), 1.5e-3, 0.03);
  check("GaAs eps_min", eps_min_bound(find_platform(cat, "GaAs")), 0.088, 0.03);
  check("Ge eps_min", eps_min_bound(find_platform(cat, "Ge")), 1.76, 0.03);
  const FeasibilityReport gaas = feasibility(find_platform(cat, "GaAs"), 0.9);
  check("GaAs alpha w_r^2/w_c^2", gaas.ratio_alpha_omega.value_or(0.0), 112, 0.1);
  v.require(gaas.rwa_violated, "GaAs RWA flag");
  const FeasibilityReport low = feasibility(find_platform(cat, "GaAs_kappa_i_div10"), 0.9);
  check("GaAs/10 w_r/w_c", low.ratio_omega_r.value_or(0.0), 1.5e-3, 0.1);
  check("GaAs/10 |chi| alpha^3/w_c", low.ratio_chi_alpha.value_or(0.0), 1.3e-3, 0.1);
  check("GaAs/10 alpha w_r^2/w_c^2", low.ratio_alpha_omega.value_or(0.0), 1.1e-4, 0.1);
  check("GaAs/10 P_in[W]", low.P_in_at_target.value_or(0.0), 4.3e2, 0.1);
  const FeasibilityReport nbn = feasibility(find_platform(cat, "NbN"), 0.9);
  const double p = nbn.P_in_at_target.value_or(0.0);
  v.detail << "NbN P_in[W]=" << p << " ";
  v.require(p >= 15e-9 && p <= 60e-9, "NbN power outside 30 nW x/ 2");
  check("NbN alpha", nbn.alpha_at_target.value_or(0.0), 15.0, 0.2);
  return v;
}

Verdict c11_eta_robustness() {
  Verdict v;
  const double kappa = 0.0124, c1 = 0.375, c2 = 1.65;
  const std::vector<double> etas{0.0, 5e-4, 1e-3, 2e-3};
  std::vector<double> drop;
  for (double eps0 : {1e-2, 1e-3}) {
    BlockadeConfig c;
    c.kappa_i = kappa;
    const double T = 14.0 * eps0 / (15.0 * c1 * kappa);
    const int M = static_cast<int>(std::ceil(std::pow(15.0 * c2 / (eps0 * std::pow(T, 6)), 0.25)));
    const ModulatedPulse pulse =
        modulate(PlateauPulse(T, pi / (2.0 * T)), ModulationProfile(ProfileKind::SemiRotation, M, T));
    std::vector<double> f(etas.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < static_cast<long>(etas.size()); ++k) {
      Fock1Options o;
      o.eta = etas[k];
      o.fixed_dim = 10;
      o.tolerance = 1e-7;
      f[k] = simulate_modulated_fock1(pulse, c, o).fidelity;
    }
    v.detail << "eps0=" << eps0 << " (M=" << M << "): F=";
    for (double x : f) v.detail << x << " ";
    for (std::size_t k = 1; k < f.size(); ++k) v.require(f[k] < f[k - 1], "fidelity not decreasing in eta");
    drop.push_back(f.front() - f.back());
  }
  v.require(drop[1] > drop[0], "degradation not steeper at the smaller eps0");
  return v;
}

Verdict c12_modulated_prep() {
  Verdict v;
  BlockadeConfig c;
  const int M = 80;
  for (double chi_t : {0.1, 0.14, 0.2}) {
    const double T = chi_t;
    const ModulatedPulse pulse =
        modulate(PlateauPulse(T, pi / (2.0 * T)), ModulationProfile(ProfileKind::SemiRotation, M, T));
    Fock1Options o;
    o.fixed_dim = 12;
    const double eps = simulate_modulated_fock1(pulse, c, o).infidelity;
    const double bound = 1.5 * 1.65 / (std::pow(M, 4) * std::pow(chi_t, 6));
    v.detail << "chiT=" << chi_t << ": eps=" << eps << " bound=" << bound << "; ";
    v.require(eps <= bound, "eps above 1.5 c2/(M^4 (chi T)^6) at chi T=" + std::to_string(chi_t));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gate synthesis, cyclic permutation r=2", c1_gate_permutation},
      {"gate synthesis, Fourier transform r=2", c2_gate_fourier},
      {"loss coefficient of the Fock-1 protocol", c3_loss_coefficient},
      {"Trotter error scaling and c2", c4_trotter_scaling},
      {"modulation profile constraints", c5_profiles},
      {"time-ordering error order of symmetric periods", c6_magnus_order},
      {"controllability of the blockade subspace", c7_controllability},
      {"blockade exactness", c8_blockade_exactness},
      {"power scaling of the optimized infidelity", c9_power_scaling},
      {"platform feasibility table", c10_feasibility},
      {"robustness to linear-drive miscalibration", c11_eta_robustness},
      {"modulated Fock-1 preparation", c12_modulated_prep},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
