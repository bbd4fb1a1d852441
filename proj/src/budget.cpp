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
#include "kerrblock/budget.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "kerrblock/errors.hpp"
#include "kerrblock/fock.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/propagate.hpp"

namespace kerrblock {

namespace {

constexpr double kPi = std::numbers::pi;

double c3_factor(const BudgetConstants& constants) {
  return constants.c3_factor > 0.0 ? constants.c3_factor : std::pow(kPi, 6) / 4.0;
}

double hbar_omega(const BlockadeConfig& config, Units units) {
  if (units == Units::SI) {
    if (!config.omega_c || !(*config.omega_c > 0.0)) throw ConfigError("SI budget requires omega_c > 0");
    return kHbar * *config.omega_c;
  }
  return config.omega_c.value_or(1.0);
}

double abs_chi(const BlockadeConfig& config) {
  config.validate();
  return std::abs(config.chi);
}

// kappa_e used by optimize_budget: given, or kappa_i / 6 when free.
double external_loss(const BlockadeConfig& config, bool free_kappa_e) {
  return free_kappa_e ? config.kappa_i / 6.0 : config.kappa_e;
}

// eps_opt = K P^(-2/15); returns K.
double eps_opt_prefactor(const BlockadeConfig& config, double kappa_e, Units units, const BudgetConstants& constants) {
  const double chi = abs_chi(config);
  const double c3 = power_constant(config, units, constants);
  const double kappa = config.kappa_i + kappa_e;
  if (!(kappa_e > 0.0)) throw UndefinedPowerError("optimized budget needs kappa_e > 0");
  const double k = 15.0 * std::pow(std::pow(constants.c1, 14) * constants.c2 * c3 * c3 / std::pow(14.0, 14), 1.0 / 15.0);
  return k * std::pow(kappa, 14.0 / 15.0) / (std::pow(chi, 2.0 / 3.0) * std::pow(kappa_e, 2.0 / 15.0));
}

}  // namespace

double power_constant(const BlockadeConfig& config, Units units, const BudgetConstants& constants) {
  return c3_factor(constants) * hbar_omega(config, units);
}

ErrorBudget total_error(const BlockadeConfig& config, double T, double M, const BudgetConstants& constants) {
  if (!(T > 0.0)) throw ContractError("total_error: T must be > 0");
  if (!(M >= 1.0)) throw ContractError("total_error: M must be >= 1");
  const double chi = abs_chi(config);
  ErrorBudget b;
  b.c1 = constants.c1;
  b.c2 = constants.c2;
  b.c3 = c3_factor(constants) * config.omega_c.value_or(1.0);
  b.T = T;
  b.M = M;
  b.kappa_e = config.kappa_e;
  b.eps_loss = constants.c1 * config.kappa() * T;
  b.eps_tt = constants.c2 / (std::pow(M, 4) * std::pow(chi * T, 6));
  b.eps_tot = b.eps_loss + b.eps_tt;
  return b;
}

double power_required(const BlockadeConfig& config, double T, double M, Units units, const BudgetConstants& constants) {
  if (!(T > 0.0)) throw ContractError("power_required: T must be > 0");
  const double chi = abs_chi(config);
  if (config.kappa_e == 0.0) throw UndefinedPowerError("power_required: kappa_e = 0 leaves the input power undefined");
  return power_constant(config, units, constants) * M * M / (config.kappa_e * chi * chi * std::pow(T, 4));
}

ErrorBudget optimize_budget(const BlockadeConfig& config, double P_in, Units units, bool free_kappa_e,
                            const BudgetConstants& constants) {
  if (!(P_in > 0.0)) throw ContractError("optimize_budget: P_in must be > 0");
  const double chi = abs_chi(config);
  const double kappa_e = external_loss(config, free_kappa_e);
  if (!(kappa_e > 0.0)) throw UndefinedPowerError("optimize_budget: kappa_e must be > 0");
  const double kappa = config.kappa_i + kappa_e;
  const double c3 = power_constant(config, units, constants);

  const double t_opt = std::pow(14.0 * constants.c2 * c3 * c3 / constants.c1, 1.0 / 15.0) /
                       (std::pow(P_in, 2.0 / 15.0) * std::pow(chi, 2.0 / 3.0) * std::pow(kappa_e, 2.0 / 15.0) *
                        std::pow(kappa, 1.0 / 15.0));
  const double m = std::sqrt(P_in * kappa_e * chi * chi * std::pow(t_opt, 4) / c3);

  BlockadeConfig used = config;
  used.kappa_e = kappa_e;
  ErrorBudget b = total_error(used, t_opt, std::max(1.0, m), constants);
  b.M = m;
  b.eps_tt = constants.c2 / (std::pow(m, 4) * std::pow(chi * t_opt, 6));
  b.eps_tot = b.eps_loss + b.eps_tt;
  b.c3 = c3;
  b.P_in = P_in;
  b.T_opt = t_opt;
  b.eps_opt = eps_opt_prefactor(config, kappa_e, units, constants) * std::pow(P_in, -2.0 / 15.0);
  b.kappa_e = kappa_e;
  return b;
}

double power_for_eps_opt(const BlockadeConfig& config, double eps, Units units, bool free_kappa_e,
                         const BudgetConstants& constants) {
  if (!(eps > 0.0)) throw ContractError("power_for_eps_opt: eps must be > 0");
  const double k = eps_opt_prefactor(config, external_loss(config, free_kappa_e), units, constants);
  return std::pow(k / eps, 7.5);
}

void PlatformSpec::validate() const {
  if (!(omega_c > 0.0) || chi == 0.0 || !std::isfinite(chi) || !(kappa_i > 0.0)) {
    throw ConfigError("platform '" + name + "': omega_c, |chi| and kappa_i must be > 0");
  }
}

BlockadeConfig PlatformSpec::config(double kappa_e) const {
  BlockadeConfig c;
  c.chi = chi;
  c.kappa_i = kappa_i;
  c.kappa_e = kappa_e;
  c.omega_c = omega_c;
  return c;
}

double eps_min_bound(const BlockadeConfig& config) {
  const double chi = abs_chi(config);
  if (!config.omega_c || !(*config.omega_c > 0.0) || !(config.kappa_i > 0.0)) {
    throw ConfigError("eps_min_bound: needs omega_c > 0 and kappa_i > 0");
  }
  const double q_i = *config.omega_c / config.kappa_i;
  return 3.0 * kPi * std::pow(config.kappa_i / chi, 2.0 / 3.0) / (16.0 * std::cbrt(q_i));
}

double eps_min_bound(const PlatformSpec& platform) {
  platform.validate();
  return eps_min_bound(platform.config());
}

PowerBound power_lower_bound(const BlockadeConfig& config, double eps_target, Units units,
                             const BudgetConstants& constants) {
  if (!(eps_target > 0.0 && eps_target < 1.0)) throw ContractError("power_lower_bound: eps must lie in (0, 1)");
  const double chi = abs_chi(config);
  const double pre = 4.0 * std::pow(3.0 * kPi * constants.c1, 6) / std::pow(5.0, 5);
  PowerBound out;
  out.kappa_e = config.kappa_i / 5.0;
  out.P_in = pre * hbar_omega(config, units) * std::pow(config.kappa_i, 5) /
             (std::pow(chi, 4) * std::pow(eps_target, 6));
  return out;
}

double eps_from_power_bound(const BlockadeConfig& config, double P_in, Units units, const BudgetConstants& constants) {
  if (!(P_in > 0.0)) throw ContractError("eps_from_power_bound: P_in must be > 0");
  const double chi = abs_chi(config);
  const double kappa_e = config.kappa_i / 5.0;
  return constants.c1 * (kPi / 2.0) * (kappa_e + config.kappa_i) * std::pow(kappa_e, -1.0 / 6.0) *
         std::pow(4.0 * hbar_omega(config, units) / (P_in * std::pow(chi, 4)), 1.0 / 6.0);
}

FeasibilityReport feasibility(const PlatformSpec& platform, double fidelity_target, const BudgetConstants& constants) {
  if (!(fidelity_target > 0.0 && fidelity_target < 1.0)) {
    throw ContractError("feasibility: fidelity target must lie in (0, 1)");
  }
  platform.validate();
  FeasibilityReport rep;
  rep.platform = platform.name;
  rep.fidelity_target = fidelity_target;
  rep.eps_target = 1.0 - fidelity_target;
  rep.eps_min = eps_min_bound(platform);
  rep.Q_i = platform.omega_c / platform.kappa_i;
  rep.above_floor = rep.eps_min < rep.eps_target;
  if (rep.eps_min >= 1.0) rep.notes.push_back("eps_min > 1: protocol ruled out by the RWA floor");
  if (!rep.above_floor) {
    rep.notes.push_back("target infidelity below eps_min");
    return rep;
  }

  const BlockadeConfig cfg = platform.config(platform.kappa_i / 6.0);
  const double chi = std::abs(platform.chi);
  const double p = power_for_eps_opt(cfg, rep.eps_target, Units::SI, false, constants);
  const ErrorBudget b = optimize_budget(cfg, p, Units::SI, false, constants);
  const int m = static_cast<int>(std::ceil(b.M - 1e-9));
  const double alpha = kPi / (2.0 * chi * *b.T_opt);
  const double omega_r = 2.0 * kPi * m / *b.T_opt;
  rep.P_in_at_target = p;
  rep.T_opt = b.T_opt;
  rep.M = std::max(1, m);
  rep.alpha_at_target = alpha;
  rep.omega_r = omega_r;
  rep.ratio_omega_r = omega_r / platform.omega_c;
  rep.ratio_alpha_omega = alpha * omega_r * omega_r / (platform.omega_c * platform.omega_c);
  rep.ratio_chi_alpha = chi * std::pow(alpha, 3) / platform.omega_c;
  rep.rwa_violated = *rep.ratio_omega_r >= 1.0 || *rep.ratio_alpha_omega >= 1.0 || *rep.ratio_chi_alpha >= 1.0;
  if (rep.rwa_violated) rep.notes.push_back("an RWA ratio is >= 1");
  rep.feasible = !rep.rwa_violated;
  return rep;
}

namespace {

std::vector<PlatformSpec> parse_platforms(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("platforms") || !doc["platforms"].is_array()) {
    throw ConfigError("platform catalog: expected an object with a 'platforms' array");
  }
  std::vector<PlatformSpec> out;
  for (const auto& row : doc["platforms"]) {
    for (const auto& [key, value] : row.items()) {
      if (key != "name" && key != "omega_c_hz" && key != "chi_hz" && key != "kappa_i_hz" && key != "note") {
        throw ConfigError("platform catalog: unknown key '" + key + "'");
      }
    }
    PlatformSpec p;
    try {
      p.name = row.at("name").get<std::string>();
      // Catalog stores ordinary frequencies; rates are 2 pi times these.
      p.omega_c = 2.0 * kPi * row.at("omega_c_hz").get<double>();
      p.chi = 2.0 * kPi * row.at("chi_hz").get<double>();
      p.kappa_i = 2.0 * kPi * row.at("kappa_i_hz").get<double>();
      p.note = row.value("note", "");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("platform catalog: ") + e.what());
    }
    p.validate();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<PlatformSpec> load_platforms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open platform catalog " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("platform catalog: ") + e.what());
  }
  return parse_platforms(doc);
}

std::vector<PlatformSpec> bundled_platforms() { return load_platforms(std::string(KERRBLOCK_DATA_DIR) + "/platforms.json"); }

const PlatformSpec& find_platform(const std::vector<PlatformSpec>& catalog, const std::string& name) {
  for (const auto& p : catalog) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown platform '" + name + "'");
}

double two_level_fock1_infidelity(double kappa_over_chi_alpha, double dissipator_scale) {
  BlockadeConfig cfg;
  const double alpha = 1.0;
  const double duration = kPi / (2.0 * cfg.chi * alpha);
  const ProjectedHamiltonian p = h_dr_projected(cfg);
  const Operator h = p.drift + cfg.chi * alpha * p.control_re;
  const FockSpace space(2);
  const StateVector v0 = space.basis(0);
  LindbladOptions opts;
  opts.method = LindbladMethod::Superoperator;
  opts.initial_steps = 16;
  opts.tolerance = 1e-12;
  const double kappa = kappa_over_chi_alpha * cfg.chi * alpha * dissipator_scale;
  const LindbladResult res = lindblad_propagate(v0 * v0.adjoint(), [&](double) { return h; }, kappa, duration, opts);
  return 1.0 - res.rho(1, 1).real();
}

C1Fit fit_c1(double dissipator_scale, std::vector<double> ratios) {
  if (ratios.size() < 2) throw ContractError("fit_c1: need at least two loss ratios");
  C1Fit fit;
  const double duration = kPi / 2.0;  // chi = alpha = 1
  Eigen::MatrixXd a(ratios.size(), 2);
  Eigen::VectorXd b(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0)) throw ContractError("fit_c1: ratios must be > 0");
    const double eps = two_level_fock1_infidelity(ratios[i], dissipator_scale);
    const double per = eps / (ratios[i] * duration);
    fit.ratios.push_back(ratios[i]);
    fit.eps_per_kappa_t.push_back(per);
    a(i, 0) = 1.0;
    a(i, 1) = ratios[i];
    b(i) = per;
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  fit.c1 = sol(0);
  return fit;
}

}  // namespace kerrblock
