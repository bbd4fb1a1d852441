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
#include "kerrblock/io.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>

#include "kerrblock/errors.hpp"

namespace kerrblock {

namespace {

template <class T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ContractError("csv row width does not match the header");
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
}

void write_drive_program_csv(std::ostream& out, const DriveProgram& p) {
  std::vector<std::vector<double>> rows;
  rows.reserve(p.times.size());
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    rows.push_back({p.times[k], p.lambda1[k].real(), p.lambda1[k].imag(), p.lambda2[k].real(),
                    p.lambda2[k].imag(), p.phase[k]});
  }
  write_csv(out, {"t", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2", "theta"}, rows);
}

json drive_program_json(const DriveProgram& p) {
  json l1 = json::array(), l2 = json::array();
  for (auto z : p.lambda1) l1.push_back(complex_json(z));
  for (auto z : p.lambda2) l2.push_back(complex_json(z));
  return {{"t", p.times}, {"lambda1", l1}, {"lambda2", l2}, {"theta", p.phase}};
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("expected a complex number as [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<cplx> complex_vector_from_json(const json& v) {
  if (!v.is_array()) throw ConfigError("expected an array of complex numbers");
  std::vector<cplx> out;
  for (const auto& z : v) out.push_back(complex_from_json(z));
  return out;
}

json operator_json(const Operator& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Operator operator_from_json(const json& v) {
  if (!v.is_array() || v.empty()) throw ConfigError("expected a non-empty matrix");
  const auto n = static_cast<Eigen::Index>(v.size());
  Operator m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex_from_json(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

json config_json(const BlockadeConfig& c) {
  return {{"chi", c.chi},         {"delta0", c.delta0},   {"r", c.r},
          {"kappa_i", c.kappa_i}, {"kappa_e", c.kappa_e}, {"omega_c", optional_json(c.omega_c)}};
}

json report_json(const OptimizationReport& r) {
  json coeffs = json::array();
  for (auto z : r.coeffs) coeffs.push_back(complex_json(z));
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"restart", t.restart},
                     {"kmax", t.kmax},
                     {"initial_objective", t.initial_objective},
                     {"final_objective", t.final_objective},
                     {"fidelity", t.fidelity},
                     {"leakage", t.leakage},
                     {"iterations", t.iterations},
                     {"reached_goal", t.reached_goal},
                     {"stop_reason", t.stop_reason},
                     {"history", t.history}});
  }
  return {{"coeffs", coeffs},
          {"kmax", r.kmax},
          {"objective", r.objective},
          {"fidelity", r.fidelity},
          {"verified_fidelity", r.verified_fidelity},
          {"leakage", r.leakage},
          {"verification_steps", r.verification_steps},
          {"truncation_change", r.truncation_change},
          {"dim", r.dim},
          {"iterations", r.iterations},
          {"restarts_run", r.restarts_run},
          {"converged", r.converged},
          {"gradient_norm", r.gradient_norm},
          {"gradient_check_residual", r.gradient_check_residual},
          {"trace", trace}};
}

json report_json(const ErrorBudget& b) {
  return {{"c1", b.c1},           {"c2", b.c2},
          {"c3", b.c3},           {"T", b.T},
          {"M", b.M},             {"P_in", optional_json(b.P_in)},
          {"eps_loss", b.eps_loss}, {"eps_tt", b.eps_tt},
          {"eps_tot", b.eps_tot}, {"T_opt", optional_json(b.T_opt)},
          {"eps_opt", optional_json(b.eps_opt)}, {"kappa_e", b.kappa_e}};
}

json report_json(const FeasibilityReport& r) {
  return {{"platform", r.platform},
          {"fidelity_target", r.fidelity_target},
          {"eps_target", r.eps_target},
          {"eps_min", r.eps_min},
          {"Q_i", r.Q_i},
          {"above_floor", r.above_floor},
          {"P_in_at_target", optional_json(r.P_in_at_target)},
          {"T_opt", optional_json(r.T_opt)},
          {"M", optional_json(r.M)},
          {"alpha_at_target", optional_json(r.alpha_at_target)},
          {"omega_r", optional_json(r.omega_r)},
          {"ratio_omega_r_over_omega_c", optional_json(r.ratio_omega_r)},
          {"ratio_alpha_omega_r2_over_omega_c2", optional_json(r.ratio_alpha_omega)},
          {"ratio_chi_alpha3_over_omega_c", optional_json(r.ratio_chi_alpha)},
          {"rwa_violated", r.rwa_violated},
          {"feasible", r.feasible},
          {"notes", r.notes}};
}

json report_json(const SchirmerReport& r) {
  return {{"passes", r.passes},
          {"lowest_gap_branch", r.lowest_gap_branch},
          {"highest_gap_branch", r.highest_gap_branch},
          {"trace_nonzero", r.trace_nonzero},
          {"energies", r.energies},
          {"gaps", r.gaps},
          {"group", r.group},
          {"diagnostic", r.diagnostic}};
}

json report_json(const Fock1Result& r) {
  return {{"fidelity", r.fidelity},
          {"infidelity", r.infidelity},
          {"dim", r.dim},
          {"dim_converged", r.dim_converged},
          {"steps", r.steps}};
}

json report_json(const TrotterScan& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back({{"M", p.periods},
                      {"chi_T", p.chi_t},
                      {"alpha", p.alpha},
                      {"eps_tt", p.eps_tt},
                      {"dim", p.dim},
                      {"dim_converged", p.dim_converged},
                      {"steps", p.steps},
                      {"in_fit", p.in_fit}});
  }
  return {{"slope_M", s.slope_m},   {"slope_chi_T", s.slope_chi_t},   {"c2", s.c2},
          {"c2_free", s.c2_free},   {"fit_points", s.fit_points},     {"corner_points", s.corner_points},
          {"points", points}};
}

void write_trotter_scan_csv(std::ostream& out, const TrotterScan& s) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : s.points) {
    rows.push_back({static_cast<double>(p.periods), p.chi_t, p.alpha, p.eps_tt, static_cast<double>(p.dim),
                    p.dim_converged ? 1.0 : 0.0, static_cast<double>(p.steps), p.in_fit ? 1.0 : 0.0});
  }
  write_csv(out, {"M", "chi_T", "alpha", "eps_tt", "dim", "dim_converged", "steps", "in_fit"}, rows);
}

void write_feasibility_table(std::ostream& out, const std::vector<FeasibilityReport>& reports) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", *v);
    return std::string(buf);
  };
  const auto flags = out.flags();
  out << std::left << std::setw(20) << "platform" << std::right << std::setw(11) << "eps_min" << std::setw(11)
      << "P_in[W]" << std::setw(11) << "wr/wc" << std::setw(13) << "a wr^2/wc^2" << std::setw(13) << "chi a^3/wc"
      << std::setw(10) << "feasible" << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(20) << r.platform << std::right << std::setw(11) << cell(r.eps_min)
        << std::setw(11) << cell(r.P_in_at_target) << std::setw(11) << cell(r.ratio_omega_r) << std::setw(13)
        << cell(r.ratio_alpha_omega) << std::setw(13) << cell(r.ratio_chi_alpha) << std::setw(10)
        << (r.feasible ? "yes" : (r.above_floor ? "rwa" : "no")) << '\n';
  }
  out.flags(flags);
}

}  // namespace kerrblock
