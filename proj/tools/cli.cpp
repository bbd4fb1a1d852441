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
#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_schema.hpp"
#include "kerrblock/budget.hpp"
#include "kerrblock/errors.hpp"
#include "kerrblock/fock.hpp"
#include "kerrblock/frames.hpp"
#include "kerrblock/io.hpp"
#include "kerrblock/modulation_analysis.hpp"
#include "kerrblock/optimizer.hpp"
#include "kerrblock/propagate.hpp"
#include "kerrblock/pulse.hpp"

namespace kerrblock::cli {

namespace {

namespace fs = std::filesystem;
using std::numbers::pi;

struct Flags {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<double> eta;
  std::optional<std::string> profile;
  bool si = false;
};

struct RunContext {
  fs::path dir;
  std::string format = "csv";
  std::ostream& out;

  void write_json(const std::string& name, const json& doc) const {
    std::ofstream f(dir / name);
    f << doc.dump(2) << '\n';
    if (!f) throw Error("cannot write " + (dir / name).string());
  }

  template <class Fn>
  void write_text(const std::string& name, Fn&& fn) const {
    std::ofstream f(dir / name);
    fn(f);
    if (!f) throw Error("cannot write " + (dir / name).string());
  }

  void write_table(const std::string& stem, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) const {
    if (format == "csv") {
      write_text(stem + ".csv", [&](std::ostream& f) { write_csv(f, header, rows); });
    } else {
      write_json(stem + ".json", json{{"columns", header}, {"rows", rows}});
    }
  }

  void write_drive(const std::string& stem, const DriveProgram& program) const {
    if (format == "csv") {
      write_text(stem + ".csv", [&](std::ostream& f) { write_drive_program_csv(f, program); });
    } else {
      write_json(stem + ".json", drive_program_json(program));
    }
  }
};

/// A validated command: everything that can be rejected has been checked
/// before `execute` runs, so rejections leave no files behind.
using Runner = std::function<int(const RunContext&)>;

template <class T>
T value_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

const json& block(const json& config, const char* key) {
  static const json empty = json::object();
  return config.contains(key) ? config.at(key) : empty;
}

BlockadeConfig parse_blockade(const json& config) {
  const json& b = block(config, "blockade");
  BlockadeConfig c;
  c.chi = value_or(b, "chi", 1.0);
  c.delta0 = value_or(b, "delta0", 0.0);
  c.r = value_or(b, "r", 1);
  c.kappa_i = value_or(b, "kappa_i", 0.0);
  c.kappa_e = value_or(b, "kappa_e", 0.0);
  if (b.contains("omega_c")) c.omega_c = b.at("omega_c").get<double>();
  c.validate();
  return c;
}

ProfileKind profile_of(const json& task, ProfileKind fallback) {
  return task.contains("profile") ? parse_profile_kind(task.at("profile").get<std::string>()) : fallback;
}

StateVector state_from_json(const json& v) {
  const auto z = complex_vector_from_json(v);
  StateVector s(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) s(static_cast<Eigen::Index>(i)) = z[i];
  return s;
}

// ---------------------------------------------------------------- synthesize

struct SynthesisTask {
  OptimizationProblem problem;
  std::optional<ProfileKind> profile;
  int periods = 80;
  int samples = 2001;
};

SynthesisTask parse_synthesis(const json& task, const BlockadeConfig& cfg) {
  SynthesisTask s;
  OptimizationProblem& p = s.problem;
  p.config = cfg;
  const std::string kind = value_or<std::string>(task, "kind", "gate");
  p.kind = kind == "gate" ? ObjectiveKind::Gate : ObjectiveKind::State;
  p.duration = value_or(task, "duration", 0.2);
  p.kmax = value_or(task, "kmax", 5);
  p.escalate_kmax = value_or(task, "escalate_kmax", false);
  p.penalty = value_or(task, "penalty", 0.0);
  p.penalized_dim = value_or(task, "penalized_dim", 0);
  p.restarts = value_or(task, "restarts", 10);
  p.max_iterations = value_or(task, "max_iterations", 500);
  p.fidelity_goal = value_or(task, "fidelity_goal", 1.0 - 1e-5);
  p.steps = value_or(task, "steps", 1000L);
  p.quasi_newton = value_or(task, "quasi_newton", true);
  if (task.contains("initial_guess")) p.initial_guess = complex_vector_from_json(task.at("initial_guess"));
  const int n = cfg.r + 1;
  if (p.kind == ObjectiveKind::Gate) {
    const std::string target = value_or<std::string>(task, "target", "permutation");
    if (target == "permutation") {
      p.target_unitary = permutation_gate(n);
    } else if (target == "fourier") {
      p.target_unitary = fourier_gate(n);
    } else if (target == "drift") {
      p.target_unitary = matrix_exp(-kI * p.duration * h_dr_projected(cfg).drift);
    } else {
      if (!task.contains("target_unitary")) throw ConfigError("target 'custom' needs target_unitary");
      p.target_unitary = operator_from_json(task.at("target_unitary"));
    }
  } else {
    if (!task.contains("target_state")) throw ConfigError("state synthesis needs target_state");
    p.target_state = state_from_json(task.at("target_state"));
    if (task.contains("initial_state")) {
      p.initial_state = state_from_json(task.at("initial_state"));
    } else {
      p.initial_state = StateVector::Zero(p.target_state.size());
      p.initial_state(0) = 1.0;
    }
  }
  if (task.contains("profile")) s.profile = parse_profile_kind(task.at("profile").get<std::string>());
  s.periods = value_or(task, "periods", 80);
  s.samples = value_or(task, "samples", 2001);
  p.validate();
  return s;
}

std::vector<cplx> alpha_coeffs(const OptimizationReport& rep) {
  return {rep.coeffs.begin(), rep.coeffs.begin() + rep.kmax};
}

Runner cmd_synthesize(const json& config, std::uint64_t seed) {
  const BlockadeConfig cfg = parse_blockade(config);
  const json task = block(config, "synthesize");
  const SynthesisTask s = parse_synthesis(task, cfg);
  return [=](const RunContext& ctx) {
    const OptimizationReport rep = optimize(s.problem, seed);
    json report = report_json(rep);
    report["fidelity_goal"] = s.problem.fidelity_goal;
    report["seed"] = seed;
    ctx.write_json("report.json", report);
    json coeffs = json::array();
    for (auto z : rep.coeffs) coeffs.push_back(complex_json(z));
    ctx.write_json("coefficients.json", {{"schema_version", 1},
                                         {"blockade", block(config, "blockade")},
                                         {"synthesize", task},
                                         {"kmax", rep.kmax},
                                         {"coeffs", coeffs}});
    if (!s.problem.penalized()) {
      const SinePulse alpha(s.problem.duration, alpha_coeffs(rep));
      ctx.write_drive("drive_two", drives_from_alpha(alpha, cfg, s.samples, cfg.kappa() > 0.0));
      if (s.profile) {
        const ModulatedPulse pulse = modulate(alpha, ModulationProfile(*s.profile, s.periods, s.problem.duration));
        ctx.write_drive("drive_single", drive_single_from_alpha_tilde(pulse, cfg, s.samples, cfg.kappa() > 0.0));
      }
    }
    ctx.out << "fidelity " << format_number(rep.fidelity) << " verified " << format_number(rep.verified_fidelity)
            << " kmax " << rep.kmax << " restarts " << rep.restarts_run << '\n';
    return rep.converged ? kExitOk : kExitConvergence;
  };
}

// ------------------------------------------------------------------ simulate

struct SimRow {
  double eta = 0.0;
  double fidelity = 0.0;
  double leakage = 0.0;
  int dim = 0;
  long steps = 0;
};

std::vector<double> eta_list(const json& task) {
  return task.contains("eta") ? task.at("eta").get<std::vector<double>>() : std::vector<double>{0.0};
}

StateVector padded(const StateVector& v, int dim) {
  StateVector out = StateVector::Zero(dim);
  out.head(v.size()) = v;
  return out;
}

Runner simulate_coefficients(const json& config, const json& task) {
  if (!task.contains("coefficients_file")) throw ConfigError("simulate: missing coefficients_file");
  const std::string path = task.at("coefficients_file").get<std::string>();
  std::ifstream in(path);
  if (!in) throw ConfigError("simulate: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  for (const char* key : {"synthesize", "coeffs"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("simulate: coefficients file lacks '") + key + "'");
  }
  const json& blockade = config.contains("blockade") ? config.at("blockade") : block(doc, "blockade");
  const BlockadeConfig cfg = parse_blockade(json{{"blockade", blockade}});
  const SynthesisTask s = parse_synthesis(doc.at("synthesize"), cfg);
  const OptimizationProblem& p = s.problem;
  const std::vector<cplx> coeffs = complex_vector_from_json(doc.at("coeffs"));
  const std::vector<double> etas = eta_list(task);
  const int dim = value_or(task, "dim", cfg.r + 3);
  if (dim < cfg.r + 2) throw ConfigError("simulate: dim must be >= r + 2");
  const bool open = cfg.kappa() > 0.0;
  if (p.penalized() && (open || etas != std::vector<double>{0.0})) {
    throw ConfigError("simulate: eta and loss are supported for blockade-frame pulses only");
  }
  if (open && p.kind == ObjectiveKind::Gate) throw ConfigError("simulate: lossy runs need a state task");
  const bool trajectory = value_or(task, "trajectory", false);
  const long trajectory_steps = value_or(task, "trajectory_steps", p.steps);
  const double tol = value_or(task, "tolerance", 1e-9);
  evaluate_objective(p, coeffs);  // rejects a coefficient vector of the wrong length

  return [=](const RunContext& ctx) {
    const int kmax = static_cast<int>(p.penalized() ? coeffs.size() / 2 : coeffs.size());
    const SinePulse alpha(p.duration, std::vector<cplx>(coeffs.begin(), coeffs.begin() + kmax));
    const FockSpace space(dim);
    const Operator adag = creation(space);
    auto lambda1 = [&](double t) {
      const cplx a = alpha.value(t);
      cplx l = cfg.chi * a * (2.0 * std::norm(a) - cfg.r) - cfg.delta0 * a + kI * alpha.derivative(t);
      if (open) l += kI * cfg.kappa() * a / 2.0;
      return l;
    };
    std::vector<SimRow> rows;
    for (double eta : etas) {
      SimRow row;
      row.eta = eta;
      if (!open && eta == 0.0) {
        const OptimizationReport rep = evaluate_pulse(p, coeffs);
        row.fidelity = rep.verified_fidelity;
        row.leakage = rep.leakage;
        row.dim = p.penalized() ? rep.dim : cfg.r + 2;
        row.steps = rep.verification_steps;
        rows.push_back(row);
        continue;
      }
      HamiltonianSampler h = [&, eta](double t) {
        Operator m = h_dr(alpha.value(t), cfg, space);
        if (eta != 0.0) {
          const Operator drive = eta * lambda1(t) * adag;
          m += drive + drive.adjoint();
        }
        return m;
      };
      row.dim = dim;
      if (open) {
        const StateVector psi0 = padded(p.initial_state, dim), target = padded(p.target_state, dim);
        LindbladOptions lo;
        lo.initial_steps = p.steps;
        lo.tolerance = tol;
        const LindbladResult lr = lindblad_propagate(psi0 * psi0.adjoint(), h, cfg.kappa(), p.duration, lo);
        row.fidelity = (target.adjoint() * lr.rho * target)(0, 0).real();
        row.leakage = std::nan("");
        row.steps = lr.step_count;
      } else {
        PropagationOptions po;
        po.initial_steps = p.steps;
        po.tolerance = tol;
        const PropagationResult pr = propagate_unitary(h, p.duration, po);
        const Operator& u = *pr.final_unitary;
        if (p.kind == ObjectiveKind::Gate) {
          row.fidelity = gate_fidelity(u, p.target_unitary, cfg.r + 1);
          row.leakage = leakage(propagate_trajectory(h, p.duration, pr.step_count), cfg.r);
        } else {
          row.fidelity = std::norm(padded(p.target_state, dim).dot(u * padded(p.initial_state, dim)));
          row.leakage = std::nan("");
        }
        row.steps = pr.step_count;
      }
      rows.push_back(row);
    }
    std::vector<std::vector<double>> table;
    json results = json::array();
    for (const auto& r : rows) {
      table.push_back({r.eta, r.fidelity, 1.0 - r.fidelity, r.leakage, static_cast<double>(r.dim),
                       static_cast<double>(r.steps)});
      results.push_back({{"eta", r.eta},
                         {"fidelity", r.fidelity},
                         {"infidelity", 1.0 - r.fidelity},
                         {"leakage", std::isnan(r.leakage) ? json(nullptr) : json(r.leakage)},
                         {"dim", r.dim},
                         {"steps", r.steps}});
    }
    ctx.write_json("simulation.json", {{"source", "coefficients"},
                                      {"kind", p.kind == ObjectiveKind::Gate ? "gate" : "state"},
                                      {"lindblad", open},
                                      {"results", results}});
    ctx.write_table("fidelity", {"eta", "fidelity", "infidelity", "leakage", "dim", "steps"}, table);
    if (trajectory && !p.penalized()) {
      const FockSpace tspace(cfg.r + 2);
      auto sys = std::make_shared<ControlSystem>(full_blockade_control_system(cfg, tspace));
      HamiltonianSampler h = [sys, alpha](double t) {
        const cplx a = alpha.value(t);
        const double c[2] = {a.real(), a.imag()};
        return sys->at(c);
      };
      const StateVector psi0 = p.kind == ObjectiveKind::State ? padded(p.initial_state, cfg.r + 2)
                                                               : StateVector(tspace.basis(0));
      const Trajectory tr = propagate_trajectory(h, p.duration, trajectory_steps);
      ctx.write_text("trajectory.csv", [&](std::ostream& f) { write_trajectory_csv(f, tr, psi0, cfg.r); });
    }
    for (const auto& r : rows) {
      ctx.out << "eta " << format_number(r.eta) << " fidelity " << format_number(r.fidelity) << '\n';
    }
    return kExitOk;
  };
}

struct Fock1Plan {
  double duration = 0.0;
  double alpha = 0.0;
  std::optional<int> periods;
  std::optional<ProfileKind> profile;
};

Runner simulate_fock1(const json& config, const json& task) {
  const BlockadeConfig cfg = parse_blockade(config);
  if (cfg.r != 1) throw ConfigError("fock1 protocol needs r = 1");
  const BudgetConstants constants;
  Fock1Plan plan;
  const double chi = std::abs(cfg.chi);
  if (task.contains("eps0")) {
    if (!(cfg.kappa() > 0.0)) throw ConfigError("eps0 sizing needs kappa > 0");
    const double eps0 = task.at("eps0").get<double>();
    plan.duration = 14.0 * eps0 / (15.0 * constants.c1 * cfg.kappa());
    plan.periods = static_cast<int>(
        std::ceil(std::pow(15.0 * constants.c2 / (eps0 * std::pow(chi * plan.duration, 6)), 0.25)));
  } else {
    if (!task.contains("duration")) throw ConfigError("fock1 needs eps0 or duration");
    plan.duration = task.at("duration").get<double>();
  }
  if (task.contains("periods")) plan.periods = task.at("periods").get<int>();
  plan.alpha = value_or(task, "alpha", pi / (2.0 * chi * plan.duration));
  if (task.contains("profile")) plan.profile = parse_profile_kind(task.at("profile").get<std::string>());
  if (plan.profile && !plan.periods) throw ConfigError("fock1 with a profile needs periods or eps0");
  if (!plan.profile) plan.periods.reset();
  const std::vector<double> etas = eta_list(task);
  if (!plan.profile && etas != std::vector<double>{0.0}) throw ConfigError("eta needs a modulation profile");
  const bool lindblad = value_or(task, "lindblad", cfg.kappa() > 0.0);
  if (lindblad && !(cfg.kappa() > 0.0)) throw ConfigError("lindblad needs kappa > 0");
  std::optional<int> dim;
  if (task.contains("dim")) dim = task.at("dim").get<int>();
  if (dim && *dim < cfg.r + (plan.profile ? 3 : 2)) throw ConfigError("simulate: dim too small for this frame");
  const double tol = value_or(task, "tolerance", 1e-9);

  return [=](const RunContext& ctx) {
    std::vector<SimRow> rows;
    if (plan.profile) {
      const ModulatedPulse pulse =
          modulate(PlateauPulse(plan.duration, plan.alpha), ModulationProfile(*plan.profile, *plan.periods, plan.duration));
      for (double eta : etas) {
        Fock1Options o;
        o.eta = eta;
        o.lindblad = lindblad;
        o.fixed_dim = dim;
        o.tolerance = tol;
        const Fock1Result r = simulate_modulated_fock1(pulse, cfg, o);
        rows.push_back({eta, r.fidelity, std::nan(""), r.dim, r.steps});
      }
    } else {
      const int d = dim.value_or(cfg.r + 2);
      const FockSpace space(d);
      const Operator h0 = h_dr(plan.alpha, cfg, space);
      HamiltonianSampler h = [h0](double) { return h0; };
      const StateVector psi0 = space.basis(0);
      SimRow row;
      row.dim = d;
      row.leakage = std::nan("");
      if (lindblad) {
        LindbladOptions lo;
        lo.tolerance = tol;
        const LindbladResult lr = lindblad_propagate(psi0 * psi0.adjoint(), h, cfg.kappa(), plan.duration, lo);
        row.fidelity = lr.rho(1, 1).real();
        row.steps = lr.step_count;
      } else {
        row.fidelity = std::norm(matrix_exp(-kI * plan.duration * h0)(1, 0));
        row.steps = 1;
      }
      rows.push_back(row);
    }
    std::vector<std::vector<double>> table;
    json results = json::array();
    for (const auto& r : rows) {
      table.push_back({r.eta, r.fidelity, 1.0 - r.fidelity, static_cast<double>(r.dim), static_cast<double>(r.steps)});
      json item{{"eta", r.eta}, {"fidelity", r.fidelity}, {"infidelity", 1.0 - r.fidelity}, {"dim", r.dim},
                {"steps", r.steps}};
      if (cfg.kappa() > 0.0) item["eps_per_kappa_T"] = (1.0 - r.fidelity) / (cfg.kappa() * plan.duration);
      results.push_back(item);
    }
    ctx.write_json("simulation.json",
                   {{"source", "fock1"},
                    {"duration", plan.duration},
                    {"alpha", plan.alpha},
                    {"periods", plan.periods ? json(*plan.periods) : json(nullptr)},
                    {"profile", plan.profile ? json(std::string(to_string(*plan.profile))) : json(nullptr)},
                    {"lindblad", lindblad},
                    {"kappa", cfg.kappa()},
                    {"results", results}});
    ctx.write_table("fidelity", {"eta", "fidelity", "infidelity", "dim", "steps"}, table);
    for (const auto& r : rows) {
      ctx.out << "eta " << format_number(r.eta) << " fidelity " << format_number(r.fidelity) << '\n';
    }
    return kExitOk;
  };
}

Runner cmd_simulate(const json& config, std::uint64_t) {
  const json& task = block(config, "simulate");
  const std::string source = value_or<std::string>(task, "source", "coefficients");
  return source == "fock1" ? simulate_fock1(config, task) : simulate_coefficients(config, task);
}

// ------------------------------------------------------------------ modulate

Runner cmd_modulate(const json& config, std::uint64_t) {
  const BlockadeConfig cfg = parse_blockade(config);
  const json& task = block(config, "modulate");
  const ProfileKind kind = profile_of(task, ProfileKind::SemiRotation);
  const int periods = value_or(task, "periods", 80);
  const double duration = value_or(task, "duration", 0.2);
  const int samples = value_or(task, "samples", 2001);
  if (task.contains("alpha") && task.contains("coeffs")) throw ConfigError("modulate: give alpha or coeffs, not both");
  Envelope envelope = task.contains("coeffs")
                          ? Envelope(SinePulse(duration, complex_vector_from_json(task.at("coeffs"))))
                          : Envelope(PlateauPulse(duration, value_or(task, "alpha", pi / (2.0 * std::abs(cfg.chi) * duration))));
  const ModulationProfile profile(kind, periods, duration);
  const ProfileReport check = check_profile(profile);
  const ModulatedPulse pulse = modulate(envelope, profile);

  return [=](const RunContext& ctx) {
    ctx.write_json("profile_check.json", {{"profile", std::string(to_string(kind))},
                                          {"periods", periods},
                                          {"omega_r", profile.omega_r()},
                                          {"passed", check.passed},
                                          {"mean", complex_json(check.mean)},
                                          {"mean_square", complex_json(check.mean_square)},
                                          {"symmetry_error", check.symmetry_error}});
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < samples; ++k) {
      const double t = duration * k / (samples - 1);
      const PulseSample at = pulse.sample(t);
      rows.push_back({t, at.value.real(), at.value.imag(), at.derivative.real(), at.derivative.imag()});
    }
    ctx.write_table("alpha_tilde", {"t", "re_alpha", "im_alpha", "re_dalpha", "im_dalpha"}, rows);
    ctx.write_drive("drive_single", drive_single_from_alpha_tilde(pulse, cfg, samples, cfg.kappa() > 0.0));
    ctx.out << "profile " << to_string(kind) << " passed " << (check.passed ? "yes" : "no") << '\n';
    return kExitOk;
  };
}

// -------------------------------------------------------------- trotter scan

Runner cmd_trotter_scan(const json& config, std::uint64_t) {
  const BlockadeConfig cfg = parse_blockade(config);
  if (cfg.kappa() != 0.0) throw ConfigError("trotter scan needs kappa = 0");
  const json& task = block(config, "trotter_scan");
  const auto m_list = value_or(task, "m_list", std::vector<int>{20, 40, 80, 160});
  const auto chi_t_list = value_or(task, "chi_t_list", std::vector<double>{0.1, 0.14, 0.2});
  std::optional<double> alpha0;
  if (task.contains("alpha0")) alpha0 = task.at("alpha0").get<double>();
  TrotterScanOptions opts;
  opts.profile = profile_of(task, ProfileKind::SemiRotation);
  opts.fit_max_error = value_or(task, "fit_max_error", 0.2);
  opts.simulation.steps_per_period = value_or(task, "steps_per_period", 40);
  if (task.contains("dim")) opts.simulation.fixed_dim = task.at("dim").get<int>();

  return [=](const RunContext& ctx) {
    const TrotterScan scan = trotter_error_scan(alpha0, m_list, chi_t_list, cfg, opts);
    json report = report_json(scan);
    report["profile"] = std::string(to_string(opts.profile));
    ctx.write_json("trotter_scan.json", report);
    if (ctx.format == "csv") {
      ctx.write_text("trotter_points.csv", [&](std::ostream& f) { write_trotter_scan_csv(f, scan); });
    }
    ctx.out << "c2 " << format_number(scan.c2) << " slope_M " << format_number(scan.slope_m) << " slope_chi_T "
            << format_number(scan.slope_chi_t) << '\n';
    return kExitOk;
  };
}

// -------------------------------------------------------------------- budget

BudgetConstants parse_constants(const json& task) {
  BudgetConstants c;
  c.c1 = value_or(task, "c1", c.c1);
  c.c2 = value_or(task, "c2", c.c2);
  c.c3_factor = value_or(task, "c3_factor", c.c3_factor);
  return c;
}

Runner cmd_budget(const json& config, std::uint64_t, bool si) {
  const BlockadeConfig cfg = parse_blockade(config);
  const json& task = block(config, "budget");
  const Units units = si ? Units::SI : Units::Dimensionless;
  if (si && !cfg.omega_c) throw ConfigError("--si budget needs blockade.omega_c");
  const BudgetConstants constants = parse_constants(task);
  const bool has_tm = task.contains("T") && task.contains("M");
  if (!has_tm && !task.contains("P_in")) throw ConfigError("budget needs T and M, or P_in");
  if (task.contains("T") != task.contains("M")) throw ConfigError("budget: T and M go together");
  const bool free_kappa_e = value_or(task, "free_kappa_e", false);
  if (task.contains("P_in") && !free_kappa_e && !(cfg.kappa_e > 0.0)) {
    throw ConfigError("budget: P_in needs kappa_e > 0 or free_kappa_e");
  }

  return [=](const RunContext& ctx) {
    json doc{{"units", si ? "SI" : "dimensionless"},
             {"constants", {{"c1", constants.c1}, {"c2", constants.c2}, {"c3", power_constant(cfg, units, constants)}}}};
    if (has_tm) {
      ErrorBudget b = total_error(cfg, task.at("T").get<double>(), task.at("M").get<double>(), constants);
      if (cfg.kappa_e > 0.0) b.P_in = power_required(cfg, b.T, b.M, units, constants);
      doc["at_T_M"] = report_json(b);
      ctx.out << "eps_tot " << format_number(b.eps_tot) << '\n';
    }
    if (task.contains("P_in")) {
      const ErrorBudget b = optimize_budget(cfg, task.at("P_in").get<double>(), units, free_kappa_e, constants);
      doc["optimized"] = report_json(b);
      ctx.out << "T_opt " << format_number(*b.T_opt) << " eps_opt " << format_number(*b.eps_opt) << '\n';
    }
    ctx.write_json("budget.json", doc);
    return kExitOk;
  };
}

// --------------------------------------------------------------- feasibility

Runner cmd_feasibility(const json& config, std::uint64_t) {
  const json& task = block(config, "feasibility");
  const std::vector<PlatformSpec> catalog =
      task.contains("catalog") ? load_platforms(task.at("catalog").get<std::string>()) : bundled_platforms();
  std::vector<PlatformSpec> chosen;
  if (task.contains("platforms")) {
    for (const auto& name : task.at("platforms")) chosen.push_back(find_platform(catalog, name.get<std::string>()));
  } else {
    chosen = catalog;
  }
  const double target = value_or(task, "fidelity_target", 0.9);

  return [=](const RunContext& ctx) {
    std::vector<FeasibilityReport> reports;
    json rows = json::array();
    bool any = false;
    for (const auto& p : chosen) {
      reports.push_back(feasibility(p, target));
      rows.push_back(report_json(reports.back()));
      any = any || reports.back().feasible;
    }
    ctx.write_json("feasibility.json", {{"fidelity_target", target}, {"platforms", rows}});
    std::ostringstream table;
    write_feasibility_table(table, reports);
    ctx.write_text("feasibility.txt", [&](std::ostream& f) { f << table.str(); });
    ctx.out << table.str();
    return any ? kExitOk : kExitInfeasible;
  };
}

// -------------------------------------------------------------- universality

Runner cmd_universality(const json& config, std::uint64_t) {
  const BlockadeConfig base = parse_blockade(config);
  const json& task = block(config, "universality");
  const int r_max = value_or(task, "r_max", 4);

  return [=](const RunContext& ctx) {
    json rows = json::array();
    for (int r = 1; r <= r_max; ++r) {
      BlockadeConfig cfg = base;
      cfg.r = r;
      const SchirmerReport rep = check_schirmer(cfg);
      const ProjectedHamiltonian ph = h_dr_projected(cfg);
      const std::vector<Operator> full{-kI * ph.drift, -kI * cfg.chi * ph.control_re, -kI * cfg.chi * ph.control_im};
      const std::vector<Operator> pair{full[1], full[2]};
      const int rank = lie_closure(full), pair_rank = lie_closure(pair);
      const int n = r + 1;
      json row = report_json(rep);
      row["r"] = r;
      row["closure_rank"] = rank;
      row["pair_closure_rank"] = pair_rank;
      rows.push_back(row);
      ctx.out << "r=" << r << ": " << (rep.group.empty() ? "U(" + std::to_string(n) + ")" : rep.group) << ": "
              << (rep.passes ? "yes" : "no") << ", closure rank " << rank << " (pair " << pair_rank << ")";
      if (!rep.passes) ctx.out << " [" << rep.diagnostic << "]";
      ctx.out << '\n';
    }
    ctx.write_json("universality.json", {{"chi", base.chi}, {"delta0", base.delta0}, {"rows", rows}});
    return kExitOk;
  };
}

// ------------------------------------------------------------------ dispatch

int code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return kExitConvergence;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ContractError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const UndefinedPowerError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) {
    return kExitConfig;
  }
  return kExitFailure;
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path make_run_dir(const fs::path& base, const std::string& stamp, std::uint64_t seed) {
  fs::create_directories(base);
  const std::string stem = stamp + "-seed" + std::to_string(seed);
  fs::path dir = base / stem;
  for (int k = 2; fs::exists(dir); ++k) dir = base / (stem + "-" + std::to_string(k));
  fs::create_directory(dir);
  return dir;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

const std::vector<std::string>& task_keys() {
  static const std::vector<std::string> keys{"synthesize", "simulate",   "modulate",    "trotter_scan",
                                             "budget",     "feasibility", "universality"};
  return keys;
}

std::string task_key(const std::string& subcommand) {
  return subcommand == "trotter-scan" ? "trotter_scan" : subcommand;
}

int dispatch(std::string subcommand, json config, const Flags& flags, std::ostream& out, std::ostream& err) {
  bool si = flags.si;
  std::optional<std::uint64_t> seed = flags.seed;
  if (subcommand == "replay") {
    const json manifest = config;
    for (const char* key : {"subcommand", "seed", "config"}) {
      if (!manifest.contains(key)) throw ConfigError(std::string("replay: manifest lacks '") + key + "'");
    }
    subcommand = manifest.at("subcommand").get<std::string>();
    if (subcommand == "replay") throw ConfigError("replay: manifest names replay");
    seed = manifest.at("seed").get<std::uint64_t>();
    si = manifest.value("si", false);
    config = manifest.at("config");
  }

  static const SchemaValidator validator = SchemaValidator::from_file(default_schema_path());
  const auto problems = validator.validate(config);
  if (!problems.empty()) {
    for (const auto& p : problems) err << "config: " << p << '\n';
    return kExitConfig;
  }
  const std::string key = task_key(subcommand);
  for (const auto& other : task_keys()) {
    if (other != key && config.contains(other)) {
      err << "config: block '" << other << "' does not belong to subcommand " << subcommand << '\n';
      return kExitConfig;
    }
  }

  // CLI flags override the file; the manifest records the merged result.
  if (flags.subcommand != "replay") {
    if (seed) config["seed"] = *seed;
    if (flags.format) config["output"]["format"] = *flags.format;
    if (!flags.out_dir.empty()) config["output"]["dir"] = flags.out_dir;
    if (flags.profile) {
      if (key != "synthesize" && key != "simulate" && key != "modulate" && key != "trotter_scan") {
        err << "config: --profile does not apply to " << subcommand << '\n';
        return kExitConfig;
      }
      config[key]["profile"] = *flags.profile;
    }
    if (flags.eta) {
      if (key != "simulate") {
        err << "config: --eta applies to simulate only\n";
        return kExitConfig;
      }
      config[key]["eta"] = json::array({*flags.eta});
    }
  } else if (!flags.out_dir.empty()) {
    config["output"]["dir"] = flags.out_dir;
  }
  const std::uint64_t run_seed = config.value("seed", std::uint64_t{0});
  config["seed"] = run_seed;

  Runner runner;
  if (key == "synthesize") runner = cmd_synthesize(config, run_seed);
  else if (key == "simulate") runner = cmd_simulate(config, run_seed);
  else if (key == "modulate") runner = cmd_modulate(config, run_seed);
  else if (key == "trotter_scan") runner = cmd_trotter_scan(config, run_seed);
  else if (key == "budget") runner = cmd_budget(config, run_seed, si);
  else if (key == "feasibility") runner = cmd_feasibility(config, run_seed);
  else if (key == "universality") runner = cmd_universality(config, run_seed);
  else throw ConfigError("unknown subcommand " + subcommand);

  const json& output = block(config, "output");
  const fs::path base = output.value("dir", std::string("runs"));
  const std::string stamp = utc_stamp();
  RunContext ctx{make_run_dir(base, stamp, run_seed), output.value("format", std::string("csv")), out};
  ctx.write_json("manifest.json", {{"artifact", "kerrblock"},
                                   {"version", KERRBLOCK_VERSION},
                                   {"schema_version", 1},
                                   {"subcommand", task_key(subcommand) == "trotter_scan" ? "trotter-scan" : subcommand},
                                   {"seed", run_seed},
                                   {"si", si},
                                   {"created_utc", stamp},
                                   {"config", config}});
  out << "run " << ctx.dir.string() << '\n';
  return runner(ctx);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-blockade control in weakly nonlinear Kerr resonators", "kerrblock"};
  app.set_version_flag("--version", std::string(KERRBLOCK_VERSION));
  app.require_subcommand(1);
  Flags flags;
  std::string format, profile;
  double eta = 0.0;
  std::uint64_t seed = 0;
  auto* config_opt = app.add_option("--config", flags.config_path, "JSON run configuration (or a manifest for replay)")
                         ->check(CLI::ExistingFile);
  app.add_option("--out", flags.out_dir, "Directory receiving the run directories");
  auto* seed_opt = app.add_option("--seed", seed, "Optimizer seed");
  auto* format_opt = app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  auto* eta_opt = app.add_option("--eta", eta, "Linear-drive miscalibration (1 + eta) Lambda1");
  auto* profile_opt = app.add_option("--profile", profile, "Modulation profile")
                          ->check(CLI::IsMember({"double_pump", "semi_rotation", "two_point"}));
  app.add_flag("--si", flags.si, "SI units for budget");
  app.fallthrough();
  for (const char* name : {"synthesize", "simulate", "modulate", "trotter-scan", "budget", "feasibility",
                           "universality", "replay"}) {
    app.add_subcommand(name)->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  flags.subcommand = app.get_subcommands().front()->get_name();
  if (seed_opt->count()) flags.seed = seed;
  if (format_opt->count()) flags.format = format;
  if (eta_opt->count()) flags.eta = eta;
  if (profile_opt->count()) flags.profile = profile;

  try {
    json config = json{{"schema_version", 1}};
    if (config_opt->count()) {
      config = read_json_file(flags.config_path);
    } else if (flags.subcommand == "replay") {
      throw ConfigError("replay needs --config <manifest.json>");
    }
    return dispatch(flags.subcommand, std::move(config), flags, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e);
  }
}

}  // namespace kerrblock::cli
