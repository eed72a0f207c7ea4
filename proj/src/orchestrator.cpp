#include "qgate/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qgate/parallel.hpp"
#include "qgate/propagator.hpp"

namespace qgate {

namespace fs = std::filesystem;
using nlohmann::json;

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::propagate: return "propagate";
    case Scheme::direct_sm: return "direct-sm";
    case Scheme::direct_geo: return "direct-geo";
    case Scheme::simplex: return "simplex";
    case Scheme::hybrid_sm: return "hybrid-sm";
    case Scheme::hybrid_geo: return "hybrid-geo";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "propagate") return Scheme::propagate;
  if (name == "direct-sm") return Scheme::direct_sm;
  if (name == "direct-geo") return Scheme::direct_geo;
  if (name == "simplex") return Scheme::simplex;
  if (name == "hybrid-sm") return Scheme::hybrid_sm;
  if (name == "hybrid-geo") return Scheme::hybrid_geo;
  throw ConfigError("run.scheme: unknown scheme '" + name +
                    "' (expected propagate | direct-sm | direct-geo | simplex | "
                    "hybrid-sm | hybrid-geo)");
}

namespace {

bool needs_krotov(Scheme s) {
  return s == Scheme::direct_sm || s == Scheme::direct_geo || s == Scheme::hybrid_sm ||
         s == Scheme::hybrid_geo;
}

bool needs_simplex(Scheme s) {
  return s == Scheme::simplex || s == Scheme::hybrid_sm || s == Scheme::hybrid_geo;
}

bool uses_sm(Scheme s) { return s == Scheme::direct_sm || s == Scheme::hybrid_sm; }

}  // namespace

void RunConfig::validate() const {
  system.validate();
  if (analytic_pulse.has_value() == !pulse_file.empty())
    throw ConfigError("pulse: exactly one pulse source required (analytic parameters or file)");
  if (analytic_pulse) analytic_pulse->validate();
  if (dt_ns <= 0) throw ConfigError("grid.dt_ns: must be > 0");
  if (dynamics_stride < 1) throw ConfigError("run.dynamics_stride: must be >= 1");
  if (needs_krotov(scheme) && !has_krotov_section)
    throw ConfigError("krotov: section required for scheme " + scheme_name(scheme));
  if (needs_simplex(scheme) && !has_simplex_section)
    throw ConfigError("simplex: section required for scheme " + scheme_name(scheme));
  if (needs_krotov(scheme)) krotov.validate();
  if (needs_simplex(scheme)) simplex.validate();
}

RunConfig load_run_config(const IniFile& ini) {
  RunConfig c;

  c.system.cavity_freq_ghz = ini.get_or("system", "cavity_freq_ghz", c.system.cavity_freq_ghz);
  c.system.qubit1_freq_ghz = ini.get_or("system", "qubit1_freq_ghz", c.system.qubit1_freq_ghz);
  c.system.qubit2_freq_ghz = ini.get_or("system", "qubit2_freq_ghz", c.system.qubit2_freq_ghz);
  c.system.drive_freq_ghz = ini.get_or("system", "drive_freq_ghz", c.system.drive_freq_ghz);
  c.system.anharmonicity1_mhz =
      ini.get_or("system", "anharmonicity1_mhz", c.system.anharmonicity1_mhz);
  c.system.anharmonicity2_mhz =
      ini.get_or("system", "anharmonicity2_mhz", c.system.anharmonicity2_mhz);
  c.system.coupling1_mhz = ini.get_or("system", "coupling1_mhz", c.system.coupling1_mhz);
  c.system.coupling2_mhz = ini.get_or("system", "coupling2_mhz", c.system.coupling2_mhz);
  c.system.qubit_levels = ini.get_or("system", "qubit_levels", c.system.qubit_levels);
  c.system.cavity_levels = ini.get_or("system", "cavity_levels", c.system.cavity_levels);
  c.system.envelope_scale = ini.get_or("system", "envelope_scale", c.system.envelope_scale);

  c.dt_ns = ini.get_or("grid", "dt_ns", c.dt_ns);

  const bool has_analytic =
      ini.has("pulse", "peak_amplitude_mhz") || ini.has("pulse", "duration_ns");
  const bool has_file = ini.has("pulse", "file");
  if (has_analytic && has_file)
    throw ConfigError("pulse: give either analytic parameters or a file, not both");
  if (has_file) {
    c.pulse_file = ini.get_string("pulse", "file");
  } else {
    AnalyticPulseParams p;
    p.peak_amplitude_mhz = ini.get_or("pulse", "peak_amplitude_mhz", p.peak_amplitude_mhz);
    p.duration_ns = ini.get_or("pulse", "duration_ns", p.duration_ns);
    c.analytic_pulse = p;
  }

  c.scheme = parse_scheme(ini.get_or<std::string>("run", "scheme", "propagate"));
  c.output_dir = ini.get_or<std::string>("run", "output_dir", c.output_dir);
  c.seed = static_cast<std::uint64_t>(ini.get_or("run", "seed", 0));
  c.dynamics_stride = ini.get_or("run", "dynamics_stride", c.dynamics_stride);

  c.has_krotov_section = ini.has_section("krotov");
  if (c.has_krotov_section) {
    c.krotov.lambda_a = ini.get_or("krotov", "lambda_a", c.krotov.lambda_a);
    c.krotov.epsilon_a = ini.get_or("krotov", "epsilon_a", c.krotov.epsilon_a);
    c.krotov.max_iterations = ini.get_or("krotov", "max_iterations", c.krotov.max_iterations);
    c.krotov.convergence_ratio =
        ini.get_or("krotov", "convergence_ratio", c.krotov.convergence_ratio);
    c.krotov.monotonic_tolerance =
        ini.get_or("krotov", "monotonic_tolerance", c.krotov.monotonic_tolerance);
    c.krotov.memory_budget_mb =
        ini.get_or("krotov", "memory_budget_mb", c.krotov.memory_budget_mb);
    if (ini.has("krotov", "sigma_enabled"))
      c.sigma_override = ini.get_bool("krotov", "sigma_enabled");
    if (ini.has("krotov", "resume_sigma"))
      c.krotov.resume_sigma = ini.get_double("krotov", "resume_sigma");
  }

  c.has_simplex_section = ini.has_section("simplex");
  if (c.has_simplex_section) {
    c.simplex.spread_e0_mhz = ini.get_or("simplex", "spread_e0_mhz", c.simplex.spread_e0_mhz);
    c.simplex.spread_t_ns = ini.get_or("simplex", "spread_t_ns", c.simplex.spread_t_ns);
    c.simplex.reflection = ini.get_or("simplex", "reflection", c.simplex.reflection);
    c.simplex.expansion = ini.get_or("simplex", "expansion", c.simplex.expansion);
    c.simplex.contraction = ini.get_or("simplex", "contraction", c.simplex.contraction);
    c.simplex.shrink = ini.get_or("simplex", "shrink", c.simplex.shrink);
    c.simplex.max_evaluations =
        ini.get_or("simplex", "max_evaluations", c.simplex.max_evaluations);
    c.simplex.tolerance = ini.get_or("simplex", "tolerance", c.simplex.tolerance);
    c.simplex.t0_ns = ini.get_or("simplex", "t0_ns", c.simplex.t0_ns);
  }

  c.propagator.expansion_tol =
      ini.get_or("propagator", "expansion_tol", c.propagator.expansion_tol);
  c.propagator.max_order = ini.get_or("propagator", "max_order", c.propagator.max_order);
  return c;
}

void apply_preset(RunConfig& config, const std::string& preset) {
  if (preset == "reduced") {
    config.system.qubit_levels = 3;
    config.system.cavity_levels = 15;
    config.dt_ns = 0.05;
  } else if (preset == "full") {
    config.system.qubit_levels = 6;
    config.system.cavity_levels = 70;
    config.dt_ns = 0.01;
  } else if (!preset.empty()) {
    throw ConfigError("preset: unknown preset '" + preset + "' (expected reduced | full)");
  }
}

IniFile config_snapshot(const RunConfig& c) {
  IniFile ini;
  ini.set("system", "cavity_freq_ghz", c.system.cavity_freq_ghz);
  ini.set("system", "qubit1_freq_ghz", c.system.qubit1_freq_ghz);
  ini.set("system", "qubit2_freq_ghz", c.system.qubit2_freq_ghz);
  ini.set("system", "drive_freq_ghz", c.system.drive_freq_ghz);
  ini.set("system", "anharmonicity1_mhz", c.system.anharmonicity1_mhz);
  ini.set("system", "anharmonicity2_mhz", c.system.anharmonicity2_mhz);
  ini.set("system", "coupling1_mhz", c.system.coupling1_mhz);
  ini.set("system", "coupling2_mhz", c.system.coupling2_mhz);
  ini.set("system", "qubit_levels", static_cast<long long>(c.system.qubit_levels));
  ini.set("system", "cavity_levels", static_cast<long long>(c.system.cavity_levels));
  ini.set("system", "envelope_scale", c.system.envelope_scale);
  ini.set("grid", "dt_ns", c.dt_ns);
  if (c.analytic_pulse) {
    ini.set("pulse", "peak_amplitude_mhz", c.analytic_pulse->peak_amplitude_mhz);
    ini.set("pulse", "duration_ns", c.analytic_pulse->duration_ns);
  } else {
    ini.set("pulse", "file", c.pulse_file);
  }
  ini.set("run", "scheme", scheme_name(c.scheme));
  ini.set("run", "output_dir", c.output_dir);
  ini.set("run", "seed", static_cast<long long>(c.seed));
  ini.set("run", "dynamics_stride", static_cast<long long>(c.dynamics_stride));
  if (c.has_krotov_section) {
    ini.set("krotov", "lambda_a", c.krotov.lambda_a);
    ini.set("krotov", "epsilon_a", c.krotov.epsilon_a);
    ini.set("krotov", "max_iterations", static_cast<long long>(c.krotov.max_iterations));
    ini.set("krotov", "convergence_ratio", c.krotov.convergence_ratio);
    ini.set("krotov", "monotonic_tolerance", c.krotov.monotonic_tolerance);
    ini.set("krotov", "memory_budget_mb", c.krotov.memory_budget_mb);
    if (c.sigma_override) ini.set("krotov", "sigma_enabled", std::string(*c.sigma_override ? "true" : "false"));
    if (c.krotov.resume_sigma) ini.set("krotov", "resume_sigma", *c.krotov.resume_sigma);
  }
  if (c.has_simplex_section) {
    ini.set("simplex", "spread_e0_mhz", c.simplex.spread_e0_mhz);
    ini.set("simplex", "spread_t_ns", c.simplex.spread_t_ns);
    ini.set("simplex", "reflection", c.simplex.reflection);
    ini.set("simplex", "expansion", c.simplex.expansion);
    ini.set("simplex", "contraction", c.simplex.contraction);
    ini.set("simplex", "shrink", c.simplex.shrink);
    ini.set("simplex", "max_evaluations", static_cast<long long>(c.simplex.max_evaluations));
    ini.set("simplex", "tolerance", c.simplex.tolerance);
    ini.set("simplex", "t0_ns", c.simplex.t0_ns);
  }
  ini.set("propagator", "expansion_tol", c.propagator.expansion_tol);
  ini.set("propagator", "max_order", static_cast<long long>(c.propagator.max_order));
  return ini;
}

namespace {

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw StageError("cannot write " + path);
  out << text;
}

std::string csv_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_convergence_csv(const std::string& path, double initial_j,
                           const std::vector<IterationRow>& rows) {
  std::ostringstream os;
  os << "iteration,J_T,J_diag,J_gamma,delta_J,sigma,n_props,wall_s\n";
  os << "0," << csv_num(initial_j) << ",,,,," << 0 << ",0\n";
  for (const auto& r : rows) {
    os << r.iteration << "," << csv_num(r.j_total) << "," << csv_num(r.j_diag) << ","
       << csv_num(r.j_gamma) << "," << csv_num(r.delta_j) << "," << csv_num(r.sigma) << ","
       << r.propagation_units << "," << csv_num(r.wall_seconds) << "\n";
  }
  write_text(path, os.str());
}

void write_simplex_csv(const std::string& path, const std::vector<CandidateEvaluation>& log) {
  std::ostringstream os;
  os << "eval,E0_MHz,T_ns,J_splx,J_diag,J_gamma,eps_C,eps_pop\n";
  for (const auto& ev : log) {
    os << ev.eval << "," << csv_num(ev.params.peak_amplitude_mhz) << ","
       << csv_num(ev.params.duration_ns) << "," << csv_num(ev.value.total) << ","
       << csv_num(ev.value.parts.j_diag) << "," << csv_num(ev.value.parts.j_gamma) << ","
       << csv_num(ev.eps_c) << "," << csv_num(ev.eps_pop) << "\n";
  }
  write_text(path, os.str());
}

}  // namespace

RunResult run(const RunConfig& config, const std::string& explicit_run_dir) {
  config.validate();

  const SystemOperators sys = build_system(config.system);
  const DriveHamiltonian ham(sys);

  ControlField guess;
  if (config.analytic_pulse) {
    guess = sample_analytic(*config.analytic_pulse, config.dt_ns, config.system.envelope_scale);
  } else {
    guess = read_pulse_file(config.pulse_file);
  }

  std::string run_dir = explicit_run_dir;
  if (run_dir.empty())
    run_dir = (fs::path(config.output_dir) /
               (scheme_name(config.scheme) + "-" + timestamp_now())).string();
  fs::create_directories(run_dir);
  const fs::path dir(run_dir);

  write_text((dir / "config.snapshot").string(), config_snapshot(config).serialize());
  write_pulse_file(guess, (dir / "pulse_initial.dat").string());

  RunResult result;
  result.run_dir = run_dir;

  ControlField final_field = guess;
  long simplex_units = 0;
  long krotov_units = 0;
  Gate krotov_start_gate = Gate::Identity();
  bool have_start_gate = false;

  try {
    if (needs_simplex(config.scheme)) {
      SimplexConfig scfg = config.simplex;
      if (config.analytic_pulse) scfg.initial = *config.analytic_pulse;
      SimplexOutcome outcome = run_simplex(scfg, sys, ham, config.dt_ns, config.propagator);
      write_simplex_csv((dir / "simplex_evals.csv").string(), outcome.log);
      simplex_units = outcome.propagation_units;
      result.simplex_evaluations = outcome.propagation_units;
      final_field = outcome.best_field;
      krotov_start_gate = outcome.best_gate;
      have_start_gate = true;
    }

    if (needs_krotov(config.scheme)) {
      KrotovConfig kcfg = config.krotov;
      kcfg.sigma_enabled = config.sigma_override.value_or(!uses_sm(config.scheme));

      std::unique_ptr<GateFunctional> functional;
      if (uses_sm(config.scheme)) {
        if (!have_start_gate) {
          auto trajs = propagate_logical_states(ham, sys.logical, final_field, 0, config.propagator);
          std::array<Vec, 4> finals;
          for (int k = 0; k < 4; ++k) finals[k] = std::move(trajs[k].final_state);
          krotov_start_gate = gate_from_finals(finals, sys.logical);
        }
        functional = std::make_unique<SquareModulusFunctional>(
            closest_diagonal_pe(krotov_start_gate, config.seed));
      } else {
        functional = std::make_unique<GeoPhaseFunctional>();
      }

      KrotovOptimizer optimizer(sys, ham, *functional, final_field, kcfg, config.propagator);
      OptimizationRecord rec = optimizer.run();
      write_convergence_csv((dir / "convergence.csv").string(), rec.initial_j, rec.rows);
      final_field = optimizer.field();
      krotov_units = rec.propagation_units;
      result.krotov_iterations = static_cast<int>(rec.rows.size());
      result.krotov_converged = rec.converged;

      if (uses_sm(config.scheme)) {
        // The sm gate error is measured against the exact target gate.
        result.metrics.closest_target =
            static_cast<const SquareModulusFunctional*>(functional.get())->target();
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(scheme_name(config.scheme) + ": " + e.what());
  }

  // Final analysis: propagate the resulting field once, with the |00>
  // trajectory stored for the dynamics dump.
  std::array<Trajectory, 4> trajs;
  try {
    parallel_for(4, [&](int k) {
      trajs[k] = propagate_forward(ham, final_field, sys.logical.basis_state(k),
                                   k == 0 ? config.dynamics_stride : 0, config.propagator);
    });
  } catch (const std::exception& e) {
    throw StageError("analysis: " + std::string(e.what()));
  }
  std::array<Vec, 4> finals;
  for (int k = 0; k < 4; ++k) finals[k] = trajs[k].final_state;
  const Gate gate = gate_from_finals(finals, sys.logical);

  if (uses_sm(config.scheme) && needs_krotov(config.scheme)) {
    result.metrics = analyze_gate_vs(gate, result.metrics.closest_target, config.seed);
  } else {
    result.metrics = analyze_gate(gate, config.seed);
  }

  // Dynamics dump matching the population-dynamics panels.
  {
    auto n_cav = expectation_series(trajs[0], sys.n_cavity);
    auto n_q1 = expectation_series(trajs[0], sys.n_qubit1);
    auto n_q2 = expectation_series(trajs[0], sys.n_qubit2);
    auto pop00 = overlap_series(trajs[0], sys.logical.basis_state(0));
    std::ostringstream os;
    os << "t,<n>_cav,std_cav,<n>_q1,std_q1,<n>_q2,std_q2,pop_00\n";
    for (size_t i = 0; i < n_cav.size(); ++i) {
      os << csv_num(n_cav[i].t) << "," << csv_num(n_cav[i].mean) << "," << csv_num(n_cav[i].std_dev)
         << "," << csv_num(n_q1[i].mean) << "," << csv_num(n_q1[i].std_dev) << ","
         << csv_num(n_q2[i].mean) << "," << csv_num(n_q2[i].std_dev) << ","
         << csv_num(pop00[i].second) << "\n";
      result.peak_n_cavity = std::max(result.peak_n_cavity, n_cav[i].mean);
    }
    write_text((dir / "dynamics_00.csv").string(), os.str());
  }

  write_pulse_file(final_field, (dir / "pulse_final.dat").string());
  write_text((dir / "metrics.json").string(), metrics_json(result.metrics) + "\n");

  result.summary.scheme = scheme_name(config.scheme);
  result.summary.t_ns = final_field.duration();
  result.summary.total_propagations = simplex_units + krotov_units;
  result.summary.eps_c = result.metrics.eps_c;
  result.summary.eps_pop = result.metrics.eps_pop;
  result.summary.eps_avg = result.metrics.eps_avg;

  json summary;
  summary["scheme"] = result.summary.scheme;
  summary["T_ns"] = result.summary.t_ns;
  summary["total_propagations"] = result.summary.total_propagations;
  summary["eps_C"] = result.summary.eps_c;
  summary["eps_pop"] = result.summary.eps_pop;
  summary["eps_avg"] = result.summary.eps_avg;
  summary["peak_n_cavity"] = result.peak_n_cavity;
  summary["krotov_iterations"] = result.krotov_iterations;
  summary["krotov_converged"] = result.krotov_converged;
  summary["simplex_evaluations"] = result.simplex_evaluations;
  write_text((dir / "summary.json").string(), summary.dump(2) + "\n");

  return result;
}

RunSummary read_summary(const std::string& run_dir) {
  std::ifstream in(fs::path(run_dir) / "summary.json");
  if (!in) throw StageError("no summary.json in " + run_dir);
  json j;
  in >> j;
  RunSummary s;
  s.scheme = j.at("scheme").get<std::string>();
  s.t_ns = j.at("T_ns").get<double>();
  s.total_propagations = j.at("total_propagations").get<long>();
  s.eps_c = j.at("eps_C").get<double>();
  s.eps_pop = j.at("eps_pop").get<double>();
  s.eps_avg = j.at("eps_avg").get<double>();
  return s;
}

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

std::string report_table(const std::vector<RunSummary>& rows) {
  if (rows.empty()) throw std::invalid_argument("report: no summaries");
  std::ostringstream os;
  os << std::left << std::setw(14) << "scheme" << std::right << std::setw(8) << "T [ns]"
     << std::setw(8) << "prop." << std::setw(12) << "eps_C" << std::setw(12) << "eps_pop"
     << std::setw(12) << "eps_avg" << "\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.scheme << std::right << std::setw(8) << std::fixed
       << std::setprecision(1) << r.t_ns << std::setw(8) << r.total_propagations << std::setw(12)
       << sci(r.eps_c) << std::setw(12) << sci(r.eps_pop) << std::setw(12) << sci(r.eps_avg)
       << "\n";
  }
  return os.str();
}

std::string report_csv(const std::vector<RunSummary>& rows) {
  if (rows.empty()) throw std::invalid_argument("report: no summaries");
  std::ostringstream os;
  os << "scheme,T_ns,propagations,eps_C,eps_pop,eps_avg\n";
  for (const auto& r : rows) {
    os << r.scheme << "," << r.t_ns << "," << r.total_propagations << "," << csv_num(r.eps_c)
       << "," << csv_num(r.eps_pop) << "," << csv_num(r.eps_avg) << "\n";
  }
  return os.str();
}

}  // namespace qgate
