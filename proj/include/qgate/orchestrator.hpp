#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qgate/config.hpp"
#include "qgate/gate_analysis.hpp"
#include "qgate/krotov.hpp"
#include "qgate/simplex.hpp"
#include "qgate/system.hpp"

namespace qgate {

enum class Scheme { propagate, direct_sm, direct_geo, simplex, hybrid_sm, hybrid_geo };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct RunConfig {
  SystemParams system;
  std::optional<AnalyticPulseParams> analytic_pulse;
  std::string pulse_file;  // exactly one of analytic_pulse / pulse_file
  Scheme scheme = Scheme::propagate;
  KrotovConfig krotov;
  std::optional<bool> sigma_override;  // default: on for geo, off for sm
  SimplexConfig simplex;
  PropagatorOptions propagator;
  double dt_ns = 0.01;
  std::string output_dir = "runs";
  std::uint64_t seed = 0;
  int dynamics_stride = 10;  // grid stride of the dynamics dump
  bool has_krotov_section = false;
  bool has_simplex_section = false;

  void validate() const;
};

RunConfig load_run_config(const IniFile& ini);

// Named truncation profiles: "reduced" (3 qubit levels, 15 cavity levels,
// dt = 0.05 ns) for CI-scale runs, "full" (6, 70, dt = 0.01 ns).
void apply_preset(RunConfig& config, const std::string& preset);

IniFile config_snapshot(const RunConfig& config);

// One row of the comparison table.
struct RunSummary {
  std::string scheme;
  double t_ns = 0.0;
  long total_propagations = 0;  // simplex evaluations + 2 x Krotov iterations
  double eps_c = 0.0;
  double eps_pop = 0.0;
  double eps_avg = 0.0;
};

struct RunResult {
  RunSummary summary;
  std::string run_dir;
  GateMetrics metrics;
  double peak_n_cavity = 0.0;
  int krotov_iterations = 0;
  long simplex_evaluations = 0;
  bool krotov_converged = false;
};

// Executes the configured scheme and writes all artifacts into
// <output_dir>/<scheme>-<timestamp>/ (or the explicit directory when
// given): config.snapshot, pulse_initial.dat, pulse_final.dat,
// convergence.csv, simplex_evals.csv, metrics.json, dynamics_00.csv,
// summary.json.
RunResult run(const RunConfig& config, const std::string& explicit_run_dir = "");

RunSummary read_summary(const std::string& run_dir);  // from summary.json

std::string report_table(const std::vector<RunSummary>& rows);  // aligned text
std::string report_csv(const std::vector<RunSummary>& rows);

}  // namespace qgate
