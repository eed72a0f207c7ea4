#pragma once

#include <vector>

#include "qgate/functionals.hpp"
#include "qgate/nelder_mead.hpp"
#include "qgate/propagator.hpp"
#include "qgate/pulse.hpp"
#include "qgate/system.hpp"

namespace qgate {

// Gradient-free search over the analytic pulse parameters (E0, T) against
// J_diag + J_gamma + T/T0.
struct SimplexConfig {
  AnalyticPulseParams initial;
  double spread_e0_mhz = 0.0;  // <= 0 selects the default 0.1 * E0
  double spread_t_ns = 0.0;    // <= 0 selects the default 0.05 * T
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_evaluations = 300;
  double tolerance = 1e-6;  // best-worst functional spread
  double t0_ns = 200.0;     // duration penalty scale

  void validate() const;
};

struct CandidateEvaluation {
  int eval = 0;  // 1-based index over propagated evaluations
  AnalyticPulseParams params;
  double t_grid_ns = 0.0;  // realized duration n_steps * dt
  FunctionalValue value;   // J_splx with parts
  Gate gate = Gate::Identity();
  double eps_c = 1.0;
  double eps_pop = 0.0;
};

// Samples the analytic pulse, propagates the four logical states (one
// propagation unit in the run bookkeeping), and evaluates J_splx.
CandidateEvaluation evaluate_candidate(const AnalyticPulseParams& params,
                                       const SystemOperators& sys, const DriveHamiltonian& ham,
                                       double dt, double t0_ns = 200.0,
                                       const PropagatorOptions& opt = {});

struct SimplexOutcome {
  AnalyticPulseParams best;
  ControlField best_field;
  double best_j = 0.0;
  FunctionalValue best_value;
  Gate best_gate = Gate::Identity();
  std::vector<CandidateEvaluation> log;  // one row per propagated evaluation
  long propagation_units = 0;            // == log.size()
  int evaluations = 0;                   // including barrier rejections
  bool converged = false;
};

// Nelder-Mead over (E0, T). Candidates with E0 <= 0 or T <= dt receive +inf
// without being propagated. Variable T is handled with fixed dt and
// n_steps = round(T/dt).
SimplexOutcome run_simplex(const SimplexConfig& config, const SystemOperators& sys,
                           const DriveHamiltonian& ham, double dt,
                           const PropagatorOptions& opt = {});

}  // namespace qgate
