#include "qgate/simplex.hpp"

#include <cmath>
#include <limits>

#include "qgate/gate_analysis.hpp"

namespace qgate {

void SimplexConfig::validate() const {
  initial.validate();
  NelderMeadOptions nm{reflection, expansion, contraction, shrink, max_evaluations, tolerance};
  nm.validate();
  if (t0_ns <= 0) throw ConfigError("simplex.t0_ns: must be > 0");
}

CandidateEvaluation evaluate_candidate(const AnalyticPulseParams& params,
                                       const SystemOperators& sys, const DriveHamiltonian& ham,
                                       double dt, double t0_ns, const PropagatorOptions& opt) {
  if (params.peak_amplitude_mhz <= 0 || params.duration_ns <= dt)
    throw std::invalid_argument("evaluate_candidate: parameters must be positive");
  CandidateEvaluation ev;
  ev.params = params;
  ControlField field = sample_analytic(params, dt, sys.params.envelope_scale);
  ev.t_grid_ns = field.duration();
  auto trajs = propagate_logical_states(ham, sys.logical, field, 0, opt);
  std::array<Vec, 4> finals;
  for (int k = 0; k < 4; ++k) finals[k] = std::move(trajs[k].final_state);
  ev.gate = gate_from_finals(finals, sys.logical);
  ev.value = eval_splx(ev.gate, ev.t_grid_ns, t0_ns);
  ev.eps_pop = population_loss(ev.gate);
  ev.eps_c = 1.0;
  bool phases_defined = true;
  for (int k = 0; k < 4; ++k)
    if (std::abs(ev.gate(k, k)) <= 1e-12) phases_defined = false;
  if (phases_defined) ev.eps_c = 1.0 - nonlocal_phase(ev.gate).second;
  return ev;
}

SimplexOutcome run_simplex(const SimplexConfig& config, const SystemOperators& sys,
                           const DriveHamiltonian& ham, double dt,
                           const PropagatorOptions& opt) {
  config.validate();
  SimplexOutcome out;

  const double spread_e0 =
      config.spread_e0_mhz > 0 ? config.spread_e0_mhz : 0.1 * config.initial.peak_amplitude_mhz;
  const double spread_t =
      config.spread_t_ns > 0 ? config.spread_t_ns : 0.05 * config.initial.duration_ns;

  auto objective = [&](const std::vector<double>& x) {
    // Positivity barrier; rejected candidates are never propagated.
    if (x[0] <= 0.0 || x[1] <= dt) return std::numeric_limits<double>::infinity();
    CandidateEvaluation ev =
        evaluate_candidate({x[0], x[1]}, sys, ham, dt, config.t0_ns, opt);
    ev.eval = static_cast<int>(out.log.size()) + 1;
    out.log.push_back(ev);
    return ev.value.total;
  };

  NelderMeadOptions nm{config.reflection, config.expansion,      config.contraction,
                       config.shrink,     config.max_evaluations, config.tolerance};
  NelderMeadResult res =
      nelder_mead(objective, {config.initial.peak_amplitude_mhz, config.initial.duration_ns},
                  {spread_e0, spread_t}, nm);

  out.evaluations = res.evaluations;
  out.propagation_units = static_cast<long>(out.log.size());
  out.converged = res.converged;
  out.best = {res.best_x[0], res.best_x[1]};
  out.best_j = res.best_f;
  for (const auto& row : out.log) {
    if (row.value.total == res.best_f && row.params.peak_amplitude_mhz == res.best_x[0] &&
        row.params.duration_ns == res.best_x[1]) {
      out.best_value = row.value;
      out.best_gate = row.gate;
    }
  }
  out.best_field = sample_analytic(out.best, dt, sys.params.envelope_scale);
  return out;
}

}  // namespace qgate
