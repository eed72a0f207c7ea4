#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qgate/functionals.hpp"
#include "qgate/propagator.hpp"
#include "qgate/pulse.hpp"
#include "qgate/system.hpp"

namespace qgate {

struct KrotovConfig {
  double lambda_a = 100.0;    // update step-size scaling, > 0
  double epsilon_a = 1e-4;    // floor of the second-order sigma, >= 0
  bool sigma_enabled = true;  // include the sigma(t) second-order term
  int max_iterations = 1000;
  double convergence_ratio = 1e-4;    // stop when |dJ|/max(J, 1e-15) falls below
  double monotonic_tolerance = 1e-9;  // error out if J increases by more
  double memory_budget_mb = 4096.0;   // co-state trajectory storage budget
  std::optional<double> resume_sigma;  // sigma seed when continuing a dumped run

  void validate() const;
};

// One row of the convergence log. Propagation units follow the paper's
// bookkeeping: two per iteration (one backward + one forward set of four
// states); checkpoint-replay propagations are an implementation detail and
// are not counted.
struct IterationRow {
  int iteration = 0;
  double j_total = 0.0;
  double j_diag = 0.0;
  double j_gamma = 0.0;
  double delta_j = 0.0;
  double sigma = 0.0;  // sigma used in this iteration's update
  double eps_c = 0.0;
  double eps_pop = 0.0;
  long propagation_units = 0;  // cumulative
  double wall_seconds = 0.0;   // cumulative
};

struct OptimizationRecord {
  double initial_j = 0.0;
  std::vector<IterationRow> rows;
  bool converged = false;
  double sigma_next = 0.0;  // seed to resume with after the last row
  Gate final_gate = Gate::Identity();
  long propagation_units = 0;
};

// sigma = -max(eps_A, 2A + eps_A) with
// A = [2 sum_k Re<chi_k(T)|dphi_k(T)> + dJ_T] / sum_k ||dphi_k(T)||^2,
// from the most recent completed iteration; -eps_A if the denominator
// vanishes (no second-order information).
double compute_sigma(const std::array<Vec, 4>& chi_final,
                     const std::array<Vec, 4>& delta_phi_final, double delta_j,
                     double epsilon_a);

// Iterative Krotov optimizer over a complex control envelope. Each
// iteration backward-propagates the co-states under the current field and
// then sweeps forward, updating both quadratures of the field from the
// co-state/state overlap at each step and immediately propagating the new
// states under the updated field (sequential scheme).
class KrotovOptimizer {
 public:
  KrotovOptimizer(const SystemOperators& sys, const DriveHamiltonian& ham,
                  const GateFunctional& functional, ControlField guess,
                  KrotovConfig config, PropagatorOptions prop_options = {});

  // One full iteration; throws StageError (with the iteration index) on a
  // non-monotonic step beyond tolerance or a NaN in the update.
  IterationRow iterate();

  // Runs until |dJ|/J < convergence_ratio or max_iterations.
  OptimizationRecord run();

  const ControlField& field() const { return field_; }
  const Gate& gate() const { return gate_; }
  double current_j() const { return j_current_; }
  double sigma_next() const { return sigma_; }

 private:
  const SystemOperators* sys_;
  const DriveHamiltonian* ham_;
  const GateFunctional* functional_;
  ControlField field_;
  ShapeFunction shape_;
  KrotovConfig config_;
  PropagatorOptions prop_options_;

  Gate gate_ = Gate::Identity();
  double j_current_ = 0.0;
  FunctionalParts parts_;
  std::array<Vec, 4> finals_;
  double sigma_ = 0.0;
  int iteration_ = 0;
  long propagation_units_ = 0;
  double wall_seconds_ = 0.0;

  void evaluate_initial();
};

std::pair<ControlField, OptimizationRecord> run_krotov(const SystemOperators& sys,
                                                       const DriveHamiltonian& ham,
                                                       const GateFunctional& functional,
                                                       const ControlField& guess,
                                                       const KrotovConfig& config,
                                                       const PropagatorOptions& opt = {});

}  // namespace qgate
