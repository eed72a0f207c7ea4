#include "qgate/krotov.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qgate/gate_analysis.hpp"
#include "qgate/parallel.hpp"

namespace qgate {

void KrotovConfig::validate() const {
  if (lambda_a <= 0) throw ConfigError("krotov.lambda_a: must be > 0");
  if (epsilon_a < 0) throw ConfigError("krotov.epsilon_a: must be >= 0");
  if (max_iterations < 0) throw ConfigError("krotov.max_iterations: must be >= 0");
  if (convergence_ratio <= 0) throw ConfigError("krotov.convergence_ratio: must be > 0");
  if (monotonic_tolerance < 0) throw ConfigError("krotov.monotonic_tolerance: must be >= 0");
  if (memory_budget_mb <= 0) throw ConfigError("krotov.memory_budget_mb: must be > 0");
}

double compute_sigma(const std::array<Vec, 4>& chi_final,
                     const std::array<Vec, 4>& delta_phi_final, double delta_j,
                     double epsilon_a) {
  double denom = 0.0;
  double overlap = 0.0;
  for (int k = 0; k < 4; ++k) {
    denom += delta_phi_final[k].squaredNorm();
    overlap += chi_final[k].dot(delta_phi_final[k]).real();
  }
  if (denom <= 0.0 || !std::isfinite(denom)) return -epsilon_a;
  const double a = (2.0 * overlap + delta_j) / denom;
  return -std::max(epsilon_a, 2.0 * a + epsilon_a);
}

namespace {

// Co-state trajectory from one backward pass, read back in ascending grid
// order during the update sweep. Stores every point when the memory budget
// allows (stride 1); otherwise keeps checkpoints every `stride` points and
// regenerates one segment at a time by re-propagating from the checkpoint
// at the segment's upper end (one extra backward pass in total).
class CostateTrajectory {
 public:
  CostateTrajectory(const DriveHamiltonian& ham, const PropagatorOptions& opt,
                    const ControlField& field, const Vec& boundary, int stride)
      : ham_(&ham), opt_(opt), field_(&field), stride_(std::max(1, stride)),
        n_(field.n_steps()) {
    ChebyshevStepper stepper(ham, opt_);
    Vec psi = boundary;
    if (stride_ == 1) {
      states_.resize(n_ + 1);
      states_[n_] = psi;
      for (int i = n_ - 1; i >= 0; --i) {
        stepper.step(psi, field.samples[i], -field.dt);
        states_[i] = psi;
      }
    } else {
      final_ = psi;
      checkpoints_.resize(n_ / stride_ + 1);
      for (int i = n_ - 1; i >= 0; --i) {
        stepper.step(psi, field.samples[i], -field.dt);
        if (i % stride_ == 0) checkpoints_[i / stride_] = psi;
      }
      segment_.resize(stride_ + 1);
      replay_ = std::make_unique<ChebyshevStepper>(ham, opt_);
    }
  }

  const Vec& at(int idx) {
    if (stride_ == 1) return states_[idx];
    const int seg = idx / stride_;
    if (seg != current_segment_) load_segment(seg);
    return segment_[idx - seg * stride_];
  }

 private:
  void load_segment(int seg) {
    const int lo = seg * stride_;
    const int hi = std::min((seg + 1) * stride_, n_);
    Vec psi = hi == n_ && n_ % stride_ != 0 ? final_ : checkpoint(hi);
    segment_[hi - lo] = psi;
    for (int i = hi - 1; i >= lo; --i) {
      replay_->step(psi, field_->samples[i], -field_->dt);
      segment_[i - lo] = psi;
    }
    current_segment_ = seg;
  }

  const Vec& checkpoint(int grid_index) const {
    if (grid_index == n_ && n_ % stride_ != 0) return final_;
    return checkpoints_[grid_index / stride_];
  }

  const DriveHamiltonian* ham_;
  PropagatorOptions opt_;
  const ControlField* field_;
  int stride_;
  int n_;
  std::vector<Vec> states_;       // stride 1
  std::vector<Vec> checkpoints_;  // strided
  Vec final_;
  std::vector<Vec> segment_;
  int current_segment_ = -1;
  std::unique_ptr<ChebyshevStepper> replay_;
};

double safe_eps_c(const Gate& u) {
  for (int k = 0; k < 4; ++k)
    if (std::abs(u(k, k)) <= 1e-12) return 1.0;  // phase undefined, no entanglement credit
  return 1.0 - nonlocal_phase(u).second;
}

}  // namespace

KrotovOptimizer::KrotovOptimizer(const SystemOperators& sys, const DriveHamiltonian& ham,
                                 const GateFunctional& functional, ControlField guess,
                                 KrotovConfig config, PropagatorOptions prop_options)
    : sys_(&sys), ham_(&ham), functional_(&functional), field_(std::move(guess)),
      config_(config), prop_options_(prop_options) {
  config_.validate();
  if (field_.n_steps() < 2) throw std::invalid_argument("krotov: field needs >= 2 samples");
  const double edge_tol = 1e-6 * std::max(field_.max_abs(), 1e-30);
  if (std::abs(field_.samples.front()) > edge_tol || std::abs(field_.samples.back()) > edge_tol)
    throw std::invalid_argument("krotov: field endpoints must be zero");
  shape_ = default_shape(field_);
  evaluate_initial();
}

void KrotovOptimizer::evaluate_initial() {
  auto trajs = propagate_logical_states(*ham_, sys_->logical, field_, 0, prop_options_);
  for (int k = 0; k < 4; ++k) finals_[k] = std::move(trajs[k].final_state);
  gate_ = gate_from_finals(finals_, sys_->logical);
  const FunctionalValue v = functional_->evaluate(gate_);
  j_current_ = v.total;
  parts_ = diagonal_parts(gate_);
  sigma_ = config_.sigma_enabled ? config_.resume_sigma.value_or(-config_.epsilon_a) : 0.0;
}

IterationRow KrotovOptimizer::iterate() {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = field_.n_steps();
  const int dim = ham_->dim();
  const LogicalBasis& logical = sys_->logical;

  // Storage plan for the four co-state trajectories.
  const double full_bytes = 4.0 * (n + 1) * dim * sizeof(Complex);
  const int stride = full_bytes <= config_.memory_budget_mb * 1048576.0
                         ? 1
                         : static_cast<int>(std::ceil(std::sqrt(double(n + 1))));

  std::array<Vec, 4> boundary;
  {
    const auto chi4 = functional_->costate_boundary(gate_);
    for (int k = 0; k < 4; ++k) boundary[k] = logical.embed(chi4[k]);
  }

  std::array<std::unique_ptr<CostateTrajectory>, 4> chi;
  parallel_for(4, [&](int k) {
    chi[k] = std::make_unique<CostateTrajectory>(*ham_, prop_options_, field_, boundary[k],
                                                 stride);
  });

  // Forward sweep: update both quadratures at each step from the
  // co-state/state overlaps, then step the new states under the updated
  // field. The old states are propagated alongside for the sigma term.
  const bool use_sigma = config_.sigma_enabled;
  const double sigma = sigma_;
  ControlField new_field = field_;
  std::array<Vec, 4> phi_new, phi_old;
  std::array<std::unique_ptr<ChebyshevStepper>, 4> steppers;
  std::array<Vec, 4> work;
  for (int k = 0; k < 4; ++k) {
    phi_new[k] = logical.basis_state(k);
    if (use_sigma) phi_old[k] = phi_new[k];
    steppers[k] = std::make_unique<ChebyshevStepper>(*ham_, prop_options_);
    work[k].resize(dim);
  }

  std::array<double, 4> gx{}, gy{};
  const double dt = field_.dt;
  std::atomic<bool> abort{false};
  std::array<std::exception_ptr, 5> errors;  // one slot per state lane + update
  const int nt = std::min(4, thread_cap());

#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
#endif
  {
    for (int i = 0; i < n && !abort; ++i) {
#ifdef _OPENMP
#pragma omp for
#endif
      for (int k = 0; k < 4; ++k) {
        try {
          const Vec& chi_i = chi[k]->at(i);
          work[k].noalias() = sys_->drive_re * phi_new[k];
          gx[k] = chi_i.dot(work[k]).imag();
          if (use_sigma) gx[k] -= 0.5 * sigma * phi_old[k].dot(work[k]).imag();
          work[k].noalias() = sys_->drive_im * phi_new[k];
          gy[k] = chi_i.dot(work[k]).imag();
          if (use_sigma) gy[k] -= 0.5 * sigma * phi_old[k].dot(work[k]).imag();
        } catch (...) {
          errors[k] = std::current_exception();
          abort = true;
        }
      }
#ifdef _OPENMP
#pragma omp single
#endif
      {
        if (!abort) {
          const double pref = shape_.samples[i] / config_.lambda_a * kMHzToRadPerNs;
          const double dx = pref * (gx[0] + gx[1] + gx[2] + gx[3]);
          const double dy = pref * (gy[0] + gy[1] + gy[2] + gy[3]);
          if (!std::isfinite(dx) || !std::isfinite(dy)) {
            errors[4] = std::make_exception_ptr(
                StageError("krotov iteration " + std::to_string(iteration_ + 1) +
                           ": NaN in field update at step " + std::to_string(i)));
            abort = true;
          } else {
            new_field.samples[i] = field_.samples[i] + Complex(dx, dy);
          }
        }
      }
#ifdef _OPENMP
#pragma omp for
#endif
      for (int k = 0; k < 4; ++k) {
        if (abort) continue;
        try {
          steppers[k]->step(phi_new[k], new_field.samples[i], dt);
          if (use_sigma) steppers[k]->step(phi_old[k], field_.samples[i], dt);
        } catch (...) {
          errors[k] = std::current_exception();
          abort = true;
        }
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const Gate gate_new = gate_from_finals(phi_new, logical);
  const FunctionalValue v_new = functional_->evaluate(gate_new);
  const double delta_j = v_new.total - j_current_;
  if (!std::isfinite(v_new.total))
    throw StageError("krotov iteration " + std::to_string(iteration_ + 1) +
                     ": functional is not finite");
  if (delta_j > config_.monotonic_tolerance)
    throw StageError("krotov iteration " + std::to_string(iteration_ + 1) +
                     ": functional increased by " + std::to_string(delta_j) +
                     " (lambda_a too small or sigma mis-set)");

  double sigma_next = 0.0;
  if (use_sigma) {
    std::array<Vec, 4> delta_phi;
    for (int k = 0; k < 4; ++k) delta_phi[k] = phi_new[k] - finals_[k];
    sigma_next = compute_sigma(boundary, delta_phi, delta_j, config_.epsilon_a);
  }

  field_ = std::move(new_field);
  for (int k = 0; k < 4; ++k) finals_[k] = std::move(phi_new[k]);
  gate_ = gate_new;
  parts_ = diagonal_parts(gate_);
  const double sigma_used = sigma_;
  sigma_ = sigma_next;
  j_current_ = v_new.total;
  ++iteration_;
  propagation_units_ += 2;
  wall_seconds_ +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  IterationRow row;
  row.iteration = iteration_;
  row.j_total = j_current_;
  row.j_diag = parts_.j_diag;
  row.j_gamma = parts_.j_gamma;
  row.delta_j = delta_j;
  row.sigma = sigma_used;
  row.eps_c = safe_eps_c(gate_);
  row.eps_pop = population_loss(gate_);
  row.propagation_units = propagation_units_;
  row.wall_seconds = wall_seconds_;
  return row;
}

OptimizationRecord KrotovOptimizer::run() {
  OptimizationRecord rec;
  rec.initial_j = j_current_;
  for (int i = 0; i < config_.max_iterations; ++i) {
    IterationRow row = iterate();
    rec.rows.push_back(row);
    if (std::abs(row.delta_j) / std::max(j_current_, 1e-15) < config_.convergence_ratio) {
      rec.converged = true;
      break;
    }
  }
  rec.sigma_next = sigma_;
  rec.final_gate = gate_;
  rec.propagation_units = propagation_units_;
  return rec;
}

std::pair<ControlField, OptimizationRecord> run_krotov(const SystemOperators& sys,
                                                       const DriveHamiltonian& ham,
                                                       const GateFunctional& functional,
                                                       const ControlField& guess,
                                                       const KrotovConfig& config,
                                                       const PropagatorOptions& opt) {
  KrotovOptimizer optimizer(sys, ham, functional, guess, config, opt);
  OptimizationRecord rec = optimizer.run();
  return {optimizer.field(), std::move(rec)};
}

}  // namespace qgate
