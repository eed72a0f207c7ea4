#include "qgate/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qgate/parallel.hpp"

namespace qgate {

namespace {

// Collects a row-major view of a sparse matrix into per-row (col, value) maps.
void scatter_rows(const SpMat& m, std::vector<std::map<int, std::array<Complex, 3>>>& rows,
                  int slot) {
  SpMat rm = m;  // already row-major by type
  rm.makeCompressed();
  for (int i = 0; i < rm.outerSize(); ++i)
    for (SpMat::InnerIterator it(rm, i); it; ++it)
      rows[it.row()][it.col()][slot] += it.value();
}

}  // namespace

DriveHamiltonian::DriveHamiltonian(const SpMat& h0, const SpMat& hre, const SpMat& him) {
  dim_ = static_cast<int>(h0.rows());
  if (h0.cols() != dim_ || hre.rows() != dim_ || hre.cols() != dim_ || him.rows() != dim_ ||
      him.cols() != dim_)
    throw std::invalid_argument("DriveHamiltonian: operator dimensions disagree");

  std::vector<std::map<int, std::array<Complex, 3>>> rows(dim_);
  scatter_rows(h0, rows, 0);
  scatter_rows(hre, rows, 1);
  scatter_rows(him, rows, 2);

  row_ptr_.assign(dim_ + 1, 0);
  diag_.assign(dim_, 0.0);
  offsum0_.assign(dim_, 0.0);
  offsum_re_.assign(dim_, 0.0);
  offsum_im_.assign(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    row_ptr_[i] = static_cast<int>(cols_.size());
    for (const auto& [col, vals] : rows[i]) {
      cols_.push_back(col);
      v0_.push_back(vals[0]);
      vre_.push_back(vals[1]);
      vim_.push_back(vals[2]);
      if (col == i) {
        diag_[i] = vals[0].real();
      } else {
        offsum0_[i] += std::abs(vals[0]);
      }
      offsum_re_[i] += std::abs(vals[1]) * kMHzToRadPerNs;
      offsum_im_[i] += std::abs(vals[2]) * kMHzToRadPerNs;
    }
  }
  row_ptr_[dim_] = static_cast<int>(cols_.size());
}

void DriveHamiltonian::assemble(Complex eps_mhz, std::vector<Complex>& values) const {
  const double cx = kMHzToRadPerNs * eps_mhz.real();
  const double cy = kMHzToRadPerNs * eps_mhz.imag();
  const size_t n = cols_.size();
  values.resize(n);
  for (size_t p = 0; p < n; ++p) values[p] = v0_[p] + cx * vre_[p] + cy * vim_[p];
}

void DriveHamiltonian::apply(const std::vector<Complex>& values, const Complex* x,
                             Complex* y) const {
  for (int i = 0; i < dim_; ++i) {
    Complex acc(0.0, 0.0);
    const int end = row_ptr_[i + 1];
    for (int p = row_ptr_[i]; p < end; ++p) acc += values[p] * x[cols_[p]];
    y[i] = acc;
  }
}

void DriveHamiltonian::spectral_bounds(Complex eps_mhz, double& emin, double& emax) const {
  const double ax = std::abs(eps_mhz.real());
  const double ay = std::abs(eps_mhz.imag());
  emin = std::numeric_limits<double>::max();
  emax = std::numeric_limits<double>::lowest();
  for (int i = 0; i < dim_; ++i) {
    double r = offsum0_[i] + ax * offsum_re_[i] + ay * offsum_im_[i];
    emin = std::min(emin, diag_[i] - r);
    emax = std::max(emax, diag_[i] + r);
  }
}

void bessel_j_array(double z, int kmax, std::vector<double>& out, std::vector<double>& scratch) {
  out.assign(kmax + 1, 0.0);
  if (z < 1e-12) {
    out[0] = 1.0;
    if (kmax >= 1) out[1] = 0.5 * z;
    return;
  }
  const int m = kmax + 22 + static_cast<int>(z);
  scratch.assign(m + 2, 0.0);
  scratch[m + 1] = 0.0;
  scratch[m] = 1e-280;
  for (int k = m; k >= 1; --k) {
    scratch[k - 1] = (2.0 * k / z) * scratch[k] - scratch[k + 1];
    if (std::abs(scratch[k - 1]) > 1e240) {
      for (int j = k - 1; j <= m + 1; ++j) scratch[j] *= 1e-240;
    }
  }
  double norm = scratch[0];
  for (int k = 2; k <= m; k += 2) norm += 2.0 * scratch[k];
  for (int k = 0; k <= kmax; ++k) out[k] = scratch[k] / norm;
}

ChebyshevStepper::ChebyshevStepper(const DriveHamiltonian& ham, PropagatorOptions opt)
    : ham_(&ham), opt_(opt) {
  phi0_.resize(ham.dim());
  phi1_.resize(ham.dim());
  phi2_.resize(ham.dim());
  acc_.resize(ham.dim());
}

void ChebyshevStepper::step(Vec& psi, Complex eps_mhz, double tau) {
  if (psi.size() != ham_->dim()) throw std::invalid_argument("step: state dimension mismatch");
  ham_->assemble(eps_mhz, values_);

  double emin, emax;
  ham_->spectral_bounds(eps_mhz, emin, emax);
  const double center = 0.5 * (emax + emin);
  double radius = 0.5 * (emax - emin) * 1.01 + 1e-14;
  const double z = std::abs(tau) * radius;

  // Smallest expansion order whose coefficient tail is below tolerance.
  // int(z) + 40 always suffices given the superexponential coefficient
  // decay beyond k = z, so the probe stays cheap for small steps.
  const int k_probe = static_cast<int>(z) + 40;
  bessel_j_array(z, k_probe, bessel_, bessel_scratch_);
  suffix_.assign(k_probe + 2, 0.0);
  for (int k = k_probe; k >= 0; --k) suffix_[k] = suffix_[k + 1] + 2.0 * std::abs(bessel_[k]);
  int required = -1;
  for (int k = 1; k <= k_probe; ++k) {
    if (suffix_[k + 1] < opt_.expansion_tol) {
      required = k;
      break;
    }
  }
  if (required < 0 || required > opt_.max_order) {
    throw StageError("matrix-exponential expansion did not converge: required order " +
                     (required < 0 ? ">" + std::to_string(k_probe) : std::to_string(required)) +
                     ", allowed " + std::to_string(opt_.max_order));
  }
  const int order = required;
  last_order_ = order;

  const Complex ipw = tau > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
  const double inv_r = 1.0 / radius;

  // Chebyshev recurrence phi_{k+1} = 2*Htilde*phi_k - phi_{k-1} with
  // Htilde = (H - center)/radius.
  phi0_ = psi;
  ham_->apply(values_, phi0_.data(), phi1_.data());
  phi1_ = (phi1_ - center * phi0_) * inv_r;

  Complex coeff = 2.0 * ipw * bessel_[1];
  acc_ = bessel_[0] * phi0_ + coeff * phi1_;
  Complex ipk = ipw;
  for (int k = 2; k <= order; ++k) {
    ham_->apply(values_, phi1_.data(), phi2_.data());
    phi2_ = 2.0 * inv_r * (phi2_ - center * phi1_) - phi0_;
    ipk *= ipw;
    acc_ += (2.0 * ipk * bessel_[k]) * phi2_;
    phi0_.swap(phi1_);
    phi1_.swap(phi2_);
  }
  psi = std::exp(Complex(0.0, -center * tau)) * acc_;
}

namespace {

Trajectory propagate_impl(const DriveHamiltonian& ham, const ControlField& field,
                          const Vec& boundary, int store_stride, const PropagatorOptions& opt,
                          bool forward) {
  if (boundary.size() != ham.dim())
    throw std::invalid_argument("propagate: state dimension mismatch");
  const int n = field.n_steps();
  Trajectory traj;
  traj.dt = field.dt;
  traj.n_steps = n;
  traj.forward = forward;

  ChebyshevStepper stepper(ham, opt);
  Vec psi = boundary;
  auto maybe_store = [&](int grid_index) {
    if (store_stride <= 0) return;
    if (grid_index % store_stride == 0 || grid_index == n || grid_index == 0) {
      traj.stored_indices.push_back(grid_index);
      traj.states.push_back(psi);
    }
  };

  if (forward) {
    maybe_store(0);
    for (int i = 0; i < n; ++i) {
      stepper.step(psi, field.samples[i], field.dt);
      maybe_store(i + 1);
    }
  } else {
    maybe_store(n);
    for (int i = n - 1; i >= 0; --i) {
      stepper.step(psi, field.samples[i], -field.dt);
      maybe_store(i);
    }
    std::reverse(traj.stored_indices.begin(), traj.stored_indices.end());
    std::reverse(traj.states.begin(), traj.states.end());
  }
  traj.final_state = std::move(psi);
  return traj;
}

}  // namespace

Trajectory propagate_forward(const DriveHamiltonian& ham, const ControlField& field,
                             const Vec& initial, int store_stride, const PropagatorOptions& opt) {
  return propagate_impl(ham, field, initial, store_stride, opt, true);
}

Trajectory propagate_backward(const DriveHamiltonian& ham, const ControlField& field,
                              const Vec& final_costate, int store_stride,
                              const PropagatorOptions& opt) {
  return propagate_impl(ham, field, final_costate, store_stride, opt, false);
}

std::array<Trajectory, 4> propagate_logical_states(const DriveHamiltonian& ham,
                                                   const LogicalBasis& logical,
                                                   const ControlField& field, int store_stride,
                                                   const PropagatorOptions& opt) {
  std::array<Trajectory, 4> out;
  parallel_for(4, [&](int k) {
    out[k] = propagate_forward(ham, field, logical.basis_state(k), store_stride, opt);
  });
  return out;
}

std::vector<ExpectationPoint> expectation_series(const Trajectory& traj, const SpMat& observable) {
  std::vector<ExpectationPoint> series;
  series.reserve(traj.states.size());
  Vec tmp;
  for (size_t s = 0; s < traj.states.size(); ++s) {
    const Vec& psi = traj.states[s];
    if (psi.size() != observable.rows())
      throw std::invalid_argument("expectation_series: state/observable dimension mismatch");
    tmp = observable * psi;
    double mean = psi.dot(tmp).real();
    double second = tmp.squaredNorm();  // <O^2> for Hermitian O
    double var = std::max(0.0, second - mean * mean);
    series.push_back({traj.stored_indices[s] * traj.dt, mean, std::sqrt(var)});
  }
  return series;
}

std::vector<std::pair<double, double>> population_series(const Trajectory& traj, int idx) {
  std::vector<std::pair<double, double>> series;
  series.reserve(traj.states.size());
  for (size_t s = 0; s < traj.states.size(); ++s)
    series.emplace_back(traj.stored_indices[s] * traj.dt, std::norm(traj.states[s](idx)));
  return series;
}

std::vector<std::pair<double, double>> overlap_series(const Trajectory& traj, const Vec& ref) {
  std::vector<std::pair<double, double>> series;
  series.reserve(traj.states.size());
  for (size_t s = 0; s < traj.states.size(); ++s)
    series.emplace_back(traj.stored_indices[s] * traj.dt, std::norm(ref.dot(traj.states[s])));
  return series;
}

}  // namespace qgate
