#pragma once

#include <vector>

#include "qgate/pulse.hpp"
#include "qgate/system.hpp"
#include "qgate/types.hpp"

namespace qgate {

struct PropagatorOptions {
  double expansion_tol = 1e-14;  // per-step truncation of the polynomial expansion
  int max_order = 256;
};

// H(eps) = H0 + kMHzToRadPerNs*(Re eps * Hre + Im eps * Him), stored as a
// single merged CSR pattern with three value arrays so the per-step
// assembly and matrix-vector product stream memory once. Also carries
// per-row Gershgorin data for rigorous spectral enclosures.
class DriveHamiltonian {
 public:
  DriveHamiltonian(const SpMat& h0, const SpMat& hre, const SpMat& him);
  explicit DriveHamiltonian(const SystemOperators& sys)
      : DriveHamiltonian(sys.drift, sys.drive_re, sys.drive_im) {}

  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(cols_.size()); }

  void assemble(Complex eps_mhz, std::vector<Complex>& values) const;
  void apply(const std::vector<Complex>& values, const Complex* x, Complex* y) const;
  // Gershgorin enclosure of the spectrum of H(eps), rad/ns.
  void spectral_bounds(Complex eps_mhz, double& emin, double& emax) const;

 private:
  int dim_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<Complex> v0_, vre_, vim_;
  // Gershgorin: real diagonal of H0 plus per-row off-diagonal magnitude sums.
  std::vector<double> diag_, offsum0_, offsum_re_, offsum_im_;
};

// Applies exp(-i H(eps) tau) to a state via a Chebyshev expansion of the
// matrix exponential acting on the vector; tau < 0 propagates backward.
// Exact for piecewise-constant H up to the expansion tolerance. One
// instance per thread (owns scratch buffers).
class ChebyshevStepper {
 public:
  ChebyshevStepper(const DriveHamiltonian& ham, PropagatorOptions opt = {});

  void step(Vec& psi, Complex eps_mhz, double tau);
  int last_order() const { return last_order_; }

 private:
  const DriveHamiltonian* ham_;
  PropagatorOptions opt_;
  std::vector<Complex> values_;
  Vec phi0_, phi1_, phi2_, acc_;
  std::vector<double> bessel_, bessel_scratch_;
  int last_order_ = 0;
};

// Fills out[0..kmax] with Bessel J_k(z), z >= 0, by downward (Miller)
// recurrence normalized with J0 + 2*sum J_{2k} = 1.
void bessel_j_array(double z, int kmax, std::vector<double>& out,
                    std::vector<double>& scratch);

// One forward- or backward-propagated state with optional storage at grid
// points t_0..t_N. store_stride 0 keeps only the boundary state; k >= 1
// stores every k-th grid point plus both ends.
struct Trajectory {
  double dt = 0.0;
  int n_steps = 0;
  bool forward = true;
  std::vector<int> stored_indices;
  std::vector<Vec> states;
  Vec final_state;  // state at t=T (forward) or t=0 (backward)
};

Trajectory propagate_forward(const DriveHamiltonian& ham, const ControlField& field,
                             const Vec& initial, int store_stride = 0,
                             const PropagatorOptions& opt = {});

// Backward propagation of a co-state from t=T to t=0 under H^dag = H; the
// boundary value is not renormalized (it is generally non-unit).
Trajectory propagate_backward(const DriveHamiltonian& ham, const ControlField& field,
                              const Vec& final_costate, int store_stride = 0,
                              const PropagatorOptions& opt = {});

// Propagates the four logical basis states concurrently (independent
// trajectories, shared immutable operators).
std::array<Trajectory, 4> propagate_logical_states(const DriveHamiltonian& ham,
                                                   const LogicalBasis& logical,
                                                   const ControlField& field,
                                                   int store_stride = 0,
                                                   const PropagatorOptions& opt = {});

struct ExpectationPoint {
  double t;
  double mean;
  double std_dev;
};

// <O>(t) and sigma_O(t) over the stored points of a trajectory; O Hermitian.
std::vector<ExpectationPoint> expectation_series(const Trajectory& traj, const SpMat& observable);

// |<state index idx|psi(t)>|^2 over the stored points.
std::vector<std::pair<double, double>> population_series(const Trajectory& traj, int idx);

// |<ref|psi(t)>|^2 over the stored points.
std::vector<std::pair<double, double>> overlap_series(const Trajectory& traj, const Vec& ref);

}  // namespace qgate
