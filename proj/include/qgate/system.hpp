#pragma once

#include <array>
#include <vector>

#include "qgate/types.hpp"

namespace qgate {

// Physical parameters of two transmons coupled through a shared resonator,
// plus the truncation of the numerical basis. Frequencies are linear:
// GHz for the mode/drive frequencies, MHz for anharmonicities and couplings.
struct SystemParams {
  double cavity_freq_ghz = 8.10;
  double qubit1_freq_ghz = 6.85;
  double qubit2_freq_ghz = 7.25;
  double drive_freq_ghz = 8.14;
  double anharmonicity1_mhz = -300.0;
  double anharmonicity2_mhz = -300.0;
  double coupling1_mhz = 70.0;
  double coupling2_mhz = 70.0;
  int qubit_levels = 6;
  int cavity_levels = 70;

  // Scale applied to the analytic lab-frame amplitude when sampling the
  // rotating-frame envelope. 0.5 is the rotating-wave value for a real
  // cos(w_d t) drive; calibrated against the guess-pulse dynamics.
  double envelope_scale = 0.5;

  int dimension() const { return qubit_levels * qubit_levels * cavity_levels; }
  void validate() const;  // throws ConfigError on bad truncation/frequencies
};

// CI-scale truncation profile (3 qubit levels, 15 cavity levels).
SystemParams reduced_params();

// Basis ordering is |q1> x |q2> x |n_cav> with the cavity index fastest:
// index = (q1*qubit_levels + q2)*cavity_levels + n.
inline int basis_index(const SystemParams& p, int q1, int q2, int n) {
  return (q1 * p.qubit_levels + q2) * p.cavity_levels + n;
}

// The four logical register states in the fixed order {00, 01, 10, 11}:
// the eigenstates of the drift Hamiltonian adiabatically connected to the
// bare |q1 q2> x |0_cav> product states (identical to them at zero
// coupling). The drift conserves the total excitation number, so each
// dressed state comes from an exact diagonalization of its small
// excitation sector; the gauge makes the bare component real positive.
struct LogicalBasis {
  std::array<int, 4> indices;   // bare anchor indices
  std::array<Vec, 4> states;    // orthonormal dressed vectors
  int dim = 0;

  explicit LogicalBasis(const SystemParams& p);

  Vec embed(const Vec4& logical) const;
  Vec4 project(const Vec& full) const;
  const Vec& basis_state(int k) const { return states[k]; }  // k in 0..3
};

// Operators of the driven system in the frame rotating at the drive
// frequency, in angular units (rad/ns).
struct SystemOperators {
  SystemParams params;
  SpMat drift;      // H0: detunings, anharmonicities, qubit-cavity coupling
  SpMat drive_re;   // a + a^dag
  SpMat drive_im;   // i(a^dag - a)
  SpMat n_cavity;   // number operators (dimensionless)
  SpMat n_qubit1;
  SpMat n_qubit2;
  LogicalBasis logical;
};

// H0 = sum_q [(w_q - w_d) b_q^dag b_q + (alpha_q/2) b_q^dag b_q^dag b_q b_q
//             + g_q (b_q^dag a + b_q a^dag)] + (w_c - w_d) a^dag a,
// all frequencies converted to rad/ns.
SpMat build_drift_hamiltonian(const SystemParams& params);

// Returns (H_re, H_im) with H_re = a + a^dag and H_im = i(a^dag - a), so
// that H(t) = H0 + kMHzToRadPerNs * [Re eps(t) H_re + Im eps(t) H_im]
// for an envelope eps in MHz. These are dH/deps for the two quadratures.
std::pair<SpMat, SpMat> build_drive_operators(const SystemParams& params);

SpMat build_number_operator(const SystemParams& params, int subsystem);  // 0=q1, 1=q2, 2=cavity

SystemOperators build_system(const SystemParams& params);

// max |M - M^dag| over entries, relative to max |M|; 0 for Hermitian input.
double hermiticity_defect(const SpMat& m);

}  // namespace qgate
