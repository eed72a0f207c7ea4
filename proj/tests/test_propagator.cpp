#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qgate/propagator.hpp"

using namespace qgate;

namespace {

SystemParams tiny_params() {
  SystemParams p;
  p.qubit_levels = 2;
  p.cavity_levels = 4;
  return p;
}

ControlField random_field(int n, double dt, double amp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  ControlField f;
  f.dt = dt;
  f.samples.resize(n);
  for (auto& s : f.samples) s = Complex(u(rng), u(rng));
  f.samples.front() = 0.0;
  f.samples.back() = 0.0;
  return f;
}

Vec random_state(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  return v;
}

}  // namespace

TEST_CASE("bessel array matches the standard library") {
  std::vector<double> j, scratch;
  for (double z : {1e-13, 0.03, 0.7, 2.5, 14.0, 55.0}) {
    bessel_j_array(z, 30, j, scratch);
    for (int k = 0; k <= 30; ++k) {
      double ref = std::cyl_bessel_j(k, z);
      CHECK(j[k] == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("merged operator matches the assembled sparse sum") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    Complex eps(g(rng) * 100.0, g(rng) * 100.0);
    SpMat full = sys.drift;
    full += SpMat((kMHzToRadPerNs * eps.real()) * sys.drive_re);
    full += SpMat((kMHzToRadPerNs * eps.imag()) * sys.drive_im);
    Vec x = random_state(ham.dim(), 10 + trial);
    Vec want = full * x;
    std::vector<Complex> values;
    ham.assemble(eps, values);
    Vec got(ham.dim());
    ham.apply(values, x.data(), got.data());
    CHECK((want - got).norm() <= 1e-12 * want.norm());
  }
}

TEST_CASE("chebyshev step matches the dense matrix exponential") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  ChebyshevStepper stepper(ham);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (double tau : {0.02, -0.02, 0.4}) {
    Complex eps(g(rng) * 150.0, g(rng) * 150.0);
    Eigen::MatrixXcd h = Eigen::MatrixXcd(sys.drift) +
                         kMHzToRadPerNs * eps.real() * Eigen::MatrixXcd(sys.drive_re) +
                         kMHzToRadPerNs * eps.imag() * Eigen::MatrixXcd(sys.drive_im);
    Eigen::MatrixXcd u = (Complex(0.0, -tau) * h).exp();
    Vec psi = random_state(ham.dim(), 20);
    Vec want = u * psi;
    stepper.step(psi, eps, tau);
    CHECK((want - psi).norm() <= 1e-12);
  }
}

TEST_CASE("stationary eigenstate acquires the analytic phase") {
  SystemParams p = tiny_params();
  p.coupling1_mhz = 0.0;
  p.coupling2_mhz = 0.0;
  SystemOperators sys = build_system(p);
  DriveHamiltonian ham(sys);

  // |0,0,1> with Table-1 detuning -2*pi*0.04 rad/ns over 200 ns: the
  // accumulated phase is a whole number of turns, e^{i 2 pi 8} = 1.
  ControlField zero;
  zero.dt = 0.01;
  zero.samples.assign(20000, Complex(0.0, 0.0));
  Vec initial = Vec::Zero(ham.dim());
  initial(basis_index(p, 0, 0, 1)) = 1.0;
  Trajectory traj = propagate_forward(ham, zero, initial);
  CHECK((traj.final_state - initial).norm() <= 1e-8);

  // Generic eigenstate phase check: |1,1,2>.
  Vec other = Vec::Zero(ham.dim());
  int idx = basis_index(p, 1, 1, 2);
  other(idx) = 1.0;
  Eigen::MatrixXcd d(sys.drift);
  double lambda = d(idx, idx).real();
  Trajectory t2 = propagate_forward(ham, zero, other);
  Complex expected = std::exp(Complex(0.0, -lambda * 200.0));
  CHECK(std::abs(t2.final_state(idx) - expected) <= 1e-9);
}

TEST_CASE("unitarity over 200 ns under a strong pulse") {
  SystemParams p = reduced_params();
  SystemOperators sys = build_system(p);
  DriveHamiltonian ham(sys);
  ControlField f = sample_analytic({300.0, 200.0}, 0.05, 0.5);
  Vec psi = sys.logical.basis_state(0);
  Trajectory traj = propagate_forward(ham, f, psi);
  CHECK(std::abs(traj.final_state.norm() - 1.0) <= 1e-10);
}

TEST_CASE("backward propagation") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  ControlField f = random_field(400, 0.02, 80.0, 42);

  SUBCASE("backward then forward returns the boundary state") {
    Vec chi_t = random_state(ham.dim(), 1);
    Trajectory back = propagate_backward(ham, f, chi_t);
    Trajectory forth = propagate_forward(ham, f, back.final_state);
    CHECK((forth.final_state - chi_t).norm() <= 1e-8);
  }

  SUBCASE("zero co-state stays identically zero") {
    Vec zero = Vec::Zero(ham.dim());
    Trajectory back = propagate_backward(ham, f, zero, 50);
    for (const auto& s : back.states) CHECK(s.norm() == 0.0);
  }

  SUBCASE("non-unit norm is preserved, not renormalized") {
    Vec chi_t = 0.37 * random_state(ham.dim(), 2);
    Trajectory back = propagate_backward(ham, f, chi_t);
    CHECK(back.final_state.norm() == doctest::Approx(0.37).epsilon(1e-10));
  }

  SUBCASE("zero-field backward phase is conjugate to forward") {
    SystemParams p = tiny_params();
    p.coupling1_mhz = 0.0;
    p.coupling2_mhz = 0.0;
    SystemOperators sys0 = build_system(p);
    DriveHamiltonian ham0(sys0);
    ControlField zero;
    zero.dt = 0.02;
    zero.samples.assign(500, Complex(0.0, 0.0));
    int idx = basis_index(p, 0, 1, 1);
    Vec e = Vec::Zero(ham0.dim());
    e(idx) = 1.0;
    Trajectory fwd = propagate_forward(ham0, zero, e);
    Trajectory bwd = propagate_backward(ham0, zero, e);
    CHECK(std::abs(fwd.final_state(idx) - std::conj(bwd.final_state(idx))) <= 1e-10);
  }
}

TEST_CASE("adjoint pair overlap is conserved") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  ControlField f = random_field(600, 0.02, 120.0, 9);
  Vec phi0 = random_state(ham.dim(), 30);
  Vec chi_t = random_state(ham.dim(), 31);
  Trajectory phi = propagate_forward(ham, f, phi0, 1);
  Trajectory chi = propagate_backward(ham, f, chi_t, 1);
  REQUIRE(phi.states.size() == chi.states.size());
  Complex base = chi.states[0].dot(phi.states[0]);
  for (size_t i = 1; i < phi.states.size(); ++i) {
    Complex overlap = chi.states[i].dot(phi.states[i]);
    CHECK(std::abs(overlap - base) <= 1e-8);
  }
}

TEST_CASE("step-halving error ratio shows second-order envelope sampling") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  AnalyticPulseParams pulse{250.0, 4.0};
  Vec psi0 = sys.logical.basis_state(0);

  auto final_at = [&](double dt) {
    ControlField f = sample_analytic(pulse, dt, 0.5);
    return propagate_forward(ham, f, psi0).final_state;
  };
  Vec ref = final_at(0.4 / 64.0);
  double e1 = (final_at(0.4) - ref).norm();
  double e2 = (final_at(0.2) - ref).norm();
  double e4 = (final_at(0.1) - ref).norm();
  CHECK(e1 / e2 >= 4.0);
  CHECK(e2 / e4 >= 4.0);
}

TEST_CASE("excitation numbers conserved without coupling or drive") {
  SystemParams p = tiny_params();
  p.coupling1_mhz = 0.0;
  p.coupling2_mhz = 0.0;
  SystemOperators sys = build_system(p);
  DriveHamiltonian ham(sys);
  ControlField zero;
  zero.dt = 0.05;
  zero.samples.assign(400, Complex(0.0, 0.0));
  Vec psi = Vec::Zero(ham.dim());
  psi(basis_index(p, 1, 0, 2)) = Complex(std::sqrt(0.5), 0.0);
  psi(basis_index(p, 0, 1, 1)) = Complex(0.0, std::sqrt(0.5));
  Trajectory traj = propagate_forward(ham, zero, psi, 40);
  auto series = expectation_series(traj, sys.n_cavity);
  for (const auto& pt : series) CHECK(pt.mean == doctest::Approx(series[0].mean).epsilon(1e-10));
  auto q1 = expectation_series(traj, sys.n_qubit1);
  for (const auto& pt : q1) CHECK(pt.mean == doctest::Approx(q1[0].mean).epsilon(1e-10));
}

TEST_CASE("expectation series on trivial states") {
  SystemParams p = tiny_params();
  SystemOperators sys = build_system(p);
  DriveHamiltonian ham(sys);
  ControlField zero;
  zero.dt = 0.1;
  zero.samples.assign(20, Complex(0.0, 0.0));

  SUBCASE("vacuum: cavity number identically (0, 0)") {
    Trajectory traj = propagate_forward(ham, zero, sys.logical.basis_state(0), 1);
    for (const auto& pt : expectation_series(traj, sys.n_cavity)) {
      CHECK(std::abs(pt.mean) <= 1e-12);
      CHECK(std::abs(pt.std_dev) <= 1e-6);
    }
  }

  SUBCASE("Fock state |n=3>: (3, 0)") {
    SystemParams p0 = tiny_params();
    p0.coupling1_mhz = 0.0;
    p0.coupling2_mhz = 0.0;
    SystemOperators sys0 = build_system(p0);
    DriveHamiltonian ham0(sys0);
    Vec psi = Vec::Zero(ham0.dim());
    psi(basis_index(p0, 0, 0, 3)) = 1.0;
    Trajectory traj = propagate_forward(ham0, zero, psi, 1);
    for (const auto& pt : expectation_series(traj, sys0.n_cavity)) {
      CHECK(pt.mean == doctest::Approx(3.0).epsilon(1e-12));
      CHECK(std::abs(pt.std_dev) <= 1e-5);
    }
  }

  SUBCASE("dimension mismatch rejected") {
    Trajectory traj = propagate_forward(ham, zero, sys.logical.basis_state(0), 1);
    SystemOperators other = build_system(reduced_params());
    CHECK_THROWS_AS(expectation_series(traj, other.n_cavity), std::invalid_argument);
  }
}

TEST_CASE("expansion order limit reports required vs allowed") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  PropagatorOptions opt;
  opt.max_order = 4;
  ChebyshevStepper stepper(ham, opt);
  Vec psi = random_state(ham.dim(), 77);
  CHECK_THROWS_AS(stepper.step(psi, Complex(400.0, 0.0), 5.0), StageError);
}

TEST_CASE("trajectory storage stride") {
  SystemOperators sys = build_system(tiny_params());
  DriveHamiltonian ham(sys);
  ControlField f = random_field(100, 0.02, 50.0, 4);
  Trajectory traj = propagate_forward(ham, f, sys.logical.basis_state(0), 30);
  // Stored at 0, 30, 60, 90 plus the final grid point 100.
  REQUIRE(traj.stored_indices.size() == 5);
  CHECK(traj.stored_indices.front() == 0);
  CHECK(traj.stored_indices.back() == 100);
  CHECK((traj.states.back() - traj.final_state).norm() == 0.0);
}
