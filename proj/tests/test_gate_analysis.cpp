#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qgate/gate_analysis.hpp"

using namespace qgate;

namespace {

Gate diag_gate(Complex a, Complex b, Complex c, Complex d) {
  Gate g = Gate::Zero();
  g(0, 0) = a;
  g(1, 1) = b;
  g(2, 2) = c;
  g(3, 3) = d;
  return g;
}

}  // namespace

TEST_CASE("nonlocal phase and concurrence") {
  SUBCASE("pi phase gate is a perfect entangler") {
    auto [gamma, c] = nonlocal_phase(diag_gate(1, 1, 1, std::exp(kI * kPi)));
    CHECK(std::abs(std::abs(gamma) - kPi) <= 1e-12);
    CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("identity carries no entanglement") {
    auto [gamma, c] = nonlocal_phase(Gate::Identity());
    CHECK(gamma == 0.0);
    CHECK(c == 0.0);
  }

  SUBCASE("gamma folded into (-2pi, 2pi] leaves C invariant") {
    // Phases chosen so the raw combination exceeds 2pi.
    double p00 = 3.0, p01 = -3.0, p10 = -2.5, p11 = 2.0;  // raw gamma = 10.5
    Gate u = diag_gate(std::exp(kI * p00), std::exp(kI * p01), std::exp(kI * p10),
                       std::exp(kI * p11));
    auto [gamma, c] = nonlocal_phase(u);
    CHECK(gamma > -2.0 * kPi);
    CHECK(gamma <= 2.0 * kPi);
    // arg() folds each phase into (-pi, pi]; the concurrence must match the
    // unfolded combination regardless.
    CHECK(c == doctest::Approx(std::abs(std::sin(0.5 * (p00 - p10 - p01 + p11)))).epsilon(1e-12));
  }

  SUBCASE("near-zero diagonal element rejected") {
    Gate u = diag_gate(1, 1e-14, 1, 1);
    CHECK_THROWS_AS(nonlocal_phase(u), std::invalid_argument);
  }
}

TEST_CASE("closest diagonal perfect entangler") {
  SUBCASE("a diagonal PE is its own closest PE") {
    Gate u = diag_gate(std::exp(kI * 0.4), std::exp(kI * (-0.9)), std::exp(kI * 1.2),
                       std::exp(kI * (kPi - 0.9 + 1.2 - 0.4)));
    Gate pe = closest_diagonal_pe(u);
    CHECK(diagonal_pe_distance(u, pe) <= 1e-7);
  }

  SUBCASE("identity: degenerate minimum still matches the grid oracle") {
    Gate pe = closest_diagonal_pe(Gate::Identity());
    auto phases = oracles::brute_force_pe_phases(Gate::Identity());
    double oracle = diagonal_pe_distance(Gate::Identity(), oracles::diagonal_pe_from_phases(phases));
    CHECK(diagonal_pe_distance(Gate::Identity(), pe) <= oracle + 1e-6);
    CHECK(nonlocal_phase(pe).second == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("randomized near-diagonal gates match the grid oracle") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      Gate u = oracles::random_near_diagonal(rng);
      Gate pe = closest_diagonal_pe(u, trial);
      auto phases = oracles::brute_force_pe_phases(u);
      double oracle = diagonal_pe_distance(u, oracles::diagonal_pe_from_phases(phases));
      CHECK(diagonal_pe_distance(u, pe) <= oracle + 1e-6);
    }
  }

  SUBCASE("gamma is exactly pi by construction") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
      Gate pe = closest_diagonal_pe(oracles::random_subspace_gate(rng), trial);
      auto [gamma, c] = nonlocal_phase(pe);
      CHECK(std::abs(std::abs(gamma) - kPi) <= 1e-12);
      CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("average gate fidelity") {
  std::mt19937_64 rng(71);
  Gate o = oracles::random_unitary(rng);

  SUBCASE("exact gate") {
    auto [f, eps] = average_gate_fidelity(o, o);
    CHECK(f == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eps == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }

  SUBCASE("zero map") {
    auto [f, eps] = average_gate_fidelity(Gate::Zero(), o);
    CHECK(f == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(eps == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("global phase invariance") {
    Gate u = oracles::random_subspace_gate(rng);
    auto [f0, e0] = average_gate_fidelity(u, o);
    auto [f1, e1] = average_gate_fidelity(std::exp(kI * 2.1) * u, o);
    CHECK(f0 == doctest::Approx(f1).epsilon(1e-12));
    CHECK(std::abs(e0 - e1) <= 1e-12);
  }

  SUBCASE("non-unitary reference rejected") {
    Gate bad = 0.9 * o;
    CHECK_THROWS_AS(average_gate_fidelity(o, bad), std::invalid_argument);
  }
}

TEST_CASE("population loss") {
  SUBCASE("from the projected gate") {
    CHECK(population_loss(Gate::Identity()) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    Gate u = (1.0 / std::sqrt(2.0)) * Gate::Identity();
    CHECK(population_loss(u) == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("from final states: leakage outside the logical span") {
    SystemParams p;
    p.qubit_levels = 2;
    p.cavity_levels = 3;
    p.coupling1_mhz = 0.0;  // bare register states, exact bookkeeping below
    p.coupling2_mhz = 0.0;
    LogicalBasis basis(p);
    std::array<Vec, 4> finals;
    for (int k = 0; k < 4; ++k) finals[k] = basis.basis_state(k);
    // Move 10% of the |00> population into a cavity-excited state.
    finals[0] *= std::sqrt(0.9);
    finals[0](basis_index(p, 0, 0, 2)) = std::sqrt(0.1);
    CHECK(population_loss(finals, basis) == doctest::Approx(0.1 / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("diagonal-gate fidelity depends only on gamma") {
  // For an exactly diagonal unitary, eps_avg w.r.t. its closest diagonal PE
  // vanishes at gamma = pi.
  Gate u = diag_gate(std::exp(kI * 0.2), std::exp(kI * 1.1), std::exp(kI * (-0.4)),
                     std::exp(kI * (kPi + 1.1 - 0.4 - 0.2)));
  GateMetrics m = analyze_gate(u);
  CHECK(m.eps_avg <= 1e-10);
  CHECK(m.concurrence == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.eps_c <= 1e-10);

  // gamma away from pi: the error grows with the gamma defect alone.
  double defects[3] = {0.1, 0.2, 0.4};
  double previous = 0.0;
  for (double d : defects) {
    Gate v = diag_gate(std::exp(kI * 0.2), std::exp(kI * 1.1), std::exp(kI * (-0.4)),
                       std::exp(kI * (kPi - d + 1.1 - 0.4 - 0.2)));
    GateMetrics mv = analyze_gate(v);
    CHECK(mv.eps_avg > previous);
    previous = mv.eps_avg;
  }
}

TEST_CASE("metrics bundle and json") {
  std::mt19937_64 rng(79);
  Gate u = oracles::random_near_diagonal(rng, 0.02);
  GateMetrics m = analyze_gate(u, 5);
  CHECK(m.eps_c == doctest::Approx(1.0 - m.concurrence));
  CHECK(m.weyl_c1 == doctest::Approx(0.5 * m.gamma));
  CHECK(m.eps_pop >= -1e-9);
  CHECK(m.eps_avg >= -1e-9);
  CHECK(m.eps_avg <= 1.0 + 1e-9);

  std::string js = metrics_json(m);
  CHECK(js.find("\"gamma\"") != std::string::npos);
  CHECK(js.find("\"concurrence\"") != std::string::npos);
  CHECK(js.find("\"eps_C\"") != std::string::npos);
  CHECK(js.find("\"eps_pop\"") != std::string::npos);
  CHECK(js.find("\"eps_avg\"") != std::string::npos);
  CHECK(js.find("\"phases\"") != std::string::npos);
  CHECK(js.find("\"target_phases\"") != std::string::npos);
}
