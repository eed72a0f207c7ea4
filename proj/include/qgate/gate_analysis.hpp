#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "qgate/functionals.hpp"
#include "qgate/system.hpp"
#include "qgate/types.hpp"

namespace qgate {

struct GateMetrics {
  double gamma = 0.0;        // non-local phase, folded into (-2pi, 2pi]
  double concurrence = 0.0;  // |sin(gamma/2)|
  double eps_c = 0.0;        // 1 - C
  double eps_pop = 0.0;      // population loss from the logical subspace
  double eps_avg = 0.0;      // 1 - F_avg w.r.t. closest_target
  double weyl_c1 = 0.0;      // gamma/2 (c2 = c3 = 0 for diagonal gates)
  std::array<double, 4> phases{};         // arg tau_k of the analyzed gate
  std::array<double, 4> target_phases{};  // phases of closest_target
  Gate closest_target = Gate::Identity();
};

// gamma = phi00 - phi10 - phi01 + phi11 from the diagonal phases, folded
// into (-2pi, 2pi] (a 4pi fold leaves the concurrence invariant), and the
// maximal reachable concurrence C = |sin(gamma/2)|. Throws if any diagonal
// element has magnitude below 1e-12 (undefined phase).
std::pair<double, double> nonlocal_phase(const Gate& u);

// Closest diagonal perfect entangler to u0 in Frobenius distance, over the
// parametrization diag(e^{i p00}, e^{i p01}, e^{i p10},
// e^{i(pi + p01 + p10 - p00)}); gamma = pi by construction. Local simplex
// descent seeded at the diagonal phases of u0 plus 8 seeded multi-starts.
Gate closest_diagonal_pe(const Gate& u0, std::uint64_t seed = 0);

double diagonal_pe_distance(const Gate& u0, const Gate& pe);  // Frobenius

// F_avg = (|tr(O^dag U)|^2 + tr(O^dag U U^dag O)) / 20 and its error
// 1 - F_avg; valid for subspace-projected (non-unitary) U.
std::pair<double, double> average_gate_fidelity(const Gate& u, const Gate& target);

// eps_pop = 1 - (1/4) sum_k ||P_L phi_k(T)||^2 with P_L projecting onto
// the four logical states.
double population_loss(const std::array<Vec, 4>& finals, const LogicalBasis& basis);
double population_loss(const Gate& u);  // from the projected gate directly

// Full metrics bundle; the first form measures eps_avg against the closest
// diagonal perfect entangler of u itself, the second against a given target.
GateMetrics analyze_gate(const Gate& u, std::uint64_t seed = 0);
GateMetrics analyze_gate_vs(const Gate& u, const Gate& target, std::uint64_t seed = 0);

// JSON report with keys gamma, concurrence, eps_C, eps_pop, eps_avg,
// phases, target_phases.
std::string metrics_json(const GateMetrics& m);

}  // namespace qgate
