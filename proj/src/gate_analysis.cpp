#include "qgate/gate_analysis.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "qgate/nelder_mead.hpp"

namespace qgate {

namespace {

std::array<double, 4> diagonal_phases(const Gate& u, bool strict) {
  std::array<double, 4> phases{};
  for (int k = 0; k < 4; ++k) {
    const Complex tau = u(k, k);
    if (strict && std::abs(tau) <= 1e-12)
      throw std::invalid_argument(
          "nonlocal_phase: diagonal element " + std::to_string(k) +
          " has near-zero magnitude; phase undefined");
    phases[k] = std::arg(tau);
  }
  return phases;
}

double fold_gamma(double g) {
  // Fold by multiples of 4pi into (-2pi, 2pi]; sin(gamma/2) is invariant
  // under the 4pi shift, so the concurrence is unaffected.
  while (g > 2.0 * kPi) g -= 4.0 * kPi;
  while (g <= -2.0 * kPi) g += 4.0 * kPi;
  return g;
}

Gate diagonal_pe_gate(double p00, double p01, double p10) {
  Gate g = Gate::Zero();
  g(0, 0) = std::exp(kI * p00);
  g(1, 1) = std::exp(kI * p01);
  g(2, 2) = std::exp(kI * p10);
  g(3, 3) = std::exp(kI * (kPi + p01 + p10 - p00));
  return g;
}

}  // namespace

std::pair<double, double> nonlocal_phase(const Gate& u) {
  const auto p = diagonal_phases(u, true);
  const double gamma = fold_gamma(p[0] - p[2] - p[1] + p[3]);
  return {gamma, std::abs(std::sin(0.5 * gamma))};
}

double diagonal_pe_distance(const Gate& u0, const Gate& pe) { return (pe - u0).norm(); }

Gate closest_diagonal_pe(const Gate& u0, std::uint64_t seed) {
  const Complex d00 = u0(0, 0), d01 = u0(1, 1), d10 = u0(2, 2), d11 = u0(3, 3);
  // Off-diagonal entries of u0 contribute a constant to the distance; the
  // free phases only have to maximize sum_k Re[e^{-i theta_k} d_k].
  auto objective = [&](const std::vector<double>& p) {
    double s = (std::exp(-kI * p[0]) * d00).real() + (std::exp(-kI * p[1]) * d01).real() +
               (std::exp(-kI * p[2]) * d10).real() +
               (std::exp(-kI * (kPi + p[1] + p[2] - p[0])) * d11).real();
    return -s;
  };

  NelderMeadOptions opt;
  opt.tolerance = 1e-15;
  opt.max_evaluations = 4000;

  std::vector<std::vector<double>> starts;
  starts.push_back({std::arg(d00), std::arg(d01), std::arg(d10)});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int s = 0; s < 8; ++s) starts.push_back({angle(rng), angle(rng), angle(rng)});

  double best_f = std::numeric_limits<double>::max();
  std::vector<double> best_x = starts[0];
  for (const auto& x0 : starts) {
    auto res = nelder_mead(objective, x0, {0.4, 0.4, 0.4}, opt);
    if (res.best_f < best_f) {
      best_f = res.best_f;
      best_x = res.best_x;
    }
  }
  return diagonal_pe_gate(best_x[0], best_x[1], best_x[2]);
}

std::pair<double, double> average_gate_fidelity(const Gate& u, const Gate& target) {
  require_unitary(target, "average_gate_fidelity");
  const Gate m = target.adjoint() * u;
  const double f = (std::norm(m.trace()) + m.squaredNorm()) / 20.0;
  return {f, 1.0 - f};
}

double population_loss(const std::array<Vec, 4>& finals, const LogicalBasis& basis) {
  double retained = 0.0;
  for (int k = 0; k < 4; ++k) retained += basis.project(finals[k]).squaredNorm();
  return 1.0 - 0.25 * retained;
}

double population_loss(const Gate& u) { return 1.0 - 0.25 * u.squaredNorm(); }

GateMetrics analyze_gate_vs(const Gate& u, const Gate& target, std::uint64_t seed) {
  GateMetrics m;
  m.closest_target = target;
  std::tie(m.gamma, m.concurrence) = nonlocal_phase(u);
  m.eps_c = 1.0 - m.concurrence;
  m.weyl_c1 = 0.5 * m.gamma;
  m.eps_pop = population_loss(u);
  m.eps_avg = average_gate_fidelity(u, target).second;
  m.phases = diagonal_phases(u, false);
  m.target_phases = diagonal_phases(target, false);
  (void)seed;
  return m;
}

GateMetrics analyze_gate(const Gate& u, std::uint64_t seed) {
  return analyze_gate_vs(u, closest_diagonal_pe(u, seed), seed);
}

std::string metrics_json(const GateMetrics& m) {
  nlohmann::json j;
  j["gamma"] = m.gamma;
  j["concurrence"] = m.concurrence;
  j["eps_C"] = m.eps_c;
  j["eps_pop"] = m.eps_pop;
  j["eps_avg"] = m.eps_avg;
  j["phases"] = m.phases;
  j["target_phases"] = m.target_phases;
  return j.dump(2);
}

}  // namespace qgate
