#include "qgate/functionals.hpp"

#include <cmath>

namespace qgate {

Gate gate_from_finals(const std::array<Vec, 4>& finals, const LogicalBasis& basis) {
  Gate u;
  for (int k = 0; k < 4; ++k) u.col(k) = basis.project(finals[k]);
  return u;
}

FunctionalParts diagonal_parts(const Gate& u) {
  const Complex t00 = u(0, 0), t01 = u(1, 1), t10 = u(2, 2), t11 = u(3, 3);
  FunctionalParts parts;
  parts.j_diag = 4.0 - std::norm(t00) - std::norm(t01) - std::norm(t10) - std::norm(t11);
  parts.j_gamma = 2.0 + 2.0 * (t00 * std::conj(t01) * std::conj(t10) * t11).real();
  return parts;
}

void require_unitary(const Gate& o, const std::string& what) {
  Gate defect = o.adjoint() * o - Gate::Identity();
  if (defect.cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument(what + ": target gate is not unitary on the logical subspace");
}

FunctionalValue eval_sm(const Gate& u, const Gate& target) {
  require_unitary(target, "eval_sm");
  const Complex overlap = (target.adjoint() * u).trace();
  FunctionalValue v;
  v.total = 1.0 - std::norm(overlap) / 16.0;
  return v;
}

FunctionalValue eval_geo(const Gate& u) {
  FunctionalValue v;
  v.parts = diagonal_parts(u);
  v.total = 0.125 * (v.parts.j_diag + v.parts.j_gamma);
  return v;
}

FunctionalValue eval_splx(const Gate& u, double t_ns, double t0_ns) {
  if (t_ns <= 0) throw std::invalid_argument("eval_splx: duration must be positive");
  FunctionalValue v;
  v.parts = diagonal_parts(u);
  v.parts.duration_term = t_ns / t0_ns;
  v.total = v.parts.j_diag + v.parts.j_gamma + v.parts.duration_term;
  return v;
}

std::array<Vec4, 4> costate_boundary_sm(const Gate& u, const Gate& target) {
  require_unitary(target, "costate_boundary_sm");
  const Complex overlap = (target.adjoint() * u).trace();
  std::array<Vec4, 4> chi;
  for (int k = 0; k < 4; ++k) chi[k] = (overlap / 16.0) * target.col(k);
  return chi;
}

std::array<Vec4, 4> costate_boundary_geo(const Gate& u) {
  const Complex t00 = u(0, 0), t01 = u(1, 1), t10 = u(2, 2), t11 = u(3, 3);
  std::array<Vec4, 4> chi;
  for (auto& c : chi) c = Vec4::Zero();
  // Derivatives of (1/8)(J_diag + J_gamma); these match central finite
  // differences of eval_geo, which fixes the prefactor and conjugations.
  chi[0](0) = 0.125 * (t00 - t01 * t10 * std::conj(t11));
  chi[1](1) = 0.125 * (t01 - t00 * std::conj(t10) * t11);
  chi[2](2) = 0.125 * (t10 - t00 * std::conj(t01) * t11);
  chi[3](3) = 0.125 * (t11 - std::conj(t00) * t01 * t10);
  return chi;
}

SquareModulusFunctional::SquareModulusFunctional(Gate target) : target_(std::move(target)) {
  require_unitary(target_, "SquareModulusFunctional");
}

}  // namespace qgate
