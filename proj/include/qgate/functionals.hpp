#pragma once

#include <array>
#include <memory>
#include <string>

#include "qgate/system.hpp"
#include "qgate/types.hpp"

namespace qgate {

// Projection of the time evolution onto the logical subspace:
// U_{lk} = <l|phi_k(T)>, l,k over {00, 01, 10, 11}. Column norms <= 1.
Gate gate_from_finals(const std::array<Vec, 4>& finals, const LogicalBasis& basis);

struct FunctionalParts {
  double j_diag = 0.0;      // 4 - sum |tau_k|^2, in [0,4]
  double j_gamma = 0.0;     // 2 + 2 Re(tau00 tau01* tau10* tau11), in [0,4]
  double duration_term = 0.0;
};

struct FunctionalValue {
  double total = 0.0;
  FunctionalParts parts;
};

// Diagonal overlaps tau_k = <k|U|k> and the derived part values for any gate.
FunctionalParts diagonal_parts(const Gate& u);

// Throws if O is not unitary on the logical subspace (tolerance 1e-8).
void require_unitary(const Gate& o, const std::string& what);

// Square-modulus gate functional: 1 - |sum_k <k|O^dag U|k>|^2 / 16.
// Zero iff U implements O up to a global phase.
FunctionalValue eval_sm(const Gate& u, const Gate& target);

// Geometric-phase-gate functional (1/8)(J_diag + J_gamma): zero iff the
// gate is diagonal and a perfect entangler (gamma = pi).
FunctionalValue eval_geo(const Gate& u);

// Simplex objective J_diag + J_gamma + T/T0; non-vanishing at the optimum.
FunctionalValue eval_splx(const Gate& u, double t_ns, double t0_ns = 200.0);

// Co-state boundary values chi_k(T) = -dJ_T/d<phi_k(T)| as logical
// 4-vectors (embed into the full space with LogicalBasis::embed). Both are
// normalized so that they match central finite differences of the
// corresponding functional; for the geometric functional this includes the
// 1/8 prefactor of the total.
std::array<Vec4, 4> costate_boundary_sm(const Gate& u, const Gate& target);
std::array<Vec4, 4> costate_boundary_geo(const Gate& u);

// Final-time functional consumed by the Krotov loop.
class GateFunctional {
 public:
  virtual ~GateFunctional() = default;
  virtual FunctionalValue evaluate(const Gate& u) const = 0;
  virtual std::array<Vec4, 4> costate_boundary(const Gate& u) const = 0;
  virtual bool needs_sigma() const = 0;  // non-convex functionals need sigma(t)
  virtual std::string name() const = 0;
};

class SquareModulusFunctional final : public GateFunctional {
 public:
  explicit SquareModulusFunctional(Gate target);
  FunctionalValue evaluate(const Gate& u) const override { return eval_sm(u, target_); }
  std::array<Vec4, 4> costate_boundary(const Gate& u) const override {
    return costate_boundary_sm(u, target_);
  }
  bool needs_sigma() const override { return false; }
  std::string name() const override { return "sm"; }
  const Gate& target() const { return target_; }

 private:
  Gate target_;
};

class GeoPhaseFunctional final : public GateFunctional {
 public:
  FunctionalValue evaluate(const Gate& u) const override { return eval_geo(u); }
  std::array<Vec4, 4> costate_boundary(const Gate& u) const override {
    return costate_boundary_geo(u);
  }
  bool needs_sigma() const override { return true; }
  std::string name() const override { return "geo"; }
};

}  // namespace qgate
