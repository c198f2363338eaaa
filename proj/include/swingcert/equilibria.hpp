#pragma once

#include "swingcert/types.hpp"

#include <array>
#include <complex>
#include <string_view>
#include <vector>

namespace swingcert {

enum class Stability { Stable, Unstable, NonHyperbolic };

std::string_view to_string(Stability s);

/// Coefficients (a3, a2, a1, a0) of the monic quartic s^4 + a3 s^3 + a2 s^2 + a1 s + a0.
struct Quartic {
  Real a3 = 0, a2 = 0, a1 = 0, a0 = 0;
};

struct EquilibriumPoint {
  SgState state = SgState::Zero();
  int branch = 1;  ///< 1: delta = lambda - phi, 2: delta = -lambda - phi
  Stability classification = Stability::NonHyperbolic;
  std::array<std::complex<Real>, 4> eigenvalues{};
  Quartic char_poly;
};

/// Representative equilibria with delta in [-pi - phi, pi - phi). Empty when
/// |Lambda| > 1, one point at |Lambda| = 1, two otherwise. Each returned point
/// is already linearized and classified.
std::vector<EquilibriumPoint> solve_equilibria(const SgParameters& params);

/// Jacobian of model_rhs at an equilibrium. Throws PreconditionError when the
/// scaled residual of `eq` exceeds 1e-9.
Matrix4 linearize(const SgParameters& params, const EquilibriumPoint& eq);

/// Characteristic polynomial det(sI - A) via Faddeev-LeVerrier.
Quartic char_poly(const Matrix4& a);

/// Closed-form constant coefficient at an equilibrium angle delta_e.
Real a0_closed_form(const SgParameters& params, Real delta_e);

/// Roots of a monic quartic: companion-matrix eigenvalues, each polished by
/// one Newton step.
std::array<std::complex<Real>, 4> quartic_roots(const Quartic& q);

/// Routh-Hurwitz test: true iff every root lies in the open left half plane.
bool routh_hurwitz_stable(const Quartic& q);

struct Classification {
  Stability stability = Stability::NonHyperbolic;
  std::array<std::complex<Real>, 4> eigenvalues{};
  Quartic char_poly;
  Real hyperbolicity_band = 0;  ///< 1e-7 * max |lambda|
};

/// Classifies `eq` from the eigenvalues of its linearization, cross-checked
/// against Routh-Hurwitz (disagreement outside the band -> NumericalError).
Classification classify(const SgParameters& params, const EquilibriumPoint& eq);

/// Shifts delta by 2 pi k with k chosen so that delta lands in [lo, lo + 2 pi).
Real wrap_angle(Real delta, Real lo);

}  // namespace swingcert
