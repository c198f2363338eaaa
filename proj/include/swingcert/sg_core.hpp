#pragma once

#include "swingcert/types.hpp"

#include <cmath>

namespace swingcert {

/// Throws ParameterError naming the first non-positive or non-finite field.
void validate(const SgParameters& params);

/// Computes p, i_v, V_r, rho, P_inf, alpha, beta, Gamma, phi and Lambda.
/// Lambda is evaluated from the equilibrium cosine equation and checked
/// against -beta; a mismatch beyond 1e-12 relative raises NumericalError.
DerivedConstants derive_constants(const SgParameters& params);

/// Power-invariant Park matrix U(theta). Unitary for every theta.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> park_matrix(Scalar theta)
{
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar k = sqrt(Scalar(2) / Scalar(3));
  const Scalar shift = Scalar(kTwoPi / 3.0);
  const Scalar h = Scalar(1) / sqrt(Scalar(2));
  Eigen::Matrix<Scalar, 3, 3> u;
  u << cos(theta), cos(theta - shift), cos(theta + shift),
      -sin(theta), -sin(theta - shift), -sin(theta + shift),
      h, h, h;
  return k * u;
}

/// abc -> dq0.
template <typename Derived>
Vec<typename Derived::Scalar, 3> park(typename Derived::Scalar theta,
                                      const Eigen::MatrixBase<Derived>& x_abc)
{
  return park_matrix(theta) * x_abc;
}

/// dq0 -> abc, using U^T = U^{-1}.
template <typename Derived>
Vec<typename Derived::Scalar, 3> inverse_park(typename Derived::Scalar theta,
                                              const Eigen::MatrixBase<Derived>& x_dq0)
{
  return park_matrix(theta).transpose() * x_dq0;
}

/// Per-phase electromotive force for rotor angle theta and speed omega.
/// M_f i_f is recovered from m_if = sqrt(3/2) M_f i_f.
template <typename Scalar>
Vec<Scalar, 3> emf(Scalar theta, Scalar omega, Real m_if)
{
  using std::sin;
  const Scalar mf_if = Scalar(m_if / std::sqrt(1.5));
  const Scalar shift = Scalar(kTwoPi / 3.0);
  return mf_if * omega * Vec<Scalar, 3>(sin(theta), sin(theta - shift), sin(theta + shift));
}

/// Balanced grid voltage with line magnitude V at grid angle theta_g.
template <typename Scalar>
Vec<Scalar, 3> grid_voltage(Scalar theta_g, Real V)
{
  using std::sin;
  const Scalar shift = Scalar(kTwoPi / 3.0);
  return Scalar(std::sqrt(2.0 / 3.0) * V) *
         Vec<Scalar, 3>(sin(theta_g), sin(theta_g - shift), sin(theta_g + shift));
}

/// Time derivative of the 4th-order grid-connected generator model.
template <typename Derived>
Vec<typename Derived::Scalar, 4> model_rhs(const Eigen::MatrixBase<Derived>& x,
                                           const SgParameters& prm)
{
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::sin;
  const Scalar i_d = x(kId), i_q = x(kIq), w = x(kOmega), delta = x(kDelta);
  Vec<Scalar, 4> dx;
  dx(kId) = (-prm.R_s * i_d + w * prm.L_s * i_q + prm.V * sin(delta)) / prm.L_s;
  dx(kIq) = (-w * prm.L_s * i_d - prm.R_s * i_q - prm.m_if * w + prm.V * cos(delta)) / prm.L_s;
  dx(kOmega) = (prm.m_if * i_q - prm.D_p * w + prm.T_m) / prm.J;
  dx(kDelta) = w - prm.omega_g;
  return dx;
}

/// Per-component magnitudes used to scale model_rhs residuals:
/// V/L_s for the currents, T_m/J for omega, omega_g for delta.
Vector4 rhs_scale(const SgParameters& params);

/// Per-component magnitudes used to compare states: i_v for the currents,
/// omega_g for omega, 1 rad for delta.
Vector4 state_scale(const SgParameters& params);

/// Stored energy W, its time derivative along the model, and the constant C
/// with Wdot <= C everywhere.
struct StorageEnergy {
  Real W = 0;
  Real Wdot = 0;
  Real C = 0;
};

StorageEnergy storage_energy(const SgState& x, const SgParameters& params);

}  // namespace swingcert
