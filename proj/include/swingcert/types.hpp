#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace swingcert {

using Real = double;

template <typename Scalar, int N>
using Vec = Eigen::Matrix<Scalar, N, 1>;

using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;
using Vector4 = Eigen::Vector4d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;

inline constexpr Real kPi = std::numbers::pi;
inline constexpr Real kTwoPi = 2.0 * std::numbers::pi;

/// Full-model state (i_d, i_q, omega, delta). Angles are kept unwrapped.
using SgState = Vector4;

/// Component indices into an SgState.
enum StateIndex : int { kId = 0, kIq = 1, kOmega = 2, kDelta = 3 };

inline SgState make_state(Real i_d, Real i_q, Real omega, Real delta)
{
  return SgState(i_d, i_q, omega, delta);
}

/// Physical parameters of a grid-connected round-rotor generator (SI units).
struct SgParameters {
  Real J = 0;        ///< rotor inertia, kg m^2/rad
  Real D_p = 0;      ///< damping + droop constant, N m s/rad
  Real T_m = 0;      ///< mechanical torque constant, N m
  Real m_if = 0;     ///< field flux m*i_f, V s
  Real L_s = 0;      ///< synchronous inductance L+M, H
  Real R_s = 0;      ///< stator resistance, Ohm
  Real V = 0;        ///< grid line voltage magnitude, V
  Real omega_g = 0;  ///< grid angular frequency, rad/s

  bool operator==(const SgParameters&) const = default;
};

/// Dimensionless and normalized quantities derived from SgParameters.
struct DerivedConstants {
  Real p = 0;        ///< R_s/L_s, rad/s
  Real i_v = 0;      ///< A
  Real V_r = 0;
  Real rho = 0;      ///< time scale, s/sqrt(rad)
  Real P_inf = 0;
  Real alpha = 0;    ///< normalized damping
  Real beta = 0;     ///< normalized bias
  Real Gamma = 0;    ///< (1+P_inf) V_r
  Real phi = 0;      ///< rad, in (0, pi/2)
  Real Lambda = 0;   ///< right side of the equilibrium cosine equation
  Real omega_g = 0;  ///< copied through for normalized-band work
};

/// A parameter failed validation; `field()` names the offending key.
class ParameterError : public std::invalid_argument {
public:
  ParameterError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Violated precondition (e.g. a non-equilibrium passed to linearize).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Numerical failure: step-size underflow, eigen-solver trouble, or an
/// internal cross-check disagreeing.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, Vector4 state = Vector4::Constant(std::nan("")),
                 Real time = std::nan(""))
      : std::runtime_error(what), state_(state), time_(time) {}
  const Vector4& state() const noexcept { return state_; }
  Real time() const noexcept { return time_; }

private:
  Vector4 state_;
  Real time_;
};

}  // namespace swingcert
