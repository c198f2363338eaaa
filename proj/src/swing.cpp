#include "swingcert/swing.hpp"

#include "swingcert/sg_core.hpp"

#include <cmath>

namespace swingcert {

namespace {
constexpr Real kThreeHalfPi = 1.5 * kPi;
}

SwingSystem::SwingSystem(const SgParameters& params, const EseInitial& init)
    : params_(params), dc_(derive_constants(params)), init_(init),
      eta0_(kThreeHalfPi + init.delta0 + dc_.phi)
{
}

Real SwingSystem::phase(Real t, const EseState& x) const
{
  return x(kEta) - eta0_ + params_.omega_g * t;
}

Real SwingSystem::f(Real t, const EseState& x) const
{
  const Real theta = phase(t, x);
  return -std::sin(theta) * init_.i_d0 + std::cos(theta) * init_.i_q0 -
         params_.m_if / params_.L_s * std::sin(theta) -
         dc_.i_v * std::cos(theta + init_.delta0 + dc_.phi);
}

EseState SwingSystem::operator()(Real t, const EseState& x) const
{
  const SgParameters& prm = params_;
  const Real decay = std::exp(-dc_.p * t);
  const Real omega = x(kEtaDot) + prm.omega_g;
  const Real memory = prm.m_if * prm.m_if * dc_.p / prm.L_s * x(kWIm);

  EseState dx;
  dx(kEta) = x(kEtaDot);
  dx(kEtaDot) = (prm.T_m - prm.D_p * prm.omega_g + prm.m_if * decay * f(t, x) -
                 prm.m_if * dc_.i_v * std::sin(x(kEta)) - memory - prm.D_p * x(kEtaDot)) /
                prm.J;
  // w' = 1 + (-p + i omega) w
  dx(kWRe) = 1.0 - dc_.p * x(kWRe) - omega * x(kWIm);
  dx(kWIm) = -dc_.p * x(kWIm) + omega * x(kWRe);
  return dx;
}

Real SwingSystem::i_q(Real t, const EseState& x) const
{
  const Real delta = x(kEta) - kThreeHalfPi - dc_.phi;
  return dc_.i_v * std::cos(delta + dc_.phi) -
         params_.m_if * dc_.p / params_.L_s * x(kWIm) + std::exp(-dc_.p * t) * f(t, x);
}

Real SwingSystem::i_d(Real t, const EseState& x) const
{
  const Real theta = phase(t, x);
  const Real decay = std::exp(-dc_.p * t);
  const Real delta = x(kEta) - kThreeHalfPi - dc_.phi;
  return decay * (std::cos(theta) * init_.i_d0 + std::sin(theta) * init_.i_q0) -
         params_.m_if / params_.L_s * (1.0 - decay * std::cos(theta) - dc_.p * x(kWRe)) +
         dc_.i_v * (std::sin(delta + dc_.phi) - decay * std::sin(theta + init_.delta0 + dc_.phi));
}

EseState ese_rhs(Real t, const EseState& x, const SgParameters& params, const EseInitial& init)
{
  return SwingSystem(params, init)(t, x);
}

EseState ese_initial_state(const SgState& x0, const DerivedConstants& dc)
{
  return EseState(kThreeHalfPi + x0(kDelta) + dc.phi, x0(kOmega) - dc.omega_g, 0.0, 0.0);
}

SgState ese_to_full(Real t, const EseState& x, const SwingSystem& sys)
{
  return make_state(sys.i_d(t, x), sys.i_q(t, x), x(kEtaDot) + sys.params().omega_g,
                    x(kEta) - kThreeHalfPi - sys.constants().phi);
}

Forcing forcing_gamma(Real t, const EseState& x, const SwingSystem& sys)
{
  const DerivedConstants& dc = sys.constants();
  Forcing out;
  out.P = dc.p * x(kWIm);
  out.gamma = std::exp(-dc.p * t) * sys.f(t, x) / dc.i_v + dc.V_r * dc.P_inf - dc.V_r * out.P;
  return out;
}

Forcing forcing_gamma(Real t, const EseState& x, const SgParameters& params, const EseInitial& init)
{
  return forcing_gamma(t, x, SwingSystem(params, init));
}

Vector2 pendulum_rhs(Real psi, Real psi_dot, const PendulumParams& prm, Real t)
{
  const Real gamma = prm.forcing ? prm.forcing(t) : 0.0;
  return Vector2(psi_dot, -prm.alpha * psi_dot - std::sin(psi) + prm.beta + gamma);
}

Real pendulum_energy(Real psi, Real psi_dot)
{
  return 0.5 * psi_dot * psi_dot + (1.0 - std::cos(psi));
}

Vector2 to_pendulum_coords(const SgState& x, const DerivedConstants& dc)
{
  return Vector2(kThreeHalfPi + x(kDelta) + dc.phi, dc.rho * (x(kOmega) - dc.omega_g));
}

Vector2 from_pendulum_coords(Real psi, Real psi_prime, const DerivedConstants& dc)
{
  return Vector2(psi_prime / dc.rho + dc.omega_g, psi - kThreeHalfPi - dc.phi);
}

}  // namespace swingcert
