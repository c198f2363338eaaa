#pragma once

#include "swingcert/types.hpp"

#include <functional>

namespace swingcert {

/// State of the exact swing equation realized as an ODE:
/// (eta, eta_dot, w_re, w_im) with eta = 3 pi/2 + delta + phi and w the
/// memory state w(t) = int_0^t e^{-p(t-tau)} e^{i int_tau^t omega} dtau.
using EseState = Vector4;

enum EseIndex : int { kEta = 0, kEtaDot = 1, kWRe = 2, kWIm = 3 };

/// Initial currents and angle the forcing term f(t) depends on.
struct EseInitial {
  Real i_d0 = 0;
  Real i_q0 = 0;
  Real delta0 = 0;
};

/// Bundles parameters, their derived constants and the initial data of one
/// exact-swing-equation trajectory. Callable as an ODE right-hand side.
class SwingSystem {
public:
  SwingSystem(const SgParameters& params, const EseInitial& init);

  EseState operator()(Real t, const EseState& x) const;

  /// f(t) from the accumulated phase int_0^t omega = eta(t) - eta(0) + omega_g t.
  Real f(Real t, const EseState& x) const;

  /// i_q and i_d recovered from the memory state (no history needed).
  Real i_q(Real t, const EseState& x) const;
  Real i_d(Real t, const EseState& x) const;

  const SgParameters& params() const { return params_; }
  const DerivedConstants& constants() const { return dc_; }
  const EseInitial& initial() const { return init_; }
  Real eta0() const { return eta0_; }

private:
  Real phase(Real t, const EseState& x) const;

  SgParameters params_;
  DerivedConstants dc_;
  EseInitial init_;
  Real eta0_;
};

/// Right-hand side of the exact swing equation with its memory state.
EseState ese_rhs(Real t, const EseState& x, const SgParameters& params, const EseInitial& init);

/// Matched initial ESE state for a full-model initial state (w = 0).
EseState ese_initial_state(const SgState& x0, const DerivedConstants& dc);

/// Full-model state reconstructed from an ESE state at time t.
SgState ese_to_full(Real t, const EseState& x, const SwingSystem& sys);

struct Forcing {
  Real gamma = 0;  ///< forcing of the normalized pendulum
  Real P = 0;      ///< normalized convolution, |P| < 1
};

/// gamma = e^{-pt} f(t)/i_v + V_r P_inf - V_r P with P = p Im(w).
Forcing forcing_gamma(Real t, const EseState& x, const SwingSystem& sys);
Forcing forcing_gamma(Real t, const EseState& x, const SgParameters& params, const EseInitial& init);

/// Generic forced pendulum psi'' + alpha psi' + sin psi = beta + gamma(t).
struct PendulumParams {
  Real alpha = 1;
  Real beta = 0;
  std::function<Real(Real)> forcing = [](Real) { return 0.0; };
  Real d = 0;  ///< declared bound on |forcing|
};

/// Returns (psi_dot, psi_ddot).
Vector2 pendulum_rhs(Real psi, Real psi_dot, const PendulumParams& params, Real t);

/// E = psi_dot^2/2 + 1 - cos psi.
Real pendulum_energy(Real psi, Real psi_dot);

/// Normalized-time pendulum coordinates: psi = 3 pi/2 + delta + phi,
/// psi' = rho (omega - omega_g).
Vector2 to_pendulum_coords(const SgState& x, const DerivedConstants& dc);

/// Inverse of to_pendulum_coords for the (omega, delta) pair; returns (omega, delta).
Vector2 from_pendulum_coords(Real psi, Real psi_prime, const DerivedConstants& dc);

}  // namespace swingcert
