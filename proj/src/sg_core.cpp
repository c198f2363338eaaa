#include "swingcert/sg_core.hpp"

#include <cmath>
#include <sstream>

namespace swingcert {

void validate(const SgParameters& prm)
{
  const auto check = [](const char* name, Real value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream msg;
      msg << "parameter " << name << " must be finite and > 0 (got " << value << ")";
      throw ParameterError(name, msg.str());
    }
  };
  check("J", prm.J);
  check("D_p", prm.D_p);
  check("T_m", prm.T_m);
  check("m_if", prm.m_if);
  check("L_s", prm.L_s);
  check("R_s", prm.R_s);
  check("V", prm.V);
  check("omega_g", prm.omega_g);
}

DerivedConstants derive_constants(const SgParameters& prm)
{
  validate(prm);
  DerivedConstants dc;
  const Real wg = prm.omega_g;
  dc.omega_g = wg;
  dc.p = prm.R_s / prm.L_s;
  const Real r = std::hypot(dc.p, wg);
  dc.phi = std::atan2(wg, dc.p);
  dc.i_v = prm.V / (prm.L_s * r);
  dc.V_r = prm.m_if / (prm.L_s * dc.i_v);
  dc.rho = std::sqrt(prm.J / (prm.m_if * dc.i_v));
  dc.P_inf = dc.p * wg / (wg * wg + dc.p * dc.p);
  dc.alpha = prm.D_p / std::sqrt(prm.m_if * dc.i_v * prm.J);
  dc.beta = (prm.T_m - prm.D_p * wg) / (prm.m_if * dc.i_v) - dc.V_r * dc.P_inf;
  dc.Gamma = (1.0 + dc.P_inf) * dc.V_r;
  dc.Lambda = (prm.D_p * wg - prm.T_m) / prm.m_if * prm.L_s * r / prm.V +
              prm.m_if * wg * dc.p / (prm.V * r);

  // Both routes to Lambda share the torque term; they differ only by rounding.
  const Real scale = std::abs((prm.T_m - prm.D_p * wg) / (prm.m_if * dc.i_v)) +
                     dc.V_r * dc.P_inf;
  if (std::abs(dc.Lambda + dc.beta) > 1e-12 * scale) {
    throw NumericalError("Lambda != -beta: derived-constant transcription mismatch");
  }
  return dc;
}

Vector4 rhs_scale(const SgParameters& prm)
{
  return Vector4(prm.V / prm.L_s, prm.V / prm.L_s, prm.T_m / prm.J, prm.omega_g);
}

Vector4 state_scale(const SgParameters& prm)
{
  const Real r = std::hypot(prm.R_s / prm.L_s, prm.omega_g);
  const Real i_v = prm.V / (prm.L_s * r);
  return Vector4(i_v, i_v, prm.omega_g, 1.0);
}

StorageEnergy storage_energy(const SgState& x, const SgParameters& prm)
{
  const Real i_d = x(kId), i_q = x(kIq), w = x(kOmega), delta = x(kDelta);
  StorageEnergy e;
  e.W = 0.5 * (prm.L_s * i_d * i_d + prm.L_s * i_q * i_q + prm.J * w * w);
  e.Wdot = -prm.R_s * (i_d * i_d + i_q * i_q) - prm.D_p * w * w + prm.V * i_d * std::sin(delta) +
           prm.V * i_q * std::cos(delta) + prm.T_m * w;
  e.C = prm.V * prm.V / (2.0 * prm.R_s) + prm.T_m * prm.T_m / (4.0 * prm.D_p);
  return e;
}

}  // namespace swingcert
