#include "swingcert/design.hpp"

#include <cmath>

namespace swingcert {

void validate(const NominalSpec& spec)
{
  const auto positive = [](Real x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) throw ParameterError(name, "must be finite and > 0");
  };
  positive(spec.P_n, "P_n");
  positive(spec.V, "V");
  positive(spec.omega_g, "omega_g");
  positive(spec.d_p, "d_p");
  positive(spec.H_seconds, "H_seconds");
  positive(spec.L_drop_pct, "L_drop_pct");
  if (!(std::isfinite(spec.R_drop_pct) && spec.R_drop_pct >= 0.0)) {
    throw ParameterError("R_drop_pct", "must be finite and >= 0");
  }
  if (!(std::isfinite(spec.n) && spec.n >= 1.0)) throw ParameterError("n", "must be >= 1");
}

Real rms_voltage(const NominalSpec& spec) { return spec.V / std::sqrt(3.0); }

Real rms_current(const NominalSpec& spec) { return spec.P_n / (3.0 * rms_voltage(spec)); }

namespace {

Real field_flux_from(Real v_rms, Real i_rms, Real omega_g, Real L_s)
{
  const Real x = omega_g * L_s * i_rms;
  const Real e_rms = std::sqrt(v_rms * v_rms + x * x);
  // Per-phase emf amplitude sqrt(2) e_rms equals M_f i_f omega_g, and m_if = sqrt(3/2) M_f i_f.
  return std::sqrt(1.5) * std::sqrt(2.0) * e_rms / omega_g;
}

}  // namespace

Real field_flux(const NominalSpec& spec, Real L_s)
{
  if (!(L_s >= 0.0)) throw ParameterError("L_s", "must be >= 0");
  return field_flux_from(rms_voltage(spec), rms_current(spec), spec.omega_g, L_s);
}

SgParameters size_parameters(const NominalSpec& spec)
{
  validate(spec);
  const Real w2 = spec.omega_g * spec.omega_g;
  const Real v_rms = rms_voltage(spec);
  const Real i_rms = rms_current(spec);

  SgParameters p;
  p.V = spec.V;
  p.omega_g = spec.omega_g;
  p.D_p = 100.0 * spec.P_n / (spec.d_p * w2);
  p.T_m = spec.P_n / spec.omega_g + p.D_p * spec.omega_g;
  p.J = 2.0 * spec.H_seconds * spec.P_n / w2;
  p.L_s = spec.L_drop_pct / 100.0 * v_rms / (spec.omega_g * i_rms);
  p.R_s = spec.R_drop_pct / 100.0 * v_rms / i_rms;
  p.m_if = field_flux(spec, p.L_s);
  return p;
}

SgParameters apply_virtual_inductor(const SgParameters& params, Real n)
{
  if (!(std::isfinite(n) && n >= 1.0)) throw ParameterError("n", "virtual-inductor factor must be >= 1");
  const Real T_a = params.T_m - params.D_p * params.omega_g;
  if (!(T_a > 0.0)) throw ParameterError("T_m", "T_m - D_p omega_g must be > 0 to recover the rated current");
  const Real v_rms = params.V / std::sqrt(3.0);
  const Real i_rms = T_a * params.omega_g / (3.0 * v_rms);

  SgParameters out = params;
  out.L_s = n * params.L_s;
  out.R_s = n * params.R_s;
  out.m_if = field_flux_from(v_rms, i_rms, params.omega_g, out.L_s);
  return out;
}

SgParameters design(const NominalSpec& spec)
{
  return apply_virtual_inductor(size_parameters(spec), spec.n);
}

}  // namespace swingcert
