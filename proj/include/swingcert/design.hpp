#pragma once

#include "swingcert/types.hpp"

namespace swingcert {

/// Nominal ratings used to size a synchronverter.
struct NominalSpec {
  Real P_n = 0;          ///< nominal active power, W
  Real V = 0;            ///< line voltage amplitude, V
  Real omega_g = 0;      ///< grid frequency, rad/s
  Real d_p = 0;          ///< frequency droop, percent
  Real H_seconds = 0;    ///< inertia time constant, s
  Real L_drop_pct = 0;   ///< inductor voltage drop, percent of V_rms
  Real R_drop_pct = 0;   ///< resistor voltage drop, percent of V_rms
  Real n = 1;            ///< virtual-inductor factor

  bool operator==(const NominalSpec&) const = default;
};

/// Throws ParameterError naming the offending field.
void validate(const NominalSpec& spec);

/// Phase rms voltage V / sqrt(3).
Real rms_voltage(const NominalSpec& spec);

/// Rated rms phase current P_n / (3 V_rms).
Real rms_current(const NominalSpec& spec);

/// Sizes the machine for n = 1. The virtual-inductor factor is ignored here;
/// see design().
SgParameters size_parameters(const NominalSpec& spec);

/// Field flux that gives unity power factor at rated current with stator
/// inductance L_s.
Real field_flux(const NominalSpec& spec, Real L_s);

/// Multiplies L_s and R_s by n and re-sizes m_if for the larger inductance.
/// The rated current is recovered from T_m - D_p omega_g.
SgParameters apply_virtual_inductor(const SgParameters& params, Real n);

/// Inverter voltage command g = ((n - 1) v + e) / n, componentwise.
template <typename DerivedV, typename DerivedE>
Vector3 inverter_voltage_command(const Eigen::MatrixBase<DerivedV>& v,
                                 const Eigen::MatrixBase<DerivedE>& e, Real n)
{
  if (!(n >= 1.0)) throw ParameterError("n", "virtual-inductor factor must be >= 1");
  return ((n - 1.0) * v + e) / n;
}

/// size_parameters followed by apply_virtual_inductor(spec.n).
SgParameters design(const NominalSpec& spec);

}  // namespace swingcert
