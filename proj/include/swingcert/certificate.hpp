#pragma once

#include "swingcert/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace swingcert {

/// Rest angles psi1 = asin(beta + d), psi2 = asin(beta - d); defined iff |beta| + d < 1.
struct RestAngles {
  Real psi1 = 0;
  Real psi2 = 0;
};

std::optional<RestAngles> rest_angles(Real beta, Real d);

/// True when alpha exceeds 2 sin(|psi_i|/2) for both rest angles.
bool damping_assumption_holds(Real alpha, const RestAngles& angles);

/// Eventual bounds on the normalized velocity for a forcing bound d.
struct VelocityBand {
  Real d = 0;
  std::optional<RestAngles> psi;  ///< empty when |beta| + d >= 1
  bool trapped = false;           ///< rest angles defined and damping assumption holds
  Real phi1 = 0, phi2 = 0;        ///< meaningful only when trapped
  Real S_n = -1, S_p = 1;
  Real omega_n = 0, omega_p = 0;
  Real omega_min_d = 0, omega_max_d = 0;  ///< omega_n + rho omega_g, omega_p + rho omega_g

  /// omega_max_d <= 2 omega_min_d with omega_min_d > 0.
  bool band_ok() const { return omega_min_d > 0.0 && omega_max_d <= 2.0 * omega_min_d; }
};

/// Velocity band for d > 0 (DomainError otherwise).
VelocityBand velocity_band(const DerivedConstants& dc, Real d);

/// Upper envelope of sin over one period of a phase with speed in
/// [omega_min, omega_max]; defined on [0, 2 pi/omega_max].
Real envelope_g(Real tau, Real omega_min, Real omega_max);

/// Lower envelope; defined on [0, 2 pi/omega_min].
Real envelope_h(Real tau, Real omega_min, Real omega_max);

/// int_{tau0}^{tau1} e^{-a tau} sin(omega tau + phase) dtau in closed form.
Real exp_sin_moment(Real a, Real omega, Real tau0, Real tau1, Real phase = 0.0);

/// int_{tau0}^{tau1} e^{-a tau} c dtau.
Real exp_const_moment(Real a, Real c, Real tau0, Real tau1);

/// Exact weighted integrals of the envelopes over their full domains.
Real envelope_g_integral(Real a, Real omega_min, Real omega_max);
Real envelope_h_integral(Real a, Real omega_min, Real omega_max);

struct PBounds {
  Real lower = 0;  ///< P_l^d
  Real upper = 1;  ///< P_u^d
  bool fallback = true;  ///< band violated; (0, 1) used
};

/// Bounds on the tail of P(s) for a band (omega_min, omega_max) and decay
/// rate a = p rho. Falls back to (0, 1) if the band is not admissible.
PBounds p_bounds_for_band(Real a, Real omega_min, Real omega_max);

/// P_l^d and P_u^d for d in (0, Gamma].
PBounds p_bounds(const DerivedConstants& dc, Real d);

/// The certificate map N(d) = V_r max(P_u^d - P_inf, P_inf - P_l^d).
/// DomainError outside (0, Gamma].
Real nscr(const DerivedConstants& dc, Real d);

enum class GridSpacing { Log, Linear };

struct GridSpec {
  int n_points = 2000;
  GridSpacing spacing = GridSpacing::Log;
  Real lower_fraction = 1e-6;     ///< grid starts at Gamma * lower_fraction
  Real margin_threshold = 1e-3;   ///< minimum relative margin (d - N(d))/d
};

/// d-grid over (0, Gamma], always ending exactly at Gamma.
std::vector<Real> make_grid(Real Gamma, const GridSpec& grid);

enum class Verdict { CertifiedAGAS, NotCertified };

std::string_view to_string(Verdict v);

struct GridPoint {
  Real d = 0;
  Real nscr = 0;
  Real omega_min_d = 0;
  Real omega_max_d = 0;
  bool band_ok = false;
};

struct CertificateReport {
  DerivedConstants constants;
  std::vector<GridPoint> points;
  Real margin = 0;           ///< min over grid of d - N(d)
  Real relative_margin = 0;  ///< min over grid of (d - N(d))/d
  Real worst_d = 0;          ///< grid point attaining relative_margin
  bool all_pass = false;     ///< N(d) < d and band_ok at every grid point
  bool hyperbolicity_ok = false;
  Verdict verdict = Verdict::NotCertified;
  std::vector<std::string> notes;
};

/// Evaluates the certificate over a grid. Certified iff every grid point
/// passes, all equilibria are hyperbolic and the relative margin is at least
/// grid.margin_threshold.
CertificateReport check_certificate(const SgParameters& params, const GridSpec& grid = {});

}  // namespace swingcert
