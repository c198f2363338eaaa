#include "swingcert/certificate.hpp"

#include "swingcert/equilibria.hpp"
#include "swingcert/sg_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swingcert {

std::optional<RestAngles> rest_angles(Real beta, Real d)
{
  if (!(std::abs(beta) + d < 1.0)) return std::nullopt;
  return RestAngles{std::asin(beta + d), std::asin(beta - d)};
}

bool damping_assumption_holds(Real alpha, const RestAngles& a)
{
  return alpha > 2.0 * std::sin(std::abs(a.psi1) / 2.0) &&
         alpha > 2.0 * std::sin(std::abs(a.psi2) / 2.0);
}

VelocityBand velocity_band(const DerivedConstants& dc, Real d)
{
  if (!(d > 0.0)) throw DomainError("velocity_band: d must be > 0");
  VelocityBand band;
  band.d = d;
  band.psi = rest_angles(dc.beta, d);
  band.trapped = band.psi && damping_assumption_holds(dc.alpha, *band.psi);
  if (band.trapped) {
    const Real spread = 4.0 * d / (dc.alpha * dc.alpha);
    band.phi1 = std::min(kPi / 2.0, band.psi->psi1 + spread);
    band.phi2 = std::max(-kPi / 2.0, band.psi->psi2 - spread);
    band.S_n = -std::sin(band.phi1);
    band.S_p = -std::sin(band.phi2);
  } else {
    band.S_n = -1.0;
    band.S_p = 1.0;
  }
  band.omega_n = (band.S_n + dc.beta - d) / dc.alpha;
  band.omega_p = (band.S_p + dc.beta + d) / dc.alpha;
  band.omega_min_d = band.omega_n + dc.rho * dc.omega_g;
  band.omega_max_d = band.omega_p + dc.rho * dc.omega_g;
  return band;
}

namespace {

void require_band(Real omega_min, Real omega_max)
{
  if (!(omega_min > 0.0 && omega_min <= omega_max && omega_max <= 2.0 * omega_min)) {
    throw DomainError("envelope: require 0 < omega_min <= omega_max <= 2 omega_min");
  }
}

}  // namespace

Real envelope_g(Real tau, Real wmin, Real wmax)
{
  require_band(wmin, wmax);
  if (!(tau >= 0.0 && tau <= kTwoPi / wmax)) throw DomainError("envelope_g: tau outside [0, 2pi/omega_max]");
  if (tau < kPi / (2.0 * wmax)) return std::sin(wmax * tau);
  if (tau < kPi / (2.0 * wmin)) return 1.0;
  if (tau < 3.0 * kPi / (wmin + wmax)) return std::sin(wmin * tau);
  return std::sin(wmax * tau);
}

Real envelope_h(Real tau, Real wmin, Real wmax)
{
  require_band(wmin, wmax);
  if (!(tau >= 0.0 && tau <= kTwoPi / wmin)) throw DomainError("envelope_h: tau outside [0, 2pi/omega_min]");
  if (tau < kPi / (wmin + wmax)) return std::sin(wmin * tau);
  if (tau < 3.0 * kPi / (2.0 * wmax)) return std::sin(wmax * tau);
  if (tau < 3.0 * kPi / (2.0 * wmin)) return -1.0;
  return std::sin(wmin * tau);
}

Real exp_sin_moment(Real a, Real omega, Real tau0, Real tau1, Real phase)
{
  if (tau0 == tau1) return 0.0;
  const auto antiderivative = [&](Real tau) {
    const Real arg = omega * tau + phase;
    return std::exp(-a * tau) * (-a * std::sin(arg) - omega * std::cos(arg)) / (a * a + omega * omega);
  };
  return antiderivative(tau1) - antiderivative(tau0);
}

Real exp_const_moment(Real a, Real c, Real tau0, Real tau1)
{
  if (tau0 == tau1) return 0.0;
  return c * (std::exp(-a * tau0) - std::exp(-a * tau1)) / a;
}

Real envelope_g_integral(Real a, Real wmin, Real wmax)
{
  require_band(wmin, wmax);
  const Real b1 = kPi / (2.0 * wmax);
  const Real b2 = kPi / (2.0 * wmin);
  const Real b3 = 3.0 * kPi / (wmin + wmax);
  const Real end = kTwoPi / wmax;
  return exp_sin_moment(a, wmax, 0.0, b1) + exp_const_moment(a, 1.0, b1, b2) +
         exp_sin_moment(a, wmin, b2, b3) + exp_sin_moment(a, wmax, b3, end);
}

Real envelope_h_integral(Real a, Real wmin, Real wmax)
{
  require_band(wmin, wmax);
  const Real c1 = kPi / (wmin + wmax);
  const Real c2 = 3.0 * kPi / (2.0 * wmax);
  const Real c3 = 3.0 * kPi / (2.0 * wmin);
  const Real end = kTwoPi / wmin;
  return exp_sin_moment(a, wmin, 0.0, c1) + exp_sin_moment(a, wmax, c1, c2) +
         exp_const_moment(a, -1.0, c2, c3) + exp_sin_moment(a, wmin, c3, end);
}

PBounds p_bounds_for_band(Real a, Real wmin, Real wmax)
{
  if (!(wmin > 0.0 && wmin <= wmax && wmax <= 2.0 * wmin)) return PBounds{};
  const Real t_max = kTwoPi / wmax;
  const Real t_min = kTwoPi / wmin;
  const Real ig = envelope_g_integral(a, wmin, wmax);
  const Real ih = envelope_h_integral(a, wmin, wmax);
  const Real t = ih < 0.0 ? t_max : t_min;
  PBounds out;
  out.fallback = false;
  out.upper = a / -std::expm1(-a * t_max) * ig;
  out.lower = a / -std::expm1(-a * t) * ih;
  return out;
}

PBounds p_bounds(const DerivedConstants& dc, Real d)
{
  const VelocityBand band = velocity_band(dc, d);
  return p_bounds_for_band(dc.p * dc.rho, band.omega_min_d, band.omega_max_d);
}

Real nscr(const DerivedConstants& dc, Real d)
{
  if (!(d > 0.0 && d <= dc.Gamma)) throw DomainError("nscr: d must lie in (0, Gamma]");
  const PBounds pb = p_bounds(dc, d);
  return dc.V_r * std::max(pb.upper - dc.P_inf, dc.P_inf - pb.lower);
}

std::vector<Real> make_grid(Real Gamma, const GridSpec& grid)
{
  if (grid.n_points < 2) throw DomainError("grid needs at least 2 points");
  if (!(grid.lower_fraction > 0.0 && grid.lower_fraction < 1.0)) {
    throw DomainError("grid lower_fraction must lie in (0, 1)");
  }
  std::vector<Real> d(static_cast<std::size_t>(grid.n_points));
  const Real lo = Gamma * grid.lower_fraction;
  const int last = grid.n_points - 1;
  for (int k = 0; k < grid.n_points; ++k) {
    const Real u = static_cast<Real>(k) / last;
    d[static_cast<std::size_t>(k)] = grid.spacing == GridSpacing::Log
                                         ? lo * std::pow(Gamma / lo, u)
                                         : lo + (Gamma - lo) * u;
  }
  d.back() = Gamma;
  return d;
}

std::string_view to_string(Verdict v)
{
  return v == Verdict::CertifiedAGAS ? "Certified-aGAS" : "NotCertified";
}

CertificateReport check_certificate(const SgParameters& params, const GridSpec& grid)
{
  CertificateReport rep;
  rep.constants = derive_constants(params);
  const DerivedConstants& dc = rep.constants;

  const std::vector<Real> ds = make_grid(dc.Gamma, grid);
  rep.points.reserve(ds.size());
  rep.margin = std::numeric_limits<Real>::infinity();
  rep.relative_margin = std::numeric_limits<Real>::infinity();
  rep.all_pass = true;
  for (Real d : ds) {
    const VelocityBand band = velocity_band(dc, d);
    GridPoint pt;
    pt.d = d;
    pt.nscr = nscr(dc, d);
    pt.omega_min_d = band.omega_min_d;
    pt.omega_max_d = band.omega_max_d;
    pt.band_ok = band.band_ok();
    rep.all_pass = rep.all_pass && pt.band_ok && pt.nscr < d;
    rep.margin = std::min(rep.margin, d - pt.nscr);
    const Real rel = (d - pt.nscr) / d;
    if (rel < rep.relative_margin) {
      rep.relative_margin = rel;
      rep.worst_d = d;
    }
    rep.points.push_back(pt);
  }

  const auto eqs = solve_equilibria(params);
  rep.hyperbolicity_ok =
      !eqs.empty() && std::all_of(eqs.begin(), eqs.end(), [](const EquilibriumPoint& e) {
        return e.classification != Stability::NonHyperbolic;
      });
  if (eqs.empty()) rep.notes.emplace_back("no equilibrium points (|Lambda| > 1)");
  else if (!rep.hyperbolicity_ok) rep.notes.emplace_back("non-hyperbolic equilibrium present");
  if (std::abs(dc.beta) >= 1.0) rep.notes.emplace_back("|beta| >= 1");

  if (!rep.all_pass) {
    int failing = 0;
    for (const auto& pt : rep.points) failing += (pt.band_ok && pt.nscr < pt.d) ? 0 : 1;
    std::ostringstream msg;
    msg << failing << " of " << rep.points.size() << " grid points fail N(d) < d or the band check";
    rep.notes.push_back(msg.str());
  }
  const bool resolved = rep.relative_margin >= grid.margin_threshold;
  if (rep.all_pass && !resolved) {
    rep.notes.emplace_back("grid-resolution: relative margin below threshold");
  }
  rep.verdict = rep.all_pass && resolved && rep.hyperbolicity_ok ? Verdict::CertifiedAGAS
                                                                 : Verdict::NotCertified;
  return rep;
}

}  // namespace swingcert
