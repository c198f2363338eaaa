#include "swingcert/equilibria.hpp"

#include "swingcert/sg_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace swingcert {

namespace {

constexpr Real kResidualTol = 1e-9;
constexpr Real kHyperbolicBand = 1e-7;

Real scaled_residual(const SgState& x, const SgParameters& prm)
{
  return model_rhs(x, prm).cwiseQuotient(rhs_scale(prm)).cwiseAbs().maxCoeff();
}

EquilibriumPoint make_point(const SgParameters& prm, const DerivedConstants& dc, Real delta_e,
                            int branch)
{
  const Real slip_torque = prm.D_p * prm.omega_g - prm.T_m;
  const Real i_q = slip_torque / prm.m_if;
  const Real i_d = prm.omega_g * slip_torque / (prm.m_if * dc.p) + prm.V * std::sin(delta_e) / prm.R_s;
  EquilibriumPoint eq;
  eq.state = make_state(i_d, i_q, prm.omega_g, delta_e);
  eq.branch = branch;
  return eq;
}

}  // namespace

std::string_view to_string(Stability s)
{
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

Real wrap_angle(Real delta, Real lo)
{
  Real k = std::floor((delta - lo) / kTwoPi);
  Real out = delta - k * kTwoPi;
  if (out >= lo + kTwoPi) out -= kTwoPi;
  if (out < lo) out += kTwoPi;
  return out;
}

std::vector<EquilibriumPoint> solve_equilibria(const SgParameters& prm)
{
  const DerivedConstants dc = derive_constants(prm);
  Real lambda_cos = dc.Lambda;
  if (std::abs(lambda_cos) > 1.0 + 1e-12) return {};
  if (std::abs(std::abs(lambda_cos) - 1.0) <= 1e-12) lambda_cos = std::copysign(1.0, lambda_cos);

  const Real lambda = std::acos(lambda_cos);
  const Real lo = -kPi - dc.phi;
  std::vector<EquilibriumPoint> out;
  out.push_back(make_point(prm, dc, wrap_angle(lambda - dc.phi, lo), 1));
  if (lambda > 0.0 && lambda < kPi) {
    out.push_back(make_point(prm, dc, wrap_angle(-lambda - dc.phi, lo), 2));
  }
  for (auto& eq : out) {
    const Classification c = classify(prm, eq);
    eq.classification = c.stability;
    eq.eigenvalues = c.eigenvalues;
    eq.char_poly = c.char_poly;
  }
  return out;
}

Matrix4 linearize(const SgParameters& prm, const EquilibriumPoint& eq)
{
  if (scaled_residual(eq.state, prm) > kResidualTol) {
    throw PreconditionError("linearize: state is not an equilibrium of the model");
  }
  const Real p = prm.R_s / prm.L_s;
  const Real wg = prm.omega_g;
  const Real i_d = eq.state(kId), i_q = eq.state(kIq), delta = eq.state(kDelta);
  Matrix4 a;
  a << -p, wg, i_q, prm.V * std::cos(delta) / prm.L_s,
       -wg, -p, -i_d - prm.m_if / prm.L_s, -prm.V * std::sin(delta) / prm.L_s,
       0, prm.m_if / prm.J, -prm.D_p / prm.J, 0,
       0, 0, 1, 0;
  return a;
}

Quartic char_poly(const Matrix4& a)
{
  // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
  std::array<Real, 5> c{};
  c[4] = 1.0;
  Matrix4 m = Matrix4::Zero();
  for (int k = 1; k <= 4; ++k) {
    m = a * m + c[5 - k] * Matrix4::Identity();
    c[4 - k] = -(a * m).trace() / k;
  }
  return Quartic{c[3], c[2], c[1], c[0]};
}

Real a0_closed_form(const SgParameters& prm, Real delta_e)
{
  const DerivedConstants dc = derive_constants(prm);
  return prm.m_if * prm.V * std::hypot(dc.p, prm.omega_g) / (prm.J * prm.L_s) *
         std::sin(delta_e + dc.phi);
}

std::array<std::complex<Real>, 4> quartic_roots(const Quartic& q)
{
  using C = std::complex<Real>;
  Matrix4 companion = Matrix4::Zero();
  companion(0, 0) = -q.a3;
  companion(0, 1) = -q.a2;
  companion(0, 2) = -q.a1;
  companion(0, 3) = -q.a0;
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;

  Eigen::EigenSolver<Matrix4> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("quartic_roots: eigen-solver did not converge");
  }
  const auto poly = [&](C s) { return (((s + q.a3) * s + q.a2) * s + q.a1) * s + q.a0; };
  const auto dpoly = [&](C s) { return ((4.0 * s + 3.0 * q.a3) * s + 2.0 * q.a2) * s + q.a1; };

  std::array<C, 4> roots{};
  for (int i = 0; i < 4; ++i) {
    C s = solver.eigenvalues()(i);
    const C ds = dpoly(s);
    if (std::abs(ds) > 0.0) {
      const C polished = s - poly(s) / ds;
      if (std::abs(poly(polished)) <= std::abs(poly(s))) s = polished;
    }
    roots[static_cast<std::size_t>(i)] = s;
  }
  std::sort(roots.begin(), roots.end(), [](C x, C y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return roots;
}

bool routh_hurwitz_stable(const Quartic& q)
{
  if (q.a3 <= 0 || q.a2 <= 0 || q.a1 <= 0 || q.a0 <= 0) return false;
  if (q.a3 * q.a2 <= q.a1) return false;
  return q.a3 * q.a2 * q.a1 > q.a1 * q.a1 + q.a3 * q.a3 * q.a0;
}

Classification classify(const SgParameters& prm, const EquilibriumPoint& eq)
{
  Classification c;
  c.char_poly = char_poly(linearize(prm, eq));
  c.eigenvalues = quartic_roots(c.char_poly);

  Real spectral = 0.0;
  for (const auto& l : c.eigenvalues) spectral = std::max(spectral, std::abs(l));
  c.hyperbolicity_band = kHyperbolicBand * spectral;

  bool any_in_band = false, any_positive = false;
  for (const auto& l : c.eigenvalues) {
    if (std::abs(l.real()) <= c.hyperbolicity_band) any_in_band = true;
    if (l.real() > c.hyperbolicity_band) any_positive = true;
  }
  if (any_in_band) {
    c.stability = Stability::NonHyperbolic;
    return c;
  }
  c.stability = any_positive ? Stability::Unstable : Stability::Stable;
  if ((c.stability == Stability::Stable) != routh_hurwitz_stable(c.char_poly)) {
    throw NumericalError("classify: eigenvalue and Routh-Hurwitz verdicts disagree", eq.state);
  }
  return c;
}

}  // namespace swingcert
