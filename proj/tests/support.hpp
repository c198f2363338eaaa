#pragma once

// Shared fixtures and independent numerical oracles for the test suites.

#include "swingcert/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace swingcert::test {

// 500 kW machine from the worked example, with and without the virtual inductor.
inline SgParameters machine_n30()
{
  SgParameters p;
  p.J = 20.264236728467555;
  p.D_p = 168.86863940389625;
  p.T_m = 54643.19712821739;
  p.m_if = 51.672195921432284;
  p.L_s = 0.8250592249883858;
  p.R_s = 32.400000000000006;
  p.V = 10392.304845413264;
  p.omega_g = 314.1592653589793;
  return p;
}

inline SgParameters machine_n1()
{
  SgParameters p = machine_n30();
  p.m_if = 33.10618693523293;
  p.L_s = 0.027501974166279527;
  p.R_s = 1.0800000000000003;
  return p;
}

inline SgParameters machine_rs216()
{
  SgParameters p = machine_n1();
  p.R_s = 2.16;
  return p;
}

// Droop lowered to 15 with the accelerating torque T_m - D_p omega_g kept at P_n/omega_g.
inline SgParameters machine_dp15()
{
  SgParameters p = machine_n1();
  p.D_p = 15.0;
  p.T_m = 500e3 / p.omega_g + p.D_p * p.omega_g;
  return p;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Real uniform(Real lo, Real hi) { return std::uniform_real_distribution<Real>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  SgParameters parameters()
  {
    SgParameters p;
    p.J = uniform(1.0, 50.0);
    p.D_p = uniform(10.0, 300.0);
    p.T_m = uniform(1e3, 8e4);
    p.m_if = uniform(10.0, 80.0);
    p.L_s = uniform(0.01, 1.0);
    p.R_s = uniform(0.5, 40.0);
    p.V = uniform(1e3, 2e4);
    p.omega_g = uniform(100.0, 400.0);
    return p;
  }

private:
  std::mt19937_64 eng_;
};

inline Real rel_err(Real a, Real b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Adaptive Simpson quadrature with Richardson correction.
inline Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b, Real tol, int depth = 50)
{
  struct Rec {
    const std::function<Real(Real)>& f;
    Real run(Real a, Real b, Real fa, Real fm, Real fb, Real whole, Real tol, int depth) const
    {
      const Real m = 0.5 * (a + b);
      const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const Real flm = f(lm), frm = f(rm);
      const Real left = (m - a) / 6 * (fa + 4 * flm + fm);
      const Real right = (b - m) / 6 * (fm + 4 * frm + fb);
      const Real delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
      return run(a, m, fa, flm, fm, left, tol / 2, depth - 1) + run(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }
  };
  if (a == b) return 0.0;
  const Real fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Real whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return Rec{f}.run(a, b, fa, fm, fb, whole, tol, depth);
}

// Matrix exponential by scaling and squaring of a truncated Taylor series.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a)
{
  const Real norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd b = a / std::ldexp(1.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / k;
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

// Stator currents from the variation-of-constants formula. With
// z = i_d + j i_q the current equations read z' = (-p - j omega) z + u(t),
// u = (V sin delta + j (V cos delta - m_if omega)) / L_s, so
// z(t) = e^{-p t - j Theta(t)} [z0 + int_0^t e^{p tau + j Theta(tau)} u(tau) dtau]
// with Theta the accumulated rotor speed. omega and delta are sampled on the
// grid `t`; both integrals use the composite trapezoid rule, so the grid has
// to be fine compared with 1/omega.
inline std::vector<std::complex<Real>> currents_by_quadrature(const SgParameters& prm, std::complex<Real> z0,
                                                              const std::vector<Real>& t,
                                                              const std::vector<Real>& omega,
                                                              const std::vector<Real>& delta)
{
  using C = std::complex<Real>;
  const Real p = prm.R_s / prm.L_s;
  const std::size_t n = t.size();
  std::vector<C> out(n);
  out[0] = z0;
  Real theta = 0.0;
  C integral(0.0);
  C prev = C(prm.V * std::sin(delta[0]), prm.V * std::cos(delta[0]) - prm.m_if * omega[0]) / prm.L_s;
  for (std::size_t k = 1; k < n; ++k) {
    const Real h = t[k] - t[k - 1];
    theta += 0.5 * h * (omega[k] + omega[k - 1]);
    const C u = C(prm.V * std::sin(delta[k]), prm.V * std::cos(delta[k]) - prm.m_if * omega[k]) / prm.L_s;
    const C cur = std::exp(C(p * t[k], theta)) * u;
    integral += 0.5 * h * (cur + prev);
    prev = cur;
    out[k] = std::exp(C(-p * t[k], -theta)) * (z0 + integral);
  }
  return out;
}

}  // namespace swingcert::test
