#include "support.hpp"

#include "swingcert/design.hpp"
#include "swingcert/sg_core.hpp"

#include <doctest.h>

using namespace swingcert;
using namespace swingcert::test;

namespace {

NominalSpec nominal()
{
  NominalSpec s;
  s.P_n = 500e3;
  s.V = 6000.0 * std::sqrt(3.0);
  s.omega_g = 100 * kPi;
  s.d_p = 3;
  s.H_seconds = 2;
  s.L_drop_pct = 4;
  s.R_drop_pct = 0.5;
  s.n = 1;
  return s;
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("500 kW example sizing")
{
  const SgParameters p = size_parameters(nominal());
  CHECK(p.D_p == doctest::Approx(168.87).epsilon(0.01));
  CHECK(p.T_m == doctest::Approx(54640).epsilon(0.01));
  CHECK(p.J == doctest::Approx(20.26).epsilon(0.01));
  CHECK(p.L_s == doctest::Approx(27.5e-3).epsilon(0.01));
  CHECK(p.R_s == doctest::Approx(1.08).epsilon(0.01));
  CHECK(p.m_if == doctest::Approx(33.11).epsilon(0.01));
  CHECK(p.V == nominal().V);
  CHECK(p.omega_g == nominal().omega_g);
}

TEST_CASE("virtual inductor n = 30")
{
  NominalSpec s = nominal();
  s.n = 30;
  const SgParameters p = design(s);
  CHECK(p.L_s == doctest::Approx(0.82506).epsilon(0.01));
  CHECK(p.R_s == doctest::Approx(32.4).epsilon(0.01));
  CHECK(p.m_if == doctest::Approx(51.67).epsilon(0.01));
  CHECK(field_flux(s, 30 * size_parameters(s).L_s) == doctest::Approx(51.67).epsilon(0.01));
}

TEST_CASE("sizing identities")
{
  Rng rng(301);
  for (int k = 0; k < 200; ++k) {
    NominalSpec s;
    s.P_n = rng.uniform(1e3, 1e7);
    s.V = rng.uniform(200, 2e4);
    s.omega_g = rng.uniform(100, 400);
    s.d_p = rng.uniform(0.5, 10);
    s.H_seconds = rng.uniform(2, 12);
    s.L_drop_pct = rng.uniform(3, 5);
    s.R_drop_pct = rng.uniform(0.01, 0.5);
    const SgParameters p = size_parameters(s);
    const Real v_rms = s.V / std::sqrt(3.0), i_rms = s.P_n / (3 * v_rms);
    CHECK(rel_err(p.T_m - p.D_p * s.omega_g, s.P_n / s.omega_g) < 1e-12);
    CHECK(rel_err(p.J * s.omega_g * s.omega_g / 2 / s.P_n, s.H_seconds) < 1e-13);
    CHECK(rel_err(s.omega_g * p.L_s * i_rms / v_rms, s.L_drop_pct / 100) < 1e-13);
    CHECK(rel_err(p.R_s * i_rms / v_rms, s.R_drop_pct / 100) < 1e-13);

    // Doubling the droop halves D_p and leaves T_a alone.
    NominalSpec s2 = s;
    s2.d_p *= 2;
    const SgParameters p2 = size_parameters(s2);
    CHECK(rel_err(p2.D_p, p.D_p / 2) < 1e-13);
    CHECK(rel_err(p2.T_m - p2.D_p * s.omega_g, p.T_m - p.D_p * s.omega_g) < 1e-12);

    // Multiplicative virtual inductor.
    const Real n1 = rng.uniform(1, 10), n2 = rng.uniform(1, 10);
    const SgParameters a = apply_virtual_inductor(apply_virtual_inductor(p, n1), n2);
    const SgParameters b = apply_virtual_inductor(p, n1 * n2);
    CHECK(rel_err(a.L_s, b.L_s) < 1e-13);
    CHECK(rel_err(a.R_s, b.R_s) < 1e-13);
    CHECK(rel_err(a.m_if, b.m_if) < 1e-12);
    CHECK(rel_err(derive_constants(a).p, derive_constants(p).p) < 1e-13);
    // The field flux is re-sized from the same rated current.
    CHECK(rel_err(b.m_if, field_flux(s, b.L_s)) < 1e-12);
  }
}

TEST_CASE("H = 12 gives six times the inertia of H = 2")
{
  NominalSpec s = nominal();
  const Real j2 = size_parameters(s).J;
  s.H_seconds = 12;
  CHECK(size_parameters(s).J == doctest::Approx(6 * j2).epsilon(1e-15));
}

TEST_CASE("field flux at zero inductance matches the grid")
{
  const NominalSpec s = nominal();
  CHECK(field_flux(s, 0.0) == doctest::Approx(std::sqrt(3.0) * 6000.0 / s.omega_g).epsilon(1e-14));
}

TEST_CASE("damping scaling under the virtual inductor")
{
  const SgParameters p1 = size_parameters(nominal());
  for (Real n : {2.0, 10.0, 30.0}) {
    const SgParameters pn = apply_virtual_inductor(p1, n);
    const Real ratio = derive_constants(pn).alpha / derive_constants(p1).alpha;
    // alpha = D_p / sqrt(m_if i_v J) with i_v proportional to 1/n.
    CHECK(ratio == doctest::Approx(std::sqrt(n * p1.m_if / pn.m_if)).epsilon(1e-12));
    SgParameters fixed = pn;
    fixed.m_if = p1.m_if;
    CHECK(derive_constants(fixed).alpha / derive_constants(p1).alpha == doctest::Approx(std::sqrt(n)).epsilon(1e-12));
  }
}

TEST_CASE("n = 1 leaves L_s and R_s unchanged")
{
  const SgParameters p = size_parameters(nominal());
  const SgParameters q = apply_virtual_inductor(p, 1.0);
  CHECK(q.L_s == p.L_s);
  CHECK(q.R_s == p.R_s);
  CHECK(q.m_if == doctest::Approx(p.m_if).epsilon(1e-13));
}

TEST_CASE("invalid inputs")
{
  NominalSpec s = nominal();
  s.d_p = 0;
  try {
    size_parameters(s);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(e.field() == "d_p");
  }
  s = nominal();
  s.n = 0.5;
  CHECK_THROWS_AS(design(s), ParameterError);
  CHECK_THROWS_AS(apply_virtual_inductor(size_parameters(nominal()), 0.9), ParameterError);
  SgParameters stalled = size_parameters(nominal());
  stalled.T_m = stalled.D_p * stalled.omega_g;
  CHECK_THROWS_AS(apply_virtual_inductor(stalled, 2.0), ParameterError);
}

TEST_CASE("inverter voltage command")
{
  const Vector3 v(1.0, -2.0, 1.0), e(0.5, 0.5, -1.0);
  CHECK((inverter_voltage_command(v, e, 1.0) - e).norm() == 0.0);
  CHECK((inverter_voltage_command(v, v, 7.0) - v).norm() < 1e-15);
  CHECK((inverter_voltage_command(v, e, 1e12) - v).norm() < 1e-11);
  CHECK((inverter_voltage_command(v, e, 4.0) - (3.0 * v + e) / 4.0).norm() < 1e-15);
  CHECK_THROWS_AS(inverter_voltage_command(v, e, 0.5), ParameterError);
}

}  // TEST_SUITE
