#include "support.hpp"

#include "swingcert/equilibria.hpp"
#include "swingcert/sg_core.hpp"
#include "swingcert/simulator.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace swingcert;
using namespace swingcert::test;

namespace {

IntegratorConfig config(Real t_end, Real dt, Real rel = 1e-9)
{
  IntegratorConfig cfg;
  cfg.t_end = t_end;
  cfg.sample_dt = dt;
  cfg.rel_tol = rel;
  return cfg;
}

bool same_verdict(const TrajectoryVerdict& a, const TrajectoryVerdict& b)
{
  return a.kind == b.kind && a.branch == b.branch && a.stability == b.stability && a.sheet == b.sheet &&
         a.period == b.period && a.mean_omega == b.mean_omega && a.crossings == b.crossings;
}

class ThreadsEnv {
public:
  explicit ThreadsEnv(const char* value) { setenv("SWINGCERT_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("SWINGCERT_THREADS"); }
};

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation")
{
  IntegratorConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.rel_tol = 0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.t_end = -1;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.sample_dt = 0;
  CHECK_THROWS_AS(integrate<2>([](Real, const Vector2& x) { return x; }, Vector2(1, 0), cfg), DomainError);
}

TEST_CASE("sample times are uniform and end at t_end")
{
  const auto traj = integrate<2>([](Real, const Vector2& x) { return Vector2(x(1), -x(0)); }, Vector2(1, 0),
                                 config(1.05, 0.1));
  REQUIRE(traj.times.size() == 12);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 1.05);
  for (std::size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("linear system against the matrix exponential")
{
  Rng rng(201);
  for (Method m : {Method::RK45, Method::RK4}) {
    for (int k = 0; k < 5; ++k) {
      Matrix4 a;
      for (int i = 0; i < 16; ++i) a(i) = rng.uniform(-2, 2);
      const Vector4 x0(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      IntegratorConfig cfg = config(1.0, 0.01);
      cfg.method = m;
      if (m == Method::RK4) cfg.max_step = 1e-3;
      const auto traj = integrate<4>([&a](Real, const Vector4& x) { return (a * x).eval(); }, x0, cfg);
      const Vector4 exact = expm(a) * x0;
      CHECK((traj.states.back() - exact).norm() <= 1e-8 * exact.norm());
      // Dense output in the middle of the run.
      const Vector4 mid = expm(a * 0.37) * x0;
      CHECK((traj.states[37] - mid).norm() <= 1e-8 * mid.norm());
    }
  }
}

TEST_CASE("RK4 converges at fourth order")
{
  const SgParameters prm = machine_n30();
  const SgState x0 = make_state(10.0, -20.0, 320.0, 0.3);
  IntegratorConfig ref_cfg = config(0.2, 0.2, 1e-12);
  ref_cfg.abs_tol = 1e-13;
  const SgState ref = simulate_full(prm, x0, ref_cfg).states.back();
  Real errs[3];
  int i = 0;
  for (Real h : {4e-4, 2e-4, 1e-4}) {
    IntegratorConfig cfg = config(0.2, 0.2);
    cfg.method = Method::RK4;
    cfg.max_step = h;
    errs[i++] = (simulate_full(prm, x0, cfg).states.back() - ref).cwiseQuotient(state_scale(prm)).norm();
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(16.0).epsilon(0.25));
  CHECK(errs[1] / errs[2] == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("step-size underflow raises a numerical error with the state")
{
  const auto blowup = [](Real, const Vector2& x) { return Vector2(x(0) * x(0), 0.0); };
  try {
    integrate<2>(blowup, Vector2(1.0, 2.0), config(2.0, 0.1));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.time() < 1.0 + 1e-9);
    CHECK(e.time() > 0.9);
    CHECK(e.state()(1) == 2.0);
  }
}

TEST_CASE("equilibrium is invariant and detected")
{
  const SgParameters prm = machine_n30();
  const auto eqs = solve_equilibria(prm);
  const SgState x0 = eqs.front().state;
  const auto traj = simulate_full(prm, x0, config(10.0, 1e-2));
  for (const auto& x : traj.states) CHECK((x - x0).cwiseQuotient(state_scale(prm)).cwiseAbs().maxCoeff() < 1e-6);
  const TrajectoryVerdict v = classify_trajectory(traj, prm, eqs);
  CHECK(v.kind == VerdictKind::ConvergedToEquilibrium);
  CHECK(v.branch == 1);
  CHECK(v.stability == Stability::Stable);
  CHECK(v.sheet == 0);

  SgState shifted = x0;
  shifted(kDelta) += 2 * kTwoPi;
  const TrajectoryVerdict vs = classify_trajectory(simulate_full(prm, shifted, config(1.0, 1e-2)), prm, eqs);
  CHECK(vs.kind == VerdictKind::ConvergedToEquilibrium);
  CHECK(vs.sheet == 2);
  CHECK(to_string(VerdictKind::PeriodicOrbit) == "PeriodicOrbit");
}

TEST_CASE("converging trajectory is not reported as an orbit")
{
  const SgParameters prm = machine_n30();
  const auto eqs = solve_equilibria(prm);
  const auto traj = simulate_full(prm, make_state(50, -50, 200, 2.0), config(default_horizon(eqs), 2e-4));
  const TrajectoryVerdict v = classify_trajectory(traj, prm, eqs);
  CHECK(v.kind == VerdictKind::ConvergedToEquilibrium);
  CHECK(v.stability == Stability::Stable);
  CHECK(detect_periodic(traj, prm).kind != VerdictKind::PeriodicOrbit);
}

TEST_CASE("R_s = 2.16 variant settles on a periodic orbit")
{
  const SgParameters prm = machine_rs216();
  const auto eqs = solve_equilibria(prm);
  const SgState x0 = make_state(0, 0, 0, 0);
  const auto traj = simulate_full(prm, x0, config(30.0, 1e-4));
  const TrajectoryVerdict v = classify_trajectory(traj, prm, eqs);
  REQUIRE(v.kind == VerdictKind::PeriodicOrbit);
  CHECK(v.period == doctest::Approx(0.16).epsilon(0.02 / 0.16));
  CHECK(v.omega_below_grid);
  CHECK(v.mean_omega < prm.omega_g);
  CHECK(traj.states.back()(kDelta) < traj.states[traj.states.size() / 2](kDelta));

  SgState shifted = x0;
  shifted(kDelta) += kTwoPi;
  const TrajectoryVerdict vs = classify_trajectory(simulate_full(prm, shifted, config(30.0, 1e-4)), prm, eqs);
  REQUIRE(vs.kind == VerdictKind::PeriodicOrbit);
  CHECK(vs.period == doctest::Approx(v.period).epsilon(1e-6));
}

TEST_CASE("D_p = 15 variant has a periodic orbit")
{
  const SgParameters prm = machine_dp15();
  const auto eqs = solve_equilibria(prm);
  const auto traj = simulate_full(prm, make_state(0, 0, 100, 0), config(20.0, 1e-4));
  const TrajectoryVerdict v = classify_trajectory(traj, prm, eqs);
  CHECK(v.kind == VerdictKind::PeriodicOrbit);
  CHECK(v.period > 0.0);
}

TEST_CASE("too few section crossings is undecided")
{
  const SgParameters prm = machine_rs216();
  const auto traj = simulate_full(prm, make_state(0, 0, 0, 0), config(0.2, 1e-4));
  const TrajectoryVerdict v = detect_periodic(traj, prm);
  CHECK(v.kind == VerdictKind::Undecided);
  CHECK(v.crossings < 3);
}

TEST_CASE("storage energy along a trajectory")
{
  const SgParameters prm = machine_n30();
  const auto traj = simulate_full(prm, make_state(80, -60, 250, 1.0), config(0.5, 1e-5, 1e-11));
  for (std::size_t k = 1; k + 1 < traj.states.size(); k += 37) {
    const StorageEnergy s = storage_energy(traj.states[k], prm);
    CHECK(s.Wdot <= s.C + 1e-6 * s.C);
    const Real h = traj.times[k + 1] - traj.times[k - 1];
    const Real fd =
        (storage_energy(traj.states[k + 1], prm).W - storage_energy(traj.states[k - 1], prm).W) / h;
    CHECK(fd == doctest::Approx(s.Wdot).epsilon(1e-4).scale(1e-3 * s.C));
  }
}

TEST_CASE("ESE cross-validation")
{
  const SgParameters prm = machine_n30();
  const auto eqs = solve_equilibria(prm);
  IntegratorConfig tight = config(10.0, 1e-3, 1e-10);
  tight.abs_tol = 1e-12;
  const SgState rest = make_state(0, 0, prm.omega_g, eqs.front().state(kDelta));
  CHECK(cross_validate(prm, rest, tight).max_delta_deviation < 1e-8);

  const BasinBox box = default_box(prm);
  for (std::uint64_t i = 0; i < 3; ++i) {
    const CrossValidation cv = cross_validate(prm, sample_initial_state(box, 5, i), tight);
    CHECK(cv.max_delta_deviation < 1e-5);
    CHECK(cv.max_iq_deviation < 1e-5);
  }
}

TEST_CASE("seeded initial states")
{
  const BasinBox box = default_box(machine_n30());
  const DerivedConstants dc = derive_constants(machine_n30());
  CHECK(box.current_max == doctest::Approx(3 * dc.i_v));
  CHECK(box.omega_hi == doctest::Approx(2 * dc.omega_g));
  for (std::uint64_t i = 0; i < 200; ++i) {
    const SgState x = sample_initial_state(box, 42, i);
    CHECK((x - sample_initial_state(box, 42, i)).norm() == 0.0);
    CHECK(std::abs(x(kId)) <= box.current_max);
    CHECK(std::abs(x(kIq)) <= box.current_max);
    CHECK(x(kOmega) >= box.omega_lo);
    CHECK(x(kOmega) < box.omega_hi);
    CHECK(x(kDelta) >= -kPi);
    CHECK(x(kDelta) < kPi);
  }
  CHECK((sample_initial_state(box, 1, 0) - sample_initial_state(box, 2, 0)).norm() > 0.0);
}

TEST_CASE("default horizon follows the slowest stable mode")
{
  const auto eqs = solve_equilibria(machine_n30());
  Real slowest = 1e300;
  for (const auto& l : eqs.front().eigenvalues) slowest = std::min(slowest, std::abs(l.real()));
  CHECK(default_horizon(eqs) == doctest::Approx(20.0 / slowest));
  CHECK(default_horizon({}) == 60.0);
}

TEST_CASE("basin sampling")
{
  const SgParameters prm = machine_n30();
  const auto eqs = solve_equilibria(prm);
  IntegratorConfig cfg = config(default_horizon(eqs), 2e-4, 1e-6);
  CHECK_THROWS_AS(basin_sample(prm, 0, default_box(prm), 1, cfg), DomainError);

  BasinStats one, many;
  {
    ThreadsEnv env("1");
    CHECK(worker_threads() == 1);
    one = basin_sample(prm, 100, default_box(prm), 9, cfg);
  }
  {
    ThreadsEnv env("4");
    CHECK(worker_threads() == 4);
    many = basin_sample(prm, 100, default_box(prm), 9, cfg);
  }
  CHECK(one.converged_stable == 100);
  CHECK(one.converged_unstable == 0);
  CHECK(one.periodic == 0);
  CHECK(one.undecided == 0);
  REQUIRE(many.verdicts.size() == one.verdicts.size());
  for (std::size_t i = 0; i < one.verdicts.size(); ++i) {
    CHECK(same_verdict(one.verdicts[i], many.verdicts[i]));
    CHECK((one.initial_states[i] - many.initial_states[i]).norm() == 0.0);
  }
}

TEST_CASE("basin sampling finds orbits for the R_s = 2.16 variant")
{
  const SgParameters prm = machine_rs216();
  const auto eqs = solve_equilibria(prm);
  const BasinStats s = basin_sample(prm, 100, default_box(prm), 3, config(default_horizon(eqs), 2e-4, 1e-6));
  CHECK(s.periodic > 0);
  CHECK(s.converged_stable + s.converged_unstable + s.periodic + s.undecided == 100);
}

}  // TEST_SUITE
