#pragma once

#include "swingcert/equilibria.hpp"
#include "swingcert/swing.hpp"
#include "swingcert/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace swingcert {

enum class Method { RK4, RK45 };

struct IntegratorConfig {
  Method method = Method::RK45;
  Real rel_tol = 1e-9;
  Real abs_tol = 1e-11;
  Real max_step = 0.0;    ///< 0: unbounded for RK45; RK4 uses max_step or sample_dt
  Real t_end = 10.0;
  Real sample_dt = 1e-3;  ///< spacing of dense-output samples
  std::uint64_t seed = 0;
};

/// Throws DomainError for non-positive tolerances or horizon.
void validate(const IntegratorConfig& cfg);

enum class VerdictKind { ConvergedToEquilibrium, PeriodicOrbit, Undecided };

std::string_view to_string(VerdictKind k);

struct TrajectoryVerdict {
  VerdictKind kind = VerdictKind::Undecided;
  // ConvergedToEquilibrium
  int branch = 0;
  Stability stability = Stability::NonHyperbolic;
  long sheet = 0;  ///< delta_final ~ delta_e + 2 pi sheet
  // PeriodicOrbit
  Real period = 0;
  Real mean_omega = 0;
  bool omega_below_grid = false;  ///< omega < omega_g on the whole last period
  int crossings = 0;
};

template <int N>
struct Trajectory {
  std::vector<Real> times;
  std::vector<Vec<Real, N>> states;
  TrajectoryVerdict verdict;
};

namespace detail {

// Dormand-Prince 5(4) tableau with Hairer's 4th-order continuous extension.
struct DoPri {
  static constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr Real a21 = 1.0 / 5;
  static constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
  static constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr Real a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr Real d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

inline std::vector<Real> uniform_samples(Real t0, Real t_end, Real dt)
{
  std::vector<Real> ts;
  const auto n = static_cast<long>(std::floor((t_end - t0) / dt + 1e-9));
  ts.reserve(static_cast<std::size_t>(n) + 2);
  for (long k = 0; k <= n; ++k) ts.push_back(t0 + static_cast<Real>(k) * dt);
  if (t_end - ts.back() > 1e-12 * std::max<Real>(1.0, std::abs(t_end))) ts.push_back(t_end);
  else ts.back() = t_end;
  return ts;
}

template <int N>
Vec<Real, N> hermite(Real theta, Real h, const Vec<Real, N>& y0, const Vec<Real, N>& y1,
                     const Vec<Real, N>& f0, const Vec<Real, N>& f1)
{
  const Real t2 = theta * theta, t3 = t2 * theta;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * h * f0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * f1;
}

[[noreturn]] void throw_step_underflow(Real t, const Real* state, int n);

}  // namespace detail

/// Integrates x' = rhs(t, x) from (t0, x0) and returns the solution at the
/// requested sample times (ascending, first >= t0). RK45 uses an embedded
/// error estimate with dense output; RK4 uses fixed steps with cubic Hermite
/// interpolation between them.
template <int N, typename Rhs>
Trajectory<N> integrate_at(Rhs&& rhs, const Vec<Real, N>& x0, Real t0,
                           const std::vector<Real>& samples, const IntegratorConfig& cfg)
{
  using State = Vec<Real, N>;
  Trajectory<N> traj;
  if (samples.empty()) return traj;
  traj.times.reserve(samples.size());
  traj.states.reserve(samples.size());
  const Real t_final = samples.back();
  std::size_t next = 0;
  auto emit_until = [&](Real t_hi, auto&& interp) {
    while (next < samples.size() && samples[next] <= t_hi) {
      traj.times.push_back(samples[next]);
      traj.states.push_back(interp(samples[next]));
      ++next;
    }
  };

  Real t = t0;
  State y = x0;
  State f = rhs(t, y);
  emit_until(t, [&](Real) { return y; });

  if (cfg.method == Method::RK4) {
    const Real h_target = cfg.max_step > 0 ? cfg.max_step : cfg.sample_dt;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil((t_final - t0) / h_target - 1e-9)));
    const Real h = (t_final - t0) / static_cast<Real>(steps);
    for (long k = 0; k < steps; ++k) {
      const State k1 = f;
      const State k2 = rhs(t + h / 2, (y + h / 2 * k1).eval());
      const State k3 = rhs(t + h / 2, (y + h / 2 * k2).eval());
      const State k4 = rhs(t + h, (y + h * k3).eval());
      const State y1 = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      const Real t1 = (k + 1 == steps) ? t_final : t0 + static_cast<Real>(k + 1) * h;
      const State f1 = rhs(t1, y1);
      emit_until(t1, [&](Real ts) { return detail::hermite<N>((ts - t) / h, h, y, y1, f, f1); });
      t = t1;
      y = y1;
      f = f1;
    }
    return traj;
  }

  using D = detail::DoPri;
  const Real span = t_final - t0;
  const Real h_max = cfg.max_step > 0 ? cfg.max_step : span;
  // Initial step from the local derivative scale.
  const State sc0 = (cfg.abs_tol + cfg.rel_tol * y.array().abs()).matrix();
  const Real d0 = (y.array() / sc0.array()).matrix().norm() / std::sqrt(Real(N));
  const Real d1 = (f.array() / sc0.array()).matrix().norm() / std::sqrt(Real(N));
  Real h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min({h, h_max, span > 0 ? span : 1.0});

  while (t < t_final) {
    if (t + h > t_final) h = t_final - t;
    if (h < 1e-14 * std::max<Real>(1.0, std::abs(t))) detail::throw_step_underflow(t, y.data(), N);
    const State k1 = f;
    const State k2 = rhs(t + D::c2 * h, (y + h * D::a21 * k1).eval());
    const State k3 = rhs(t + D::c3 * h, (y + h * (D::a31 * k1 + D::a32 * k2)).eval());
    const State k4 = rhs(t + D::c4 * h, (y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3)).eval());
    const State k5 = rhs(t + D::c5 * h,
                         (y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4)).eval());
    const State k6 = rhs(t + h, (y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 +
                                          D::a65 * k5)).eval());
    const State y1 = y + h * (D::a71 * k1 + D::a73 * k3 + D::a74 * k4 + D::a75 * k5 + D::a76 * k6);
    const State k7 = rhs(t + h, y1);
    const State err = h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 + D::e7 * k7);
    const State sc = (cfg.abs_tol + cfg.rel_tol * y.array().abs().max(y1.array().abs())).matrix();
    const Real en = (err.array() / sc.array()).matrix().norm() / std::sqrt(Real(N));
    if (!std::isfinite(en)) detail::throw_step_underflow(t, y.data(), N);

    if (en <= 1.0) {
      const Real t1 = (t + h >= t_final) ? t_final : t + h;
      const State r2 = y1 - y;
      const State r3 = h * k1 - r2;
      const State r4 = r2 - h * k7 - r3;
      const State r5 = h * (D::d1 * k1 + D::d3 * k3 + D::d4 * k4 + D::d5 * k5 + D::d6 * k6 + D::d7 * k7);
      emit_until(t1, [&](Real ts) {
        const Real th = (ts - t) / h;
        return (y + th * (r2 + (1 - th) * (r3 + th * (r4 + (1 - th) * r5)))).eval();
      });
      t = t1;
      y = y1;
      f = k7;
    }
    const Real fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    h = std::min(h_max, h * std::clamp(fac, 0.2, 5.0));
  }
  return traj;
}

/// integrate_at over uniform samples t0, t0 + sample_dt, ..., t0 + t_end.
template <int N, typename Rhs>
Trajectory<N> integrate(Rhs&& rhs, const Vec<Real, N>& x0, const IntegratorConfig& cfg, Real t0 = 0.0)
{
  validate(cfg);
  return integrate_at<N>(std::forward<Rhs>(rhs), x0, t0,
                         detail::uniform_samples(t0, t0 + cfg.t_end, cfg.sample_dt), cfg);
}

/// Full-model trajectory from x0.
Trajectory<4> simulate_full(const SgParameters& params, const SgState& x0, const IntegratorConfig& cfg);

/// ESE trajectory matched to the full-model initial state x0.
Trajectory<4> simulate_ese(const SgParameters& params, const SgState& x0, const IntegratorConfig& cfg);

/// Convergence tolerance used by classify_trajectory (scaled state units).
inline constexpr Real kConvergenceTol = 1e-4;

/// ConvergedToEquilibrium if every sample in the last 10% of the trajectory
/// is within `tol` (scaled, delta mod 2 pi) of one equilibrium.
TrajectoryVerdict detect_convergence(const Trajectory<4>& traj, const SgParameters& params,
                                     const std::vector<EquilibriumPoint>& equilibria,
                                     Real tol = kConvergenceTol);

/// Poincare-plane periodic-orbit test on the second half of the trajectory.
struct PeriodicOptions {
  Real state_tol = 1e-3;     ///< scaled (i_d, i_q, omega) agreement between crossings
  Real period_rel_tol = 0.01;
  int compare_crossings = 4;  ///< how many trailing crossings must agree
};

TrajectoryVerdict detect_periodic(const Trajectory<4>& traj, const SgParameters& params,
                                  const PeriodicOptions& opt = {});

/// Convergence first, then periodicity, else Undecided.
TrajectoryVerdict classify_trajectory(const Trajectory<4>& traj, const SgParameters& params,
                                      const std::vector<EquilibriumPoint>& equilibria);

/// 20 / (slowest decay rate of the stable equilibrium), else 60 s.
Real default_horizon(const std::vector<EquilibriumPoint>& equilibria);

struct BasinBox {
  Real current_max = 0;  ///< |i_d|, |i_q| <= current_max
  Real omega_lo = 0, omega_hi = 0;
  Real delta_lo = -kPi, delta_hi = kPi;
};

/// |i_d|, |i_q| <= 3 i_v, omega in [0, 2 omega_g], delta in [-pi, pi).
BasinBox default_box(const SgParameters& params);

/// Deterministic initial state for sample `index` of a seeded run.
SgState sample_initial_state(const BasinBox& box, std::uint64_t seed, std::uint64_t index);

struct BasinStats {
  int converged_stable = 0;
  int converged_unstable = 0;
  int periodic = 0;
  int undecided = 0;
  std::vector<SgState> initial_states;       ///< in sample order
  std::vector<TrajectoryVerdict> verdicts;   ///< in sample order
};

/// Classifies n seeded random trajectories; runs them on up to
/// SWINGCERT_THREADS threads with order-independent aggregation.
BasinStats basin_sample(const SgParameters& params, int n, const BasinBox& box, std::uint64_t seed,
                        const IntegratorConfig& cfg);

/// Worker count from SWINGCERT_THREADS, else hardware concurrency.
unsigned worker_threads();

struct CrossValidation {
  Real max_delta_deviation = 0;  ///< max |delta_full - delta_ese|, rad
  Real max_iq_deviation = 0;     ///< max |i_q,full - i_q,ese| / max(1, |i_q,full|)
};

/// Integrates the full model and the ESE from matched initial conditions and
/// compares them at common sample times.
CrossValidation cross_validate(const SgParameters& params, const SgState& x0,
                               const IntegratorConfig& cfg);

}  // namespace swingcert
