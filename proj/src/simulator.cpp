#include "swingcert/simulator.hpp"

#include "swingcert/sg_core.hpp"

#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

namespace swingcert {

namespace detail {

void throw_step_underflow(Real t, const Real* state, int n)
{
  Vector4 diag = Vector4::Constant(std::nan(""));
  for (int i = 0; i < std::min(n, 4); ++i) diag(i) = state[i];
  std::ostringstream msg;
  msg << "step-size underflow at t=" << t << " (stiff or non-finite dynamics)";
  throw NumericalError(msg.str(), diag, t);
}

}  // namespace detail

void validate(const IntegratorConfig& cfg)
{
  if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0)) throw DomainError("integrator tolerances must be > 0");
  if (!(cfg.t_end > 0)) throw DomainError("integrator t_end must be > 0");
  if (!(cfg.sample_dt > 0)) throw DomainError("integrator sample_dt must be > 0");
  if (cfg.max_step < 0) throw DomainError("integrator max_step must be >= 0");
}

std::string_view to_string(VerdictKind k)
{
  switch (k) {
    case VerdictKind::ConvergedToEquilibrium: return "ConvergedToEquilibrium";
    case VerdictKind::PeriodicOrbit: return "PeriodicOrbit";
    case VerdictKind::Undecided: return "Undecided";
  }
  return "?";
}

Trajectory<4> simulate_full(const SgParameters& params, const SgState& x0, const IntegratorConfig& cfg)
{
  validate(params);
  return integrate<4>([&params](Real, const Vector4& x) { return model_rhs(x, params); }, x0, cfg);
}

Trajectory<4> simulate_ese(const SgParameters& params, const SgState& x0, const IntegratorConfig& cfg)
{
  const SwingSystem sys(params, EseInitial{x0(kId), x0(kIq), x0(kDelta)});
  return integrate<4>(sys, ese_initial_state(x0, sys.constants()), cfg);
}

TrajectoryVerdict detect_convergence(const Trajectory<4>& traj, const SgParameters& params,
                                     const std::vector<EquilibriumPoint>& equilibria, Real tol)
{
  TrajectoryVerdict v;
  if (traj.states.empty()) return v;
  const Vector4 scale = state_scale(params);
  const std::size_t n = traj.states.size();
  const std::size_t first = n - std::max<std::size_t>(1, n / 10);

  for (const auto& eq : equilibria) {
    bool inside = true;
    for (std::size_t k = first; k < n && inside; ++k) {
      Vector4 diff = traj.states[k] - eq.state;
      diff(kDelta) = std::remainder(diff(kDelta), kTwoPi);
      inside = diff.cwiseQuotient(scale).cwiseAbs().maxCoeff() <= tol;
    }
    if (inside) {
      v.kind = VerdictKind::ConvergedToEquilibrium;
      v.branch = eq.branch;
      v.stability = eq.classification;
      v.sheet = std::lround((traj.states.back()(kDelta) - eq.state(kDelta)) / kTwoPi);
      return v;
    }
  }
  return v;
}

TrajectoryVerdict detect_periodic(const Trajectory<4>& traj, const SgParameters& params,
                                  const PeriodicOptions& opt)
{
  TrajectoryVerdict v;
  const std::size_t n = traj.states.size();
  if (n < 4) return v;
  const std::size_t first = n / 2;
  const Real delta_end = traj.states.back()(kDelta);
  const Real drift = delta_end - traj.states[first](kDelta);
  if (drift == 0.0) return v;
  const Real dir = drift < 0 ? -1.0 : 1.0;

  // Poincare plane at delta = delta_end (mod 2 pi), crossed in the drift direction.
  struct Crossing {
    Real t;
    Vector4 x;
  };
  std::vector<Crossing> crossings;
  for (std::size_t k = first; k + 1 < n; ++k) {
    const Real u0 = dir * (traj.states[k](kDelta) - delta_end) / kTwoPi;
    const Real u1 = dir * (traj.states[k + 1](kDelta) - delta_end) / kTwoPi;
    for (Real level = std::floor(u0) + 1.0; level <= u1 && u1 > u0; level += 1.0) {
      if (level >= 0.0) break;
      const Real s = (level - u0) / (u1 - u0);
      crossings.push_back({traj.times[k] + s * (traj.times[k + 1] - traj.times[k]),
                           traj.states[k] + s * (traj.states[k + 1] - traj.states[k])});
    }
  }
  v.crossings = static_cast<int>(crossings.size());
  if (crossings.size() < 3) return v;

  const Vector4 scale = state_scale(params);
  const std::size_t m = std::min<std::size_t>(crossings.size(), static_cast<std::size_t>(opt.compare_crossings));
  const std::size_t start = crossings.size() - m;
  Real period_sum = 0.0;
  for (std::size_t k = start + 1; k < crossings.size(); ++k) {
    const Vector4 diff = (crossings[k].x - crossings[k - 1].x).cwiseQuotient(scale);
    if (diff.head<3>().cwiseAbs().maxCoeff() > opt.state_tol) return v;
    period_sum += crossings[k].t - crossings[k - 1].t;
  }
  const Real period = period_sum / static_cast<Real>(m - 1);
  for (std::size_t k = start + 1; k < crossings.size(); ++k) {
    if (std::abs(crossings[k].t - crossings[k - 1].t - period) > opt.period_rel_tol * period) return v;
  }

  const Real t_lo = crossings[crossings.size() - 2].t;
  const Real t_hi = crossings.back().t;
  Real omega_sum = 0.0, omega_max = -std::numeric_limits<Real>::infinity();
  int count = 0;
  for (std::size_t k = first; k < n; ++k) {
    if (traj.times[k] < t_lo || traj.times[k] > t_hi) continue;
    omega_sum += traj.states[k](kOmega);
    omega_max = std::max(omega_max, traj.states[k](kOmega));
    ++count;
  }
  v.kind = VerdictKind::PeriodicOrbit;
  v.period = period;
  v.mean_omega = count > 0 ? omega_sum / count : std::nan("");
  v.omega_below_grid = count > 0 && omega_max < params.omega_g;
  return v;
}

TrajectoryVerdict classify_trajectory(const Trajectory<4>& traj, const SgParameters& params,
                                      const std::vector<EquilibriumPoint>& equilibria)
{
  TrajectoryVerdict v = detect_convergence(traj, params, equilibria);
  if (v.kind == VerdictKind::ConvergedToEquilibrium) return v;
  return detect_periodic(traj, params);
}

Real default_horizon(const std::vector<EquilibriumPoint>& equilibria)
{
  for (const auto& eq : equilibria) {
    if (eq.classification != Stability::Stable) continue;
    Real slowest = std::numeric_limits<Real>::infinity();
    for (const auto& l : eq.eigenvalues) slowest = std::min(slowest, std::abs(l.real()));
    if (slowest > 0 && std::isfinite(slowest)) return 20.0 / slowest;
  }
  return 60.0;
}

BasinBox default_box(const SgParameters& params)
{
  const DerivedConstants dc = derive_constants(params);
  BasinBox box;
  box.current_max = 3.0 * dc.i_v;
  box.omega_lo = 0.0;
  box.omega_hi = 2.0 * params.omega_g;
  return box;
}

SgState sample_initial_state(const BasinBox& box, std::uint64_t seed, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  // Own mapping to [0, 1): std::uniform_real_distribution is not portable bit-for-bit.
  const auto unit = [&rng] { return static_cast<Real>(rng() >> 11) * 0x1.0p-53; };
  const auto uniform = [&](Real lo, Real hi) { return lo + (hi - lo) * unit(); };
  const Real i_d = uniform(-box.current_max, box.current_max);
  const Real i_q = uniform(-box.current_max, box.current_max);
  const Real w = uniform(box.omega_lo, box.omega_hi);
  const Real delta = uniform(box.delta_lo, box.delta_hi);
  return make_state(i_d, i_q, w, delta);
}

unsigned worker_threads()
{
  if (const char* env = std::getenv("SWINGCERT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BasinStats basin_sample(const SgParameters& params, int n, const BasinBox& box, std::uint64_t seed,
                        const IntegratorConfig& cfg)
{
  if (n < 1) throw DomainError("basin_sample: n must be >= 1");
  validate(params);
  validate(cfg);
  const auto eqs = solve_equilibria(params);

  BasinStats stats;
  const auto count = static_cast<std::size_t>(n);
  stats.initial_states.resize(count);
  stats.verdicts.resize(count);
  for (std::size_t i = 0; i < count; ++i) stats.initial_states[i] = sample_initial_state(box, seed, i);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        const auto traj = simulate_full(params, stats.initial_states[i], cfg);
        stats.verdicts[i] = classify_trajectory(traj, params, eqs);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const auto& v : stats.verdicts) {
    switch (v.kind) {
      case VerdictKind::ConvergedToEquilibrium:
        (v.stability == Stability::Stable ? stats.converged_stable : stats.converged_unstable)++;
        break;
      case VerdictKind::PeriodicOrbit: stats.periodic++; break;
      case VerdictKind::Undecided: stats.undecided++; break;
    }
  }
  return stats;
}

CrossValidation cross_validate(const SgParameters& params, const SgState& x0, const IntegratorConfig& cfg)
{
  const auto full = simulate_full(params, x0, cfg);
  const SwingSystem sys(params, EseInitial{x0(kId), x0(kIq), x0(kDelta)});
  const auto ese = integrate<4>(sys, ese_initial_state(x0, sys.constants()), cfg);

  CrossValidation out;
  for (std::size_t k = 0; k < full.times.size(); ++k) {
    const SgState from_ese = ese_to_full(ese.times[k], ese.states[k], sys);
    out.max_delta_deviation =
        std::max(out.max_delta_deviation, std::abs(full.states[k](kDelta) - from_ese(kDelta)));
    out.max_iq_deviation =
        std::max(out.max_iq_deviation, std::abs(full.states[k](kIq) - from_ese(kIq)) /
                                           std::max<Real>(1.0, std::abs(full.states[k](kIq))));
  }
  return out;
}

}  // namespace swingcert
