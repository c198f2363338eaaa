#include "swingcert/cli.hpp"

#include "swingcert/certificate.hpp"
#include "swingcert/design.hpp"
#include "swingcert/equilibria.hpp"
#include "swingcert/io.hpp"
#include "swingcert/sg_core.hpp"
#include "swingcert/simulator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

namespace swingcert::cli {

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  int grid = GridSpec{}.n_points;
  std::uint64_t seed = 0;
  std::optional<Real> t_end;
  std::optional<int> samples;
  std::string csv;
  std::vector<Real> initial;
  std::string model = "full";
  std::string method = "rk45";
  std::optional<Real> rel_tol;
  std::optional<Real> abs_tol;
  std::optional<Real> dt;
  std::string param;
  Real from = 0, to = 0;
  int steps = 11;
  bool summary = false;
};

// Writes to --out when given, else to the caller's stream.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback)
  {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw ParameterError("out", "cannot open output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

SgParameters load_parameters(const Options& o)
{
  return resolve_parameters(load_config(o.config, o.overrides));
}

IntegratorConfig integrator_config(const Options& o, Real default_t_end, Real default_dt, Real default_rel)
{
  IntegratorConfig cfg;
  cfg.method = o.method == "rk4" ? Method::RK4 : Method::RK45;
  cfg.t_end = o.t_end.value_or(default_t_end);
  cfg.sample_dt = o.dt.value_or(default_dt);
  cfg.rel_tol = o.rel_tol.value_or(default_rel);
  if (o.abs_tol) cfg.abs_tol = *o.abs_tol;
  cfg.seed = o.seed;
  return cfg;
}

SgState initial_state(const Options& o, const SgParameters& params)
{
  if (o.initial.empty()) return make_state(0.0, 0.0, params.omega_g, 0.0);
  if (o.initial.size() != 4) throw ParameterError("initial", "--initial takes i_d,i_q,omega,delta");
  return make_state(o.initial[0], o.initial[1], o.initial[2], o.initial[3]);
}

GridSpec grid_spec(const Options& o)
{
  GridSpec g;
  g.n_points = o.grid;
  return g;
}

int cmd_design(const Options& o, std::ostream& out)
{
  const Config cfg = load_config(o.config, o.overrides);
  const auto* spec = std::get_if<NominalSpec>(&cfg);
  if (!spec) throw ParameterError("kind", "design needs a nominal_spec config");
  const SgParameters params = design(*spec);
  Sink sink(o.out, out);
  sink.stream() << to_json(params).dump(2) << '\n';
  return kSuccess;
}

int cmd_equilibria(const Options& o, std::ostream& out)
{
  const SgParameters params = load_parameters(o);
  validate(params);
  Json doc{{"constants", to_json(derive_constants(params))}, {"equilibria", to_json(solve_equilibria(params))}};
  Sink sink(o.out, out);
  sink.stream() << doc.dump(2) << '\n';
  return kSuccess;
}

int cmd_check(const Options& o, std::ostream& out)
{
  const SgParameters params = load_parameters(o);
  validate(params);
  const CertificateReport rep = check_certificate(params, grid_spec(o));
  Sink sink(o.out, out);
  sink.stream() << to_json(rep).dump(2) << '\n';
  if (o.csv == "-") {
    write_certificate_csv(sink.stream(), rep);
  } else if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) throw ParameterError("csv", "cannot open CSV file '" + o.csv + "'");
    write_certificate_csv(csv, rep);
  }
  return rep.verdict == Verdict::CertifiedAGAS ? kSuccess : kNotCertified;
}

int cmd_simulate(const Options& o, std::ostream& out)
{
  const SgParameters params = load_parameters(o);
  validate(params);
  IntegratorConfig cfg = integrator_config(o, 10.0, 1e-4, 1e-9);
  if (o.samples) {
    if (*o.samples < 1) throw ParameterError("samples", "--samples must be >= 1");
    cfg.sample_dt = cfg.t_end / *o.samples;
  }
  const SgState x0 = initial_state(o, params);
  const auto eqs = solve_equilibria(params);

  Trajectory<4> traj;
  TrajectoryModel model = TrajectoryModel::Full;
  if (o.model == "ese") {
    model = TrajectoryModel::Ese;
    traj = simulate_ese(params, x0, cfg);
    // Classify on the reconstructed full-model states.
    const SwingSystem sys(params, EseInitial{x0(kId), x0(kIq), x0(kDelta)});
    Trajectory<4> full;
    full.times = traj.times;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      full.states.push_back(ese_to_full(traj.times[k], traj.states[k], sys));
    }
    traj.verdict = classify_trajectory(full, params, eqs);
  } else {
    traj = simulate_full(params, x0, cfg);
    traj.verdict = classify_trajectory(traj, params, eqs);
  }
  Sink sink(o.out, out);
  write_trajectory_csv(sink.stream(), traj, model);
  return kSuccess;
}

int cmd_basin(const Options& o, std::ostream& out)
{
  const SgParameters params = load_parameters(o);
  validate(params);
  const auto eqs = solve_equilibria(params);
  IntegratorConfig cfg = integrator_config(o, default_horizon(eqs), 2e-4, 1e-6);
  const int n = o.samples.value_or(100);
  const BasinStats stats = basin_sample(params, n, default_box(params), o.seed, cfg);
  Json doc = to_json(stats);
  doc["seed"] = o.seed;
  doc["t_end"] = cfg.t_end;
  Sink sink(o.out, out);
  sink.stream() << doc.dump(2) << '\n';
  return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out)
{
  if (o.steps < 1) throw ParameterError("steps", "--steps must be >= 1");
  std::vector<Real> values(static_cast<std::size_t>(o.steps));
  for (int k = 0; k < o.steps; ++k) {
    values[static_cast<std::size_t>(k)] =
        o.steps == 1 ? o.from : o.from + (o.to - o.from) * static_cast<Real>(k) / (o.steps - 1);
  }
  // Reject unknown names before any work starts.
  std::vector<std::string> probe = o.overrides;
  probe.push_back(o.param + "=" + format_real(values.front()));
  (void)load_config(o.config, probe);

  const GridSpec grid = grid_spec(o);
  const auto evaluate = [&](Real value) {
    std::vector<std::string> ov = o.overrides;
    ov.push_back(o.param + "=" + format_real(value));
    const SgParameters params = resolve_parameters(load_config(o.config, ov));
    validate(params);
    return check_certificate(params, grid);
  };

  // Bounded fan-out; results are written in input order.
  std::vector<CertificateReport> reports(values.size());
  const std::size_t width = std::max<std::size_t>(1, worker_threads());
  for (std::size_t start = 0; start < values.size(); start += width) {
    std::vector<std::future<CertificateReport>> batch;
    const std::size_t stop = std::min(values.size(), start + width);
    for (std::size_t k = start; k < stop; ++k) batch.push_back(std::async(std::launch::async, evaluate, values[k]));
    for (std::size_t k = start; k < stop; ++k) reports[k] = batch[k - start].get();
  }

  Sink sink(o.out, out);
  std::ostream& os = sink.stream();
  if (o.summary) {
    os << o.param << ",verdict,relative_margin,margin,all_pass,hyperbolicity_ok\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto& r = reports[k];
      os << format_real(values[k]) << ',' << to_string(r.verdict) << ',' << format_real(r.relative_margin) << ','
         << format_real(r.margin) << ',' << (r.all_pass ? 1 : 0) << ',' << (r.hyperbolicity_ok ? 1 : 0) << '\n';
    }
  } else {
    os << o.param << ",d,nscr,omega_min_d,omega_max_d,band_ok\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
      std::ostringstream rows;
      write_certificate_csv(rows, reports[k], false);
      std::istringstream lines(rows.str());
      for (std::string line; std::getline(lines, line);) os << format_real(values[k]) << ',' << line << '\n';
    }
  }
  return kSuccess;
}

int cmd_validate(const Options& o, std::ostream& out)
{
  const SgParameters params = load_parameters(o);
  validate(params);
  const IntegratorConfig cfg = integrator_config(o, 10.0, 1e-3, 1e-10);
  std::vector<SgState> starts;
  if (!o.initial.empty() || !o.samples) {
    starts.push_back(initial_state(o, params));
  } else {
    const BasinBox box = default_box(params);
    for (int i = 0; i < *o.samples; ++i) starts.push_back(sample_initial_state(box, o.seed, static_cast<std::uint64_t>(i)));
  }
  Json runs = Json::array();
  CrossValidation worst;
  for (const auto& x0 : starts) {
    const CrossValidation cv = cross_validate(params, x0, cfg);
    worst.max_delta_deviation = std::max(worst.max_delta_deviation, cv.max_delta_deviation);
    worst.max_iq_deviation = std::max(worst.max_iq_deviation, cv.max_iq_deviation);
    Json run = to_json(cv);
    run["initial"] = {x0(kId), x0(kIq), x0(kOmega), x0(kDelta)};
    runs.push_back(run);
  }
  Json doc{{"t_end", cfg.t_end}, {"rel_tol", cfg.rel_tol}, {"worst", to_json(worst)}, {"runs", runs}};
  Sink sink(o.out, out);
  sink.stream() << doc.dump(2) << '\n';
  return kSuccess;
}

void add_common(CLI::App* sub, Options& o)
{
  sub->add_option("--config", o.config, "Parameter or nominal-spec JSON file")->required();
  sub->add_option("--set", o.overrides, "Override a config value, key=value (repeatable)")->take_all();
  sub->add_option("--out", o.out, "Output file (default: standard output)");
}

void add_integrator(CLI::App* sub, Options& o)
{
  sub->add_option("--t-end", o.t_end, "Simulation horizon, s")->check(CLI::PositiveNumber);
  sub->add_option("--dt", o.dt, "Output sample spacing, s")->check(CLI::PositiveNumber);
  sub->add_option("--method", o.method, "Integrator")->check(CLI::IsMember({"rk45", "rk4"}));
  sub->add_option("--rel-tol", o.rel_tol, "Relative tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--abs-tol", o.abs_tol, "Absolute tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Stability certificate and simulator for grid-connected synchronous generators", "swingcert"};
  app.require_subcommand(1);
  Options o;

  auto* design_cmd = app.add_subcommand("design", "Size parameters from a nominal spec");
  add_common(design_cmd, o);

  auto* eq_cmd = app.add_subcommand("equilibria", "List and classify equilibrium points");
  add_common(eq_cmd, o);

  auto* check_cmd = app.add_subcommand("check", "Evaluate the stability certificate");
  add_common(check_cmd, o);
  check_cmd->add_option("--grid", o.grid, "Number of d grid points")->check(CLI::Range(2, 10000000));
  check_cmd->add_option("--csv", o.csv, "Write the grid CSV to this file ('-' appends it to the output)");

  auto* sim_cmd = app.add_subcommand("simulate", "Integrate one trajectory and classify it");
  add_common(sim_cmd, o);
  add_integrator(sim_cmd, o);
  sim_cmd->add_option("--initial", o.initial, "Initial state i_d,i_q,omega,delta")->delimiter(',')->expected(4);
  sim_cmd->add_option("--samples", o.samples, "Number of output intervals (overrides --dt)");
  sim_cmd->add_option("--model", o.model, "Model to integrate")->check(CLI::IsMember({"full", "ese"}));
  sim_cmd->add_option("--seed", o.seed, "Seed (recorded only)");

  auto* basin_cmd = app.add_subcommand("basin", "Classify seeded random initial states");
  add_common(basin_cmd, o);
  add_integrator(basin_cmd, o);
  basin_cmd->add_option("--samples", o.samples, "Number of initial states")->check(CLI::PositiveNumber);
  basin_cmd->add_option("--seed", o.seed, "Random seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "Re-run the certificate while varying one parameter");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--grid", o.grid, "Number of d grid points")->check(CLI::Range(2, 10000000));
  sweep_cmd->add_option("--param", o.param, "Config key to vary")->required();
  sweep_cmd->add_option("--from", o.from, "First value")->required();
  sweep_cmd->add_option("--to", o.to, "Last value")->required();
  sweep_cmd->add_option("--steps", o.steps, "Number of values")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--summary", o.summary, "One row per value instead of the full grid");

  auto* val_cmd = app.add_subcommand("validate", "Compare the full model against the exact swing equation");
  add_common(val_cmd, o);
  add_integrator(val_cmd, o);
  val_cmd->add_option("--initial", o.initial, "Initial state i_d,i_q,omega,delta")->delimiter(',')->expected(4);
  val_cmd->add_option("--samples", o.samples, "Number of random initial states")->check(CLI::PositiveNumber);
  val_cmd->add_option("--seed", o.seed, "Random seed");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*design_cmd) return cmd_design(o, out);
    if (*eq_cmd) return cmd_equilibria(o, out);
    if (*check_cmd) return cmd_check(o, out);
    if (*sim_cmd) return cmd_simulate(o, out);
    if (*basin_cmd) return cmd_basin(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*val_cmd) return cmd_validate(o, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what();
    if (!e.field().empty() && std::string(e.what()).find(e.field()) == std::string::npos) err << " [" << e.field() << "]";
    err << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace swingcert::cli
