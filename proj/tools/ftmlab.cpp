// ftmlab: command-line laboratory for action minimizers, minimal central
// configurations, and parabolic N-body motions.
//
// Exit codes: 0 success (all checks passed), 1 usage error, 2 numerical
// failure, 3 a verification check failed.

#include <CLI11.hpp>

#include "ftm/central.hpp"
#include "ftm/diagnostics.hpp"
#include "ftm/dynamics.hpp"
#include "ftm/free_time.hpp"
#include "ftm/io.hpp"
#include "ftm/path.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace ftm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

struct CommonArgs {
  std::string problem_path;
  std::string from_name = "x";
  std::string to_name = "y";
  std::string out_path;
  std::string format = "json";
  std::optional<double> tau;
  std::optional<int> nodes;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  double t0 = 1.0;
  double t1 = 8.0;
  std::string lambda_list = "0.5,2,4";
  std::string path_file;
  double check_tol = 2e-3;
};

struct LoadedProblem {
  ProblemFile file;
  std::string bytes;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
}

void require_json_format(const CommonArgs& args) {
  if (args.format != "json")
    throw CLI::ValidationError("--format",
                               "csv output is only available for series "
                               "(the diagnose subcommand)");
}

LoadedProblem load_problem(const CommonArgs& args) {
  if (args.problem_path.empty())
    throw CLI::ValidationError("--problem", "a problem file is required");
  LoadedProblem loaded;
  loaded.bytes = read_file(args.problem_path);
  loaded.file = parse_problem(loaded.bytes);
  return loaded;
}

MinimizeOptions effective_options(const CommonArgs& args,
                                  const ProblemOptions& opts) {
  MinimizeOptions m;
  m.max_iters = args.max_iters.value_or(opts.max_iters);
  m.grad_tol = args.tol.value_or(opts.tol);
  m.restarts = args.restarts.value_or(opts.restarts);
  m.rng_seed = args.seed.value_or(opts.seed);
  return m;
}

int effective_nodes(const CommonArgs& args, const ProblemOptions& opts) {
  return args.nodes.value_or(opts.nodes);
}

struct ReportBuilder {
  JsonWriter w;
  bool any_check_failed = false;

  ReportBuilder(const std::string& command, const std::string& input_bytes,
                std::uint64_t seed) {
    w.begin_object();
    w.key("command").value(command);
    w.key("input_digest").value(digest_hex(input_bytes));
    w.key("seed").value(seed);
    w.key("defaults").begin_object();
    const ProblemOptions defaults;
    w.key("nodes").value(defaults.nodes);
    w.key("tol").value(defaults.tol);
    w.key("max_iters").value(defaults.max_iters);
    w.key("restarts").value(defaults.restarts);
    w.end_object();
  }

  void begin_outputs() { w.key("outputs").begin_object(); }
  void end_outputs() { w.end_object(); }

  void checks(const std::vector<CheckResult>& list) {
    w.key("checks").begin_array();
    for (const CheckResult& c : list) {
      w.begin_object();
      w.key("name").value(c.name);
      w.key("passed").value(c.passed);
      w.key("measured").value(c.measured);
      w.key("tolerance").value(c.tolerance);
      w.end_object();
      if (!c.passed) any_check_failed = true;
    }
    w.end_array();
  }

  std::string finish() {
    w.end_object();
    return w.str() + "\n";
  }
};

void emit(const CommonArgs& args, const std::string& bytes) {
  if (args.out_path.empty()) {
    std::cout << bytes;
    return;
  }
  std::string target = args.out_path;
  // optional output-directory override for relative targets
  if (const char* dir = std::getenv("FTMLAB_OUT_DIR");
      dir != nullptr && *dir != '\0' && target.front() != '/')
    target = std::string(dir) + "/" + target;
  write_file(target, bytes);
}

std::string join_command(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::vector<CheckResult> minimizer_checks(const MassSystem& sys,
                                          const Configuration& x,
                                          const Configuration& y,
                                          const MinimizeReport& rep) {
  std::vector<CheckResult> checks;
  const double d = body_max_distance(x, y);
  const double lhs = 2.0 * rep.action_value * rep.path.duration();
  const double rhs = sys.min_mass() * d * d;
  checks.push_back({"action_lower_bound_2At_ge_m0d2", lhs >= rhs, lhs, rhs});
  const double scale = 1.0 + std::max(body_max_norm(x), body_max_norm(y));
  const double excess = holder_excess(sys, rep.path, rep.action_value);
  checks.push_back(
      {"holder_action_bound", excess <= 1e-6 * scale, excess, 1e-6 * scale});
  checks.push_back({"converged", rep.converged, rep.grad_norm,
                    rep.converged ? rep.grad_norm : 0.0});
  return checks;
}

int cmd_minimize(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Configuration& x = loaded.file.configuration(args.from_name);
  const Configuration& y = loaded.file.configuration(args.to_name);
  if (!args.tau.has_value())
    throw CLI::ValidationError("--tau", "minimize requires a transfer time");
  const MinimizeOptions opts = effective_options(args, loaded.file.options);
  const MinimizeReport rep = minimize_fixed_time(
      sys, x, y, *args.tau, effective_nodes(args, loaded.file.options), opts);

  ReportBuilder rb(command, loaded.bytes, opts.rng_seed);
  rb.begin_outputs();
  rb.w.key("action").value(rep.action_value);
  rb.w.key("grad_norm").value(rep.grad_norm);
  rb.w.key("iterations").value(rep.iterations);
  rb.w.key("min_separation").value(rep.min_separation);
  rb.w.key("path").begin_object();
  rb.w.key("kind").value("path");
  write_path_fields(rb.w, sys, rep.path);
  rb.w.end_object();
  rb.end_outputs();
  rb.checks(minimizer_checks(sys, x, y, rep));
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_free_minimize(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Configuration& x = loaded.file.configuration(args.from_name);
  const Configuration& y = loaded.file.configuration(args.to_name);
  const MinimizeOptions opts = effective_options(args, loaded.file.options);
  const FreeTimeResult res = minimize_free_time(
      sys, x, y, effective_nodes(args, loaded.file.options), opts);

  ReportBuilder rb(command, loaded.bytes, opts.rng_seed);
  rb.begin_outputs();
  rb.w.key("phi").value(res.phi_value);
  rb.w.key("tau_star").value(res.tau_star);
  rb.w.key("energy_residual").value(res.energy_residual);
  rb.w.key("grad_norm").value(res.report.grad_norm);
  rb.w.key("path").begin_object();
  rb.w.key("kind").value("path");
  write_path_fields(rb.w, sys, res.path);
  rb.w.end_object();
  rb.end_outputs();

  std::vector<CheckResult> checks = minimizer_checks(sys, x, y, res.report);
  const double u_mid =
      potential(sys, res.path.nodes[res.path.node_count() / 2]);
  checks.push_back({"zero_energy_residual",
                    res.energy_residual <= 1e-3 * u_mid, res.energy_residual,
                    1e-3 * u_mid});
  rb.checks(checks);
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_phi(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Configuration& x = loaded.file.configuration(args.from_name);
  const Configuration& y = loaded.file.configuration(args.to_name);
  const MinimizeOptions opts = effective_options(args, loaded.file.options);
  const double value =
      phi(sys, x, y, effective_nodes(args, loaded.file.options), opts);

  ReportBuilder rb(command, loaded.bytes, opts.rng_seed);
  rb.begin_outputs();
  rb.w.key("phi").value(value);
  rb.end_outputs();
  rb.checks({});
  emit(args, rb.finish());
  return kExitOk;
}

int cmd_central_config(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  CentralConfigOptions copts;
  copts.grad_tol = args.tol.value_or(1e-10);
  if (args.max_iters) copts.max_iters = *args.max_iters;
  copts.restarts = args.restarts.value_or(loaded.file.options.restarts);
  const std::uint64_t seed = args.seed.value_or(loaded.file.options.seed);
  const CentralConfigResult res = find_minimal_configuration(sys, seed, copts);

  ReportBuilder rb(command, loaded.bytes, seed);
  rb.begin_outputs();
  rb.w.key("U0").value(res.U0);
  rb.w.key("mu0").value(homothetic_mu(res.U0));
  rb.w.key("a0");
  write_configuration(rb.w, res.a0);
  rb.w.key("tangent_residual").value(res.tangent_residual);
  rb.w.key("central_residual").value(res.central_residual);
  rb.w.key("collinear_caveat").value(res.collinear_caveat);
  rb.end_outputs();

  std::vector<CheckResult> checks;
  const double i_err = std::abs(moment_of_inertia(sys, res.a0) - 1.0);
  checks.push_back({"unit_inertia", i_err <= 1e-10, i_err, 1e-10});
  const double g_norm = center_of_mass(sys, res.a0).norm();
  checks.push_back({"centered", g_norm <= 1e-10, g_norm, 1e-10});
  checks.push_back({"central_equation", res.central_residual <= 1e-6,
                    res.central_residual, 1e-6});
  rb.checks(checks);
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_homothetic(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  CentralConfigOptions copts;
  copts.restarts = args.restarts.value_or(loaded.file.options.restarts);
  const std::uint64_t seed = args.seed.value_or(loaded.file.options.seed);
  const HomotheticSpec spec =
      make_homothetic(find_minimal_configuration(sys, seed, copts));
  const int nodes = effective_nodes(args, loaded.file.options);
  const DiscretePath path = homothetic_path(spec, args.t0, args.t1, nodes);
  const double closed_form = homothetic_action(spec, args.t0, args.t1);
  const double discrete = action(sys, path);

  ReportBuilder rb(command, loaded.bytes, seed);
  rb.begin_outputs();
  rb.w.key("U0").value(spec.U0);
  rb.w.key("mu0").value(spec.mu0);
  rb.w.key("t0").value(args.t0);
  rb.w.key("t1").value(args.t1);
  rb.w.key("action_closed_form").value(closed_form);
  rb.w.key("action_discrete").value(discrete);
  rb.w.key("path").begin_object();
  rb.w.key("kind").value("path");
  write_path_fields(rb.w, sys, path);
  rb.w.end_object();
  rb.end_outputs();

  std::vector<CheckResult> checks;
  const double mu_err =
      std::abs(std::pow(spec.mu0, 3) - 4.5 * spec.U0);
  checks.push_back({"kepler_coefficient", mu_err <= 1e-10, mu_err, 1e-10});
  const double action_err = std::abs(discrete - closed_form);
  checks.push_back({"discrete_action_matches_closed_form",
                    action_err <= 1e-3 * closed_form, action_err,
                    1e-3 * closed_form});
  rb.checks(checks);
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  return failed ? kExitCheckFailed : kExitOk;
}

Trajectory run_integration(const CommonArgs& args, const LoadedProblem& loaded,
                           const MassSystem& sys) {
  // for integrate/diagnose, --from names the initial positions and --to the
  // initial velocities; --nodes is the stored sample count
  const Configuration& x0 = loaded.file.configuration(args.from_name);
  const Configuration& v0 = loaded.file.configuration(args.to_name);
  IntegratorOptions iopts;
  iopts.tol = args.tol.value_or(1e-10);
  iopts.n_samples = args.nodes.value_or(1024);
  return integrate_newton(sys, x0, v0, args.t0, args.t1, iopts);
}

int cmd_integrate(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Trajectory traj = run_integration(args, loaded, sys);

  const std::uint64_t seed = args.seed.value_or(loaded.file.options.seed);
  ReportBuilder rb(command, loaded.bytes, seed);
  rb.begin_outputs();
  rb.w.key("energy0").value(traj.energy0);
  rb.w.key("max_energy_drift").value(traj.max_energy_drift);
  rb.w.key("min_separation").value(traj.min_separation);
  rb.w.key("samples").value(traj.sample_count());
  rb.w.key("termination")
      .value(traj.termination == Termination::completed
                 ? "completed"
                 : "collision_approach");
  rb.w.key("trajectory").begin_object();
  rb.w.key("kind").value("trajectory");
  write_trajectory_fields(rb.w, sys, traj);
  rb.w.end_object();
  rb.end_outputs();

  std::vector<CheckResult> checks;
  const double duration = args.t1 - args.t0;
  const double drift_tol = args.tol.value_or(1e-10) * duration *
                           (1.0 + std::abs(traj.energy0) +
                            kinetic(sys, traj.velocities.front()));
  checks.push_back({"energy_drift", traj.max_energy_drift <= drift_tol,
                    traj.max_energy_drift, drift_tol});
  rb.checks(checks);
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  if (traj.termination == Termination::collision_approach)
    return kExitNumerical;
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_diagnose(const CommonArgs& args, const std::string& command) {
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Trajectory traj = run_integration(args, loaded, sys);
  const DiagnosticsSeries series = diagnostics(sys, traj);

  if (args.format == "csv") {
    emit(args, serialize_series_csv(series));
    return traj.termination == Termination::collision_approach
               ? kExitNumerical
               : kExitOk;
  }

  const std::uint64_t seed = args.seed.value_or(loaded.file.options.seed);
  ReportBuilder rb(command, loaded.bytes, seed);
  rb.begin_outputs();
  rb.w.key("lagrange_jacobi_residual").value(lagrange_jacobi_residual(series));
  const GMonotonicityReport g_rep = g_monotonicity(series);
  rb.w.key("g_min_increment").value(g_rep.min_increment);
  rb.w.key("g_nondecreasing").value(g_rep.is_nondecreasing);
  const ParabolicReport p_rep = parabolic_diagnostic(series, 0.5);
  rb.w.key("T_tail_max").value(p_rep.T_tail_max);
  rb.w.key("T_tail_decreasing").value(p_rep.decreasing);
  const auto window = tail_window(series.times);
  try {
    const PowerLawFit fit_i =
        fit_power_law(series.times, series.I_series, window.first, window.second);
    const PowerLawFit fit_u =
        fit_power_law(series.times, series.U_series, window.first, window.second);
    rb.w.key("I_fit").begin_object();
    rb.w.key("exponent").value(fit_i.exponent);
    rb.w.key("coefficient").value(fit_i.coefficient);
    rb.w.key("r_squared").value(fit_i.r_squared);
    rb.w.end_object();
    rb.w.key("U_fit").begin_object();
    rb.w.key("exponent").value(fit_u.exponent);
    rb.w.key("coefficient").value(fit_u.coefficient);
    rb.w.key("r_squared").value(fit_u.r_squared);
    rb.w.end_object();
  } catch (const std::invalid_argument&) {
    rb.w.key("fits_skipped").value(true);
  }
  rb.w.key("series").begin_object();
  rb.w.key("kind").value("series");
  write_series_fields(rb.w, series);
  rb.w.end_object();
  rb.end_outputs();
  rb.checks({});
  emit(args, rb.finish());
  return traj.termination == Termination::collision_approach ? kExitNumerical
                                                             : kExitOk;
}

int cmd_verify_ftm(const CommonArgs& args, const std::string& command) {
  if (args.path_file.empty())
    throw CLI::ValidationError("--path", "verify-ftm requires a path file");
  const std::string bytes = read_file(args.path_file);
  const PathDocument doc = parse_path(bytes);
  const MassSystem sys = doc.system();

  VerifyOptions vopts;
  if (args.seed) vopts.rng_seed = *args.seed;
  if (args.tol) vopts.minimize.grad_tol = *args.tol;
  if (args.restarts) vopts.minimize.restarts = *args.restarts;
  const VerificationReport rep =
      verify_free_time_minimizer(sys, doc.path, vopts);

  ReportBuilder rb(command, bytes, vopts.rng_seed);
  rb.begin_outputs();
  rb.w.key("all_passed").value(rep.all_passed);
  rb.end_outputs();
  rb.checks(rep.checks);
  emit(args, rb.finish());
  return rep.all_passed ? kExitOk : kExitCheckFailed;
}

int cmd_scaling_check(const CommonArgs& args, const std::string& command) {
  require_json_format(args);
  const LoadedProblem loaded = load_problem(args);
  const MassSystem sys = loaded.file.system();
  const Configuration& x = loaded.file.configuration(args.from_name);
  const Configuration& y = loaded.file.configuration(args.to_name);
  const MinimizeOptions opts = effective_options(args, loaded.file.options);
  const int nodes = effective_nodes(args, loaded.file.options);

  std::vector<double> lambdas;
  std::stringstream ss(args.lambda_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const double lam = std::stod(tok);
    if (!(lam > 0.0))
      throw CLI::ValidationError("--lambda-list", "factors must be positive");
    lambdas.push_back(lam);
  }
  if (lambdas.empty())
    throw CLI::ValidationError("--lambda-list", "no scaling factors given");

  const double base = phi(sys, x, y, nodes, opts);
  double worst = 0.0;

  ReportBuilder rb(command, loaded.bytes, opts.rng_seed);
  rb.begin_outputs();
  rb.w.key("phi_base").value(base);
  rb.w.key("sweep").begin_array();
  for (double lam : lambdas) {
    const double scaled = phi(sys, lam * x, lam * y, nodes, opts);
    const double expected = std::sqrt(lam) * base;
    const double rel_dev = std::abs(scaled - expected) / expected;
    worst = std::max(worst, rel_dev);
    rb.w.begin_object();
    rb.w.key("lambda").value(lam);
    rb.w.key("phi_scaled").value(scaled);
    rb.w.key("phi_expected").value(expected);
    rb.w.key("rel_deviation").value(rel_dev);
    rb.w.end_object();
  }
  rb.w.end_array();
  rb.w.key("max_rel_deviation").value(worst);
  rb.end_outputs();
  rb.checks({{"scaling_homogeneity", worst <= args.check_tol, worst,
              args.check_tol}});
  const bool failed = rb.any_check_failed;
  emit(args, rb.finish());
  return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ftmlab: fixed-time and free-time action minimizers, minimal central "
      "configurations, and parabolic-motion diagnostics for the Newtonian "
      "N-body problem"};
  app.require_subcommand(1);

  CommonArgs args;
  const std::string command = join_command(argc, argv);

  auto add_common = [&](CLI::App* sub, bool needs_endpoints) {
    sub->add_option("--problem", args.problem_path, "problem file (JSON)");
    if (needs_endpoints) {
      sub->add_option("--from", args.from_name,
                      "name of the start configuration");
      sub->add_option("--to", args.to_name, "name of the end configuration");
    }
    sub->add_option("--nodes", args.nodes, "number of path nodes / samples");
    sub->add_option("--tol", args.tol, "tolerance (gradient / integrator)");
    sub->add_option("--max-iters", args.max_iters, "iteration budget");
    sub->add_option("--restarts", args.restarts, "extra randomized starts");
    sub->add_option("--seed", args.seed, "RNG seed");
    sub->add_option("--out", args.out_path, "write the report to this file");
    sub->add_option("--format", args.format, "json|csv (csv: series only)")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* minimize = app.add_subcommand(
      "minimize", "fixed-time action minimizer between two configurations");
  add_common(minimize, true);
  minimize->add_option("--tau", args.tau, "transfer time");

  CLI::App* free_min = app.add_subcommand(
      "free-minimize", "free time minimizer (optimizes the transfer time)");
  add_common(free_min, true);

  CLI::App* phi_cmd = app.add_subcommand(
      "phi", "critical action potential between two configurations");
  add_common(phi_cmd, true);

  CLI::App* central = app.add_subcommand(
      "central-config", "minimal central configuration of the masses");
  add_common(central, false);

  CLI::App* homothetic = app.add_subcommand(
      "homothetic", "parabolic homothetic motion of the minimal configuration");
  add_common(homothetic, false);
  homothetic->add_option("--t0", args.t0, "start time (> 0)");
  homothetic->add_option("--t1", args.t1, "end time");

  CLI::App* integrate = app.add_subcommand(
      "integrate",
      "integrate Newton's equations (--from = positions, --to = velocities)");
  add_common(integrate, true);
  integrate->add_option("--t0", args.t0, "start time");
  integrate->add_option("--t1", args.t1, "end time");

  CLI::App* diagnose = app.add_subcommand(
      "diagnose",
      "integrate and emit I/U/T/g/h series, power-law fits, and the "
      "parabolic diagnostic");
  add_common(diagnose, true);
  diagnose->add_option("--t0", args.t0, "start time");
  diagnose->add_option("--t1", args.t1, "end time");

  CLI::App* verify = app.add_subcommand(
      "verify-ftm", "verify the free-time-minimizer certificate of a path");
  verify->add_option("--path", args.path_file, "path document to verify");
  verify->add_option("--tol", args.tol, "competitor solve tolerance");
  verify->add_option("--restarts", args.restarts, "competitor restarts");
  verify->add_option("--seed", args.seed, "RNG seed for subinterval draws");
  verify->add_option("--out", args.out_path, "write the report to this file");

  CLI::App* scaling = app.add_subcommand(
      "scaling-check", "verify the lambda^(1/2) homogeneity of phi");
  add_common(scaling, true);
  scaling->add_option("--lambda-list", args.lambda_list,
                      "comma-separated scaling factors");
  scaling->add_option("--check-tol", args.check_tol,
                      "max allowed relative deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (minimize->parsed())
      code = cmd_minimize(args, command);
    else if (free_min->parsed())
      code = cmd_free_minimize(args, command);
    else if (phi_cmd->parsed())
      code = cmd_phi(args, command);
    else if (central->parsed())
      code = cmd_central_config(args, command);
    else if (homothetic->parsed())
      code = cmd_homothetic(args, command);
    else if (integrate->parsed())
      code = cmd_integrate(args, command);
    else if (diagnose->parsed())
      code = cmd_diagnose(args, command);
    else if (verify->parsed())
      code = cmd_verify_ftm(args, command);
    else if (scaling->parsed())
      code = cmd_scaling_check(args, command);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const NonConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const CollisionTrapped& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const DegenerateEndpoints& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitNumerical;
  }

  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  // timing goes to stderr so that report files stay byte-identical per seed
  std::cerr << "wall_clock_ms=" << wall_ms << std::endl;
  return code;
}
