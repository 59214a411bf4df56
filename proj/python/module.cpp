#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ftm/central.hpp"
#include "ftm/diagnostics.hpp"
#include "ftm/dynamics.hpp"
#include "ftm/free_time.hpp"
#include "ftm/io.hpp"
#include "ftm/path.hpp"

namespace py = pybind11;
using namespace ftm;

PYBIND11_MODULE(ftmlab, m) {
  m.doc() =
      "Action minimizers, minimal central configurations, and parabolic "
      "motions of the Newtonian N-body problem";

  py::register_exception<DimensionMismatch>(m, "DimensionMismatch",
                                            PyExc_ValueError);
  py::register_exception<DegenerateEndpoints>(m, "DegenerateEndpoints",
                                              PyExc_ValueError);
  py::register_exception<CollisionError>(m, "CollisionError",
                                         PyExc_RuntimeError);
  py::register_exception<NonConvergence>(m, "NonConvergence",
                                         PyExc_RuntimeError);
  py::register_exception<CollisionTrapped>(m, "CollisionTrapped",
                                           PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<MassSystem>(m, "MassSystem")
      .def(py::init<std::vector<double>, int>(), py::arg("masses"),
           py::arg("dim"))
      .def_property_readonly("body_count", &MassSystem::body_count)
      .def_property_readonly("dim", &MassSystem::dim)
      .def_property_readonly("masses",
                             [](const MassSystem& s) { return s.masses(); })
      .def_property_readonly("total_mass", &MassSystem::total_mass)
      .def_property_readonly("min_mass", &MassSystem::min_mass)
      .def("__repr__", [](const MassSystem& s) {
        return "MassSystem(N=" + std::to_string(s.body_count()) +
               ", dim=" + std::to_string(s.dim()) + ")";
      });

  m.def("potential", &potential, py::arg("sys"), py::arg("x"));
  m.def("kinetic", &kinetic, py::arg("sys"), py::arg("v"));
  m.def("mass_inner", &mass_inner, py::arg("sys"), py::arg("x"), py::arg("y"));
  m.def("moment_of_inertia", &moment_of_inertia, py::arg("sys"), py::arg("x"));
  m.def("mass_norm", &mass_norm, py::arg("sys"), py::arg("x"));
  m.def("center_of_mass", &center_of_mass, py::arg("sys"), py::arg("x"));
  m.def("grad_potential", &grad_potential, py::arg("sys"), py::arg("x"));
  m.def("has_collision", &has_collision, py::arg("sys"), py::arg("x"));
  m.def("min_pair_separation", &min_pair_separation, py::arg("x"));
  m.def("body_max_distance", &body_max_distance, py::arg("x"), py::arg("y"));

  py::class_<PolarDecomposition>(m, "PolarDecomposition")
      .def_readonly("rho", &PolarDecomposition::rho)
      .def_readonly("u", &PolarDecomposition::u);
  m.def("polar_decompose", &polar_decompose, py::arg("sys"), py::arg("x"));

  py::class_<DiscretePath>(m, "DiscretePath")
      .def(py::init<>())
      .def_readwrite("times", &DiscretePath::times)
      .def_readwrite("nodes", &DiscretePath::nodes)
      .def_property_readonly("duration", &DiscretePath::duration)
      .def_property_readonly("node_count", &DiscretePath::node_count)
      .def_static("straight", &DiscretePath::straight, py::arg("x"),
                  py::arg("y"), py::arg("tau"), py::arg("n_nodes"));
  m.def("subpath", &subpath, py::arg("path"), py::arg("k"), py::arg("l"));

  m.def("action", &action, py::arg("sys"), py::arg("path"));
  m.def("action_gradient", &action_gradient, py::arg("sys"), py::arg("path"));
  m.def("holder_excess", &holder_excess, py::arg("sys"), py::arg("path"),
        py::arg("action_value"));

  py::class_<MinimizeOptions>(m, "MinimizeOptions")
      .def(py::init<>())
      .def_readwrite("max_iters", &MinimizeOptions::max_iters)
      .def_readwrite("grad_tol", &MinimizeOptions::grad_tol)
      .def_readwrite("restarts", &MinimizeOptions::restarts)
      .def_readwrite("rng_seed", &MinimizeOptions::rng_seed)
      .def_readwrite("collision_guard", &MinimizeOptions::collision_guard);

  py::class_<MinimizeReport>(m, "MinimizeReport")
      .def_readonly("path", &MinimizeReport::path)
      .def_readonly("action_value", &MinimizeReport::action_value)
      .def_readonly("grad_norm", &MinimizeReport::grad_norm)
      .def_readonly("iterations", &MinimizeReport::iterations)
      .def_readonly("converged", &MinimizeReport::converged)
      .def_readonly("min_separation", &MinimizeReport::min_separation);

  m.def("minimize_fixed_time", &minimize_fixed_time, py::arg("sys"),
        py::arg("x"), py::arg("y"), py::arg("tau"), py::arg("n_nodes"),
        py::arg("opts") = MinimizeOptions{});
  m.def("minimize_path", &minimize_path, py::arg("sys"), py::arg("initial"),
        py::arg("opts") = MinimizeOptions{});
  m.def("phi_tau", &phi_tau, py::arg("sys"), py::arg("x"), py::arg("y"),
        py::arg("tau"), py::arg("n_nodes"), py::arg("opts") = MinimizeOptions{});

  py::class_<TauBracket>(m, "TauBracket")
      .def_readonly("t_lo", &TauBracket::t_lo)
      .def_readonly("t_hi", &TauBracket::t_hi);
  m.def("tau_bracket", &tau_bracket, py::arg("sys"), py::arg("x"),
        py::arg("y"), py::arg("action_upper_bound"));

  py::class_<FreeTimeResult>(m, "FreeTimeResult")
      .def_readonly("path", &FreeTimeResult::path)
      .def_readonly("tau_star", &FreeTimeResult::tau_star)
      .def_readonly("phi_value", &FreeTimeResult::phi_value)
      .def_readonly("energy_residual", &FreeTimeResult::energy_residual)
      .def_readonly("report", &FreeTimeResult::report);
  m.def("minimize_free_time", &minimize_free_time, py::arg("sys"),
        py::arg("x"), py::arg("y"), py::arg("n_nodes"),
        py::arg("opts") = MinimizeOptions{});
  m.def("phi", &phi, py::arg("sys"), py::arg("x"), py::arg("y"),
        py::arg("n_nodes"), py::arg("opts") = MinimizeOptions{});

  py::class_<VerifyOptions>(m, "VerifyOptions")
      .def(py::init<>())
      .def_readwrite("el_tol_rel", &VerifyOptions::el_tol_rel)
      .def_readwrite("energy_tol_rel", &VerifyOptions::energy_tol_rel)
      .def_readwrite("min_separation", &VerifyOptions::min_separation)
      .def_readwrite("subinterval_slack_rel",
                     &VerifyOptions::subinterval_slack_rel)
      .def_readwrite("com_tol", &VerifyOptions::com_tol)
      .def_readwrite("subintervals", &VerifyOptions::subintervals)
      .def_readwrite("rng_seed", &VerifyOptions::rng_seed)
      .def_readwrite("minimize", &VerifyOptions::minimize);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("measured", &CheckResult::measured)
      .def_readonly("tolerance", &CheckResult::tolerance);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("checks", &VerificationReport::checks)
      .def_readonly("all_passed", &VerificationReport::all_passed);
  m.def("verify_free_time_minimizer", &verify_free_time_minimizer,
        py::arg("sys"), py::arg("path"), py::arg("opts") = VerifyOptions{});

  py::class_<CentralConfigOptions>(m, "CentralConfigOptions")
      .def(py::init<>())
      .def_readwrite("max_iters", &CentralConfigOptions::max_iters)
      .def_readwrite("grad_tol", &CentralConfigOptions::grad_tol)
      .def_readwrite("restarts", &CentralConfigOptions::restarts);

  py::class_<CentralConfigResult>(m, "CentralConfigResult")
      .def_readonly("a0", &CentralConfigResult::a0)
      .def_readonly("U0", &CentralConfigResult::U0)
      .def_readonly("tangent_residual", &CentralConfigResult::tangent_residual)
      .def_readonly("central_residual", &CentralConfigResult::central_residual)
      .def_readonly("collinear_caveat", &CentralConfigResult::collinear_caveat);
  m.def("find_minimal_configuration", &find_minimal_configuration,
        py::arg("sys"), py::arg("seed"),
        py::arg("opts") = CentralConfigOptions{});

  m.def("homothetic_mu", &homothetic_mu, py::arg("U0"));
  py::class_<HomotheticSpec>(m, "HomotheticSpec")
      .def(py::init([](Configuration a0, double mu0, double U0) {
             return HomotheticSpec{std::move(a0), mu0, U0};
           }),
           py::arg("a0"), py::arg("mu0"), py::arg("U0"))
      .def_readonly("a0", &HomotheticSpec::a0)
      .def_readonly("mu0", &HomotheticSpec::mu0)
      .def_readonly("U0", &HomotheticSpec::U0);
  m.def("make_homothetic", &make_homothetic, py::arg("minimal"));
  m.def("homothetic_path", &homothetic_path, py::arg("spec"), py::arg("t0"),
        py::arg("t1"), py::arg("n_nodes"));
  m.def("homothetic_action", &homothetic_action, py::arg("spec"),
        py::arg("t0"), py::arg("t1"));
  m.def("kepler_free_time_value", &kepler_free_time_value, py::arg("U0"),
        py::arg("rho_a"), py::arg("rho_b"));

  py::class_<IntegratorOptions>(m, "IntegratorOptions")
      .def(py::init<>())
      .def_readwrite("tol", &IntegratorOptions::tol)
      .def_readwrite("abs_tol_factor", &IntegratorOptions::abs_tol_factor)
      .def_readwrite("n_samples", &IntegratorOptions::n_samples)
      .def_readwrite("collision_factor", &IntegratorOptions::collision_factor);

  py::enum_<Termination>(m, "Termination")
      .value("completed", Termination::completed)
      .value("collision_approach", Termination::collision_approach);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("positions", &Trajectory::positions)
      .def_readonly("velocities", &Trajectory::velocities)
      .def_readonly("energy0", &Trajectory::energy0)
      .def_readonly("max_energy_drift", &Trajectory::max_energy_drift)
      .def_readonly("min_separation", &Trajectory::min_separation)
      .def_readonly("termination", &Trajectory::termination)
      .def_property_readonly("sample_count", &Trajectory::sample_count);
  m.def("integrate_newton", &integrate_newton, py::arg("sys"), py::arg("x0"),
        py::arg("v0"), py::arg("t0"), py::arg("t1"),
        py::arg("opts") = IntegratorOptions{});

  py::class_<DiagnosticsSeries>(m, "DiagnosticsSeries")
      .def_readonly("times", &DiagnosticsSeries::times)
      .def_readonly("I_series", &DiagnosticsSeries::I_series)
      .def_readonly("U_series", &DiagnosticsSeries::U_series)
      .def_readonly("T_series", &DiagnosticsSeries::T_series)
      .def_readonly("g_series", &DiagnosticsSeries::g_series)
      .def_readonly("h_series", &DiagnosticsSeries::h_series)
      .def_readonly("com_series", &DiagnosticsSeries::com_series);
  m.def("diagnostics", &diagnostics, py::arg("sys"), py::arg("traj"));
  m.def("lagrange_jacobi_residual",
        py::overload_cast<const DiagnosticsSeries&>(&lagrange_jacobi_residual),
        py::arg("series"));
  m.def("lagrange_jacobi_residual",
        py::overload_cast<const MassSystem&, const Trajectory&>(
            &lagrange_jacobi_residual),
        py::arg("sys"), py::arg("traj"));

  py::class_<GMonotonicityReport>(m, "GMonotonicityReport")
      .def_readonly("min_increment", &GMonotonicityReport::min_increment)
      .def_readonly("is_nondecreasing", &GMonotonicityReport::is_nondecreasing);
  m.def("g_monotonicity", &g_monotonicity, py::arg("series"),
        py::arg("tol_g") = 1e-8);

  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("exponent", &PowerLawFit::exponent)
      .def_readonly("coefficient", &PowerLawFit::coefficient)
      .def_readonly("r_squared", &PowerLawFit::r_squared)
      .def_readonly("window_lo", &PowerLawFit::window_lo)
      .def_readonly("window_hi", &PowerLawFit::window_hi);
  m.def("fit_power_law", &fit_power_law, py::arg("times"), py::arg("values"),
        py::arg("window_lo"), py::arg("window_hi"));
  m.def("tail_window", &tail_window, py::arg("times"));

  py::class_<ParabolicReport>(m, "ParabolicReport")
      .def_readonly("T_tail_max", &ParabolicReport::T_tail_max)
      .def_readonly("decreasing", &ParabolicReport::decreasing);
  m.def("parabolic_diagnostic", &parabolic_diagnostic, py::arg("series"),
        py::arg("tail_fraction"));

  // file formats (shared with the CLI)
  m.def("parse_problem",
        [](const std::string& text) { return parse_problem(text); });
  m.def("serialize_path", &serialize_path, py::arg("sys"), py::arg("path"));
  m.def("serialize_trajectory", &serialize_trajectory, py::arg("sys"),
        py::arg("traj"));
  m.def("serialize_series", &serialize_series, py::arg("series"));
  m.def("serialize_series_csv", &serialize_series_csv, py::arg("series"));

  py::class_<ProblemFile>(m, "ProblemFile")
      .def_readonly("dim", &ProblemFile::dim)
      .def_readonly("masses", &ProblemFile::masses)
      .def_readonly("configurations", &ProblemFile::configurations)
      .def("system", &ProblemFile::system);
}
