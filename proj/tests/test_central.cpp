#include "ftm/central.hpp"

#include <doctest.h>

#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace ftm;

namespace {

std::vector<double> sorted_pair_distances(const Configuration& x) {
  std::vector<double> d;
  for (long i = 0; i < x.rows(); ++i)
    for (long j = i + 1; j < x.rows(); ++j)
      d.push_back((x.row(i) - x.row(j)).norm());
  std::sort(d.begin(), d.end());
  return d;
}

// Free-time minimization of the discretized half-line Kepler functional
// S(rho) = sum ( (drho)^2/(2 dt) + dt (U0/rho_k + U0/rho_{k+1})/2 ):
// an oracle for kepler_free_time_value, independent of the closed form.
// The inner fixed-tau problem is solved by damped Newton on the tridiagonal
// stationarity system.
double kepler_action_fixed_tau(double U0, double rho_a, double rho_b,
                               double tau, int n_nodes) {
  const int n = n_nodes - 1;
  const double dt = tau / n;
  Eigen::VectorXd rho = Eigen::VectorXd::LinSpaced(n_nodes, rho_a, rho_b);
  rho = rho.cwiseMax(1e-4);

  auto value = [&](const Eigen::VectorXd& r) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double dr = r(k + 1) - r(k);
      s += 0.5 * dr * dr / dt + 0.5 * dt * (U0 / r(k) + U0 / r(k + 1));
    }
    return s;
  };

  const int m = n_nodes - 2;  // interior unknowns
  Eigen::VectorXd g(m), diag(m), lower(m), upper(m);
  double f = value(rho);
  for (int iter = 0; iter < 60; ++iter) {
    for (int k = 1; k <= m; ++k) {
      g(k - 1) = (rho(k) - rho(k - 1)) / dt - (rho(k + 1) - rho(k)) / dt -
                 dt * U0 / (rho(k) * rho(k));
      diag(k - 1) = 2.0 / dt + 2.0 * dt * U0 / std::pow(rho(k), 3);
    }
    if (g.norm() <= 1e-12) break;
    lower.setConstant(-1.0 / dt);
    upper.setConstant(-1.0 / dt);
    // Thomas solve of (tridiag) step = -g
    Eigen::VectorXd c(m), d(m);
    c(0) = upper(0) / diag(0);
    d(0) = -g(0) / diag(0);
    for (int k = 1; k < m; ++k) {
      const double w = diag(k) - lower(k) * c(k - 1);
      c(k) = upper(k) / w;
      d(k) = (-g(k) - lower(k) * d(k - 1)) / w;
    }
    Eigen::VectorXd step(m);
    step(m - 1) = d(m - 1);
    for (int k = m - 2; k >= 0; --k) step(k) = d(k) - c(k) * step(k + 1);

    double alpha = 1.0;
    for (int ls = 0; ls < 50; ++ls) {
      Eigen::VectorXd cand = rho;
      cand.segment(1, m) += alpha * step;
      if (cand.minCoeff() > 1e-9) {
        const double fc = value(cand);
        if (fc <= f) {
          rho = std::move(cand);
          f = fc;
          break;
        }
      }
      alpha *= 0.5;
    }
  }
  return f;
}

double kepler_free_time_oracle(double U0, double rho_a, double rho_b) {
  const double mu0 = std::cbrt(4.5 * U0);
  const double tau_guess =
      std::pow(rho_b / mu0, 1.5) - std::pow(rho_a / mu0, 1.5);
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(0.2 * tau_guess), b = std::log(5.0 * tau_guess);
  auto eval = [&](double logtau) {
    return kepler_action_fixed_tau(U0, rho_a, rho_b, std::exp(logtau), 48);
  };
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int i = 0; i < 40; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

TEST_CASE("two-body minimal configuration") {
  const MassSystem sys({1.0, 1.0}, 2);
  const CentralConfigResult res = find_minimal_configuration(sys, 42);
  CHECK(std::abs(res.U0 - 1.0 / std::sqrt(2.0)) <= 1e-8);
  CHECK(std::abs(moment_of_inertia(sys, res.a0) - 1.0) <= 1e-10);
  CHECK(center_of_mass(sys, res.a0).norm() <= 1e-10);
  CHECK(res.central_residual <= 1e-6);
  CHECK_FALSE(res.collinear_caveat);
}

TEST_CASE("three equal masses minimize at the equilateral triangle") {
  const MassSystem sys({1.0, 1.0, 1.0}, 2);
  const CentralConfigResult res = find_minimal_configuration(sys, 42);
  CHECK(std::abs(res.U0 - 3.0) <= 1e-6);
  CHECK(res.central_residual <= 1e-6);
  const std::vector<double> dists = sorted_pair_distances(res.a0);
  for (double d : dists) CHECK(d == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("collinear three-body configuration has larger potential") {
  // constrained to a line (dim = 1) the critical value is strictly above
  // the planar minimum, so the dim-2 multistart can never return it
  const MassSystem line({1.0, 1.0, 1.0}, 1);
  const CentralConfigResult euler = find_minimal_configuration(line, 42);
  CHECK(euler.collinear_caveat);
  CHECK(euler.U0 == doctest::Approx(2.5 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(euler.U0 > 3.0 + 0.5);
}

TEST_CASE("unequal two-body minimal configuration and its parabolic arc") {
  // bodies at distance d from each other with I = (m1 m2 / M) d^2, so the
  // normal configuration has d = (M / m1 m2)^{1/2} and U0 = m1 m2 / d
  const MassSystem sys({2.0, 3.0}, 2);
  const double d = std::sqrt(5.0 / 6.0);
  const double u0 = 6.0 / d;
  const CentralConfigResult res = find_minimal_configuration(sys, 13);
  CHECK(std::abs(res.U0 - u0) <= 1e-9 * u0);
  CHECK(std::abs((res.a0.row(0) - res.a0.row(1)).norm() - d) <= 1e-9);
  CHECK(center_of_mass(sys, res.a0).norm() <= 1e-10);

  // the fixed-time minimizer recovers the parabolic arc of this family too
  const HomotheticSpec spec = make_homothetic(res);
  const DiscretePath arc = homothetic_path(spec, 1.0, 5.0, 96);
  MinimizeOptions opts;
  opts.rng_seed = 31;
  opts.restarts = 1;
  const MinimizeReport rep = minimize_fixed_time(
      sys, arc.nodes.front(), arc.nodes.back(), 4.0, 96, opts);
  CHECK(rep.converged);
  const double analytic = homothetic_action(spec, 1.0, 5.0);
  CHECK(std::abs(rep.action_value - analytic) <= 1e-3 * analytic);
}

TEST_CASE("rotation leaves U0 and the central residual unchanged") {
  const MassSystem sys({1.0, 1.0, 1.0}, 2);
  const CentralConfigResult res = find_minimal_configuration(sys, 7);
  const double theta = 1.234;
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Configuration rotated = res.a0 * rot.transpose();
  CHECK(std::abs(potential(sys, rotated) - res.U0) <= 1e-10);
  const double residual =
      mass_norm(sys, grad_potential(sys, rotated) + res.U0 * rotated);
  CHECK(std::abs(residual - res.central_residual) <= 1e-10);
}

TEST_CASE("homothetic coefficient") {
  CHECK(homothetic_mu(2.0 / 9.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(homothetic_mu(1.0 / std::sqrt(2.0)) ==
        doctest::Approx(1.4708413767164400).epsilon(1e-14));
  CHECK(homothetic_mu(3.0) ==
        doctest::Approx(2.3811015779522992).epsilon(1e-14));
  CHECK_THROWS(homothetic_mu(0.0));
  CHECK_THROWS(homothetic_mu(-1.0));
}

TEST_CASE("homothetic spec invariant") {
  const MassSystem sys({1.0, 1.0}, 2);
  const HomotheticSpec spec =
      make_homothetic(find_minimal_configuration(sys, 42));
  CHECK(std::abs(spec.mu0 * spec.mu0 * spec.mu0 - 4.5 * spec.U0) <= 1e-10);
}

TEST_CASE("homothetic path samples mu0 t^{2/3} a0") {
  const MassSystem sys({1.0, 1.0}, 2);
  const HomotheticSpec spec =
      make_homothetic(find_minimal_configuration(sys, 42));
  const DiscretePath p = homothetic_path(spec, 1.0, 8.0, 127);
  CHECK((p.nodes.front() - spec.mu0 * spec.a0).norm() <= 1e-14);
  for (int k = 0; k < p.node_count(); ++k) {
    const double expected =
        spec.mu0 * spec.mu0 * std::pow(p.times(k), 4.0 / 3.0);
    CHECK(std::abs(moment_of_inertia(sys, p.nodes[k]) - expected) <=
          1e-12 * expected);
  }
  CHECK_THROWS(homothetic_path(spec, 0.0, 1.0, 8));
}

TEST_CASE("homothetic path satisfies Newton's equations under refinement") {
  const MassSystem sys({1.0, 1.0}, 2);
  const HomotheticSpec spec =
      make_homothetic(find_minimal_configuration(sys, 42));
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {200, 400, 800}) {
    const DiscretePath p = homothetic_path(spec, 1.0, 8.0, n);
    const double dt = p.times(1) - p.times(0);
    double worst = 0.0;
    for (int k = 1; k + 1 < n; ++k) {
      const Configuration acc_fd =
          (p.nodes[k + 1] - 2.0 * p.nodes[k] + p.nodes[k - 1]) / (dt * dt);
      worst = std::max(
          worst, mass_norm(sys, acc_fd - grad_potential(sys, p.nodes[k])));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev <= 1e-4);
}

TEST_CASE("homothetic action closed form") {
  const MassSystem sys({1.0, 1.0}, 2);
  const HomotheticSpec spec =
      make_homothetic(find_minimal_configuration(sys, 42));
  CHECK(homothetic_action(spec, 3.0, 3.0) == 0.0);
  CHECK(homothetic_action(spec, 1.0, 8.0) ==
        doctest::Approx(2.8844991406148168).epsilon(1e-8));

  // quadrature of the reduced Lagrangian (1/2) rhodot^2 + U0/rho
  const double mu0 = spec.mu0;
  const double quadrature = test::adaptive_simpson(
      [&](double t) {
        const double rho = mu0 * std::pow(t, 2.0 / 3.0);
        const double rhodot = (2.0 / 3.0) * mu0 * std::pow(t, -1.0 / 3.0);
        return 0.5 * rhodot * rhodot + spec.U0 / rho;
      },
      1.0, 8.0, 1e-13);
  CHECK(homothetic_action(spec, 1.0, 8.0) ==
        doctest::Approx(quadrature).epsilon(1e-10));

  // matches the discretized action of the sampled path
  const DiscretePath p = homothetic_path(spec, 1.0, 8.0, 4000);
  CHECK(std::abs(action(sys, p) - homothetic_action(spec, 1.0, 8.0)) <=
        1e-4 * homothetic_action(spec, 1.0, 8.0));
}

TEST_CASE("kepler free-time value") {
  const double U0 = 1.0 / std::sqrt(2.0);
  const double mu0 = homothetic_mu(U0);
  const MassSystem sys({1.0, 1.0}, 2);
  const HomotheticSpec spec{Configuration(), mu0, U0};

  // rho_a = 0 is the arc from total collision at t = 0
  const double rho1 = mu0 * std::pow(8.0, 2.0 / 3.0);
  CHECK(kepler_free_time_value(U0, 0.0, rho1) ==
        doctest::Approx(homothetic_action(spec, 0.0, 8.0)).epsilon(1e-12));

  // radii on the ray reproduce the time form
  const double rho_a = mu0 * std::pow(2.0, 2.0 / 3.0);
  CHECK(kepler_free_time_value(U0, rho_a, rho1) ==
        doctest::Approx(homothetic_action(spec, 2.0, 8.0)).epsilon(1e-12));

  CHECK_THROWS(kepler_free_time_value(U0, 2.0, 1.0));
  CHECK_THROWS(kepler_free_time_value(U0, -1.0, 1.0));
}

TEST_CASE("kepler value agrees with a 1-d discretized free-time solve") {
  const double U0 = 1.0 / std::sqrt(2.0);
  const double mu0 = homothetic_mu(U0);
  const double pairs[3][2] = {{1.0, 3.0}, {0.5, 2.5}, {2.0, 4.0}};
  for (const auto& pr : pairs) {
    const double rho_a = pr[0] * mu0, rho_b = pr[1] * mu0;
    const double closed = kepler_free_time_value(U0, rho_a, rho_b);
    const double numeric = kepler_free_time_oracle(U0, rho_a, rho_b);
    CHECK(std::abs(numeric - closed) <= 1e-3 * closed);
  }
}

TEST_CASE("minimal configuration solver converges from every restart seed") {
  const MassSystem sys({1.0, 2.0, 3.0}, 2);
  const CentralConfigResult a = find_minimal_configuration(sys, 1);
  const CentralConfigResult b = find_minimal_configuration(sys, 99);
  CHECK(a.U0 == doctest::Approx(b.U0).epsilon(1e-8));
  CHECK(a.tangent_residual <= 1e-9);
  // compare shapes through the rotation-invariant pairwise distances
  const auto da = sorted_pair_distances(a.a0);
  const auto db = sorted_pair_distances(b.a0);
  for (std::size_t i = 0; i < da.size(); ++i)
    CHECK(da[i] == doctest::Approx(db[i]).epsilon(1e-6));
}
