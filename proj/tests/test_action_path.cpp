#include "ftm/path.hpp"

#include <doctest.h>

#include "test_support.hpp"

#include <cmath>

using namespace ftm;

namespace {

// two equal unit masses: minimal configuration and its parabolic motion
struct TwoBody {
  MassSystem sys{{1.0, 1.0}, 2};
  Configuration a0;
  double U0 = 1.0 / std::sqrt(2.0);
  double mu0 = std::cbrt(4.5 / std::sqrt(2.0));

  TwoBody() : a0(2, 2) {
    const double s = 1.0 / std::sqrt(2.0);
    a0 << s, 0.0, -s, 0.0;
  }

  Configuration at(double t) const {
    return mu0 * std::pow(t, 2.0 / 3.0) * a0;
  }

  DiscretePath sampled(double t0, double t1, int n_nodes) const {
    DiscretePath p;
    p.times = Eigen::VectorXd::LinSpaced(n_nodes, t0, t1);
    p.nodes.reserve(n_nodes);
    for (int k = 0; k < n_nodes; ++k) p.nodes.push_back(at(p.times(k)));
    return p;
  }

  double arc_action(double t0, double t1) const {
    return (4.0 / 3.0) * mu0 * mu0 * (std::cbrt(t1) - std::cbrt(t0));
  }
};

}  // namespace

TEST_CASE("constant path action is tau * U") {
  const MassSystem sys({1.0, 2.0}, 2);
  Configuration x(2, 2);
  x << 1.0, 0.0, -0.5, 0.3;
  const double tau = 2.5;
  DiscretePath p = DiscretePath::straight(x, x, tau, 33);
  CHECK(action(sys, p) == doctest::Approx(tau * potential(sys, x)));
}

TEST_CASE("homothetic path action matches the closed form") {
  const TwoBody tb;
  const DiscretePath p = tb.sampled(1.0, 8.0, 4000);
  const double analytic = tb.arc_action(1.0, 8.0);
  CHECK(analytic == doctest::Approx(2.8844991406148168).epsilon(1e-14));
  CHECK(std::abs(action(tb.sys, p) - analytic) <= 1e-4 * analytic);
}

TEST_CASE("grid refinement shrinks the homothetic action error") {
  const TwoBody tb;
  const double analytic = tb.arc_action(1.0, 8.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {500, 1000, 2000}) {
    const double err = std::abs(action(tb.sys, tb.sampled(1.0, 8.0, n)) - analytic);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("action is positive on nonconstant paths") {
  const MassSystem sys({1.0, 2.0}, 2);
  auto gen = test::rng(30);
  DiscretePath p;
  p.times = Eigen::VectorXd::LinSpaced(9, 0.0, 2.0);
  for (int k = 0; k < 9; ++k)
    p.nodes.push_back(test::random_separated(gen, 2, 2, 0.5));
  CHECK(action(sys, p) > 0.0);
  const ActionParts parts = action_parts(sys, p);
  CHECK(parts.kinetic > 0.0);
  CHECK(parts.potential > 0.0);
}

TEST_CASE("polar split of the action: |xdot|^2 = rhodot^2 + rho^2 |udot|^2") {
  // discrete version of the polar-coordinate action on a smooth spiral
  const MassSystem sys({1.0, 1.0}, 2);
  const int n = 4001;
  DiscretePath p;
  p.times = Eigen::VectorXd::LinSpaced(n, 0.0, 2.0);
  for (int k = 0; k < n; ++k) {
    const double t = p.times(k);
    const double r = 1.0 + 0.3 * std::sin(t);
    const double th = 0.7 * t;
    Configuration c(2, 2);
    c << r * std::cos(th), r * std::sin(th), -r * std::cos(th),
        -r * std::sin(th);
    p.nodes.push_back(c);
  }
  const double direct = action(sys, p);

  double polar = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const double dt = p.times(k + 1) - p.times(k);
    const PolarDecomposition a = polar_decompose(sys, p.nodes[k]);
    const PolarDecomposition b = polar_decompose(sys, p.nodes[k + 1]);
    const double drho = b.rho - a.rho;
    const double rho_mid = 0.5 * (a.rho + b.rho);
    const double du2 = moment_of_inertia(sys, b.u - a.u);
    polar += 0.5 * drho * drho / dt + 0.5 * rho_mid * rho_mid * du2 / dt +
             0.5 * dt *
                 (potential(sys, a.u) / a.rho + potential(sys, b.u) / b.rho);
  }
  CHECK(std::abs(polar - direct) <= 1e-4 * direct);
}

TEST_CASE("straight-line action matches dense quadrature") {
  const MassSystem sys({1.0, 1.5}, 2);
  Configuration x(2, 2), y(2, 2);
  x << 1.0, 0.2, -1.0, -0.2;
  y << 1.5, 1.4, -0.8, 0.9;
  const double tau = 3.0;

  const DiscretePath p = DiscretePath::straight(x, y, tau, 2001);
  const double kinetic_exact =
      0.5 * moment_of_inertia(sys, y - x) / tau;  // constant speed chord
  const double potential_exact = test::adaptive_simpson(
      [&](double t) {
        const double s = t / tau;
        return potential(sys, Configuration((1.0 - s) * x + s * y));
      },
      0.0, tau, 1e-12);
  const double oracle = kinetic_exact + potential_exact;
  CHECK(std::abs(action(sys, p) - oracle) <= 1e-6 * oracle);
}

TEST_CASE("action of any node-collided path is +inf") {
  const MassSystem sys({1.0, 1.0}, 2);
  Configuration x(2, 2), y(2, 2);
  x << 1.0, 0.0, -1.0, 0.0;
  y << -1.0, 0.0, 1.0, 0.0;  // swap: the straight chord collides midway
  const DiscretePath p = DiscretePath::straight(x, y, 1.0, 31);
  CHECK(std::isinf(action(sys, p)));
}

TEST_CASE("action gradient signals collision nodes") {
  const MassSystem sys({1.0, 1.0}, 2);
  Configuration x(2, 2), same(2, 2);
  x << 1.0, 0.0, -1.0, 0.0;
  same << 0.3, 0.3, 0.3, 0.3;
  DiscretePath p = DiscretePath::straight(x, x, 1.0, 5);
  p.nodes[2] = same;
  CHECK_THROWS_AS(action_gradient(sys, p), CollisionError);
}

TEST_CASE("action gradient matches central finite differences") {
  const MassSystem sys({1.0, 2.0, 0.7}, 2);
  auto gen = test::rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    DiscretePath p;
    p.times = Eigen::VectorXd::LinSpaced(8, 0.0, 1.0 + 0.2 * trial);
    for (int k = 0; k < 8; ++k)
      p.nodes.push_back(test::random_separated(gen, 3, 2, 0.5));
    const std::vector<Configuration> grad = action_gradient(sys, p);
    REQUIRE(grad.size() == 6);

    const double h = 1e-6;
    for (int k = 1; k < 7; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 2; ++c) {
          DiscretePath plus = p, minus = p;
          plus.nodes[k](i, c) += h;
          minus.nodes[k](i, c) -= h;
          const double fd =
              (action(sys, plus) - action(sys, minus)) / (2.0 * h);
          const double an = grad[k - 1](i, c);
          CHECK(std::abs(fd - an) <=
                1e-6 * std::max({1.0, std::abs(fd), std::abs(an)}));
        }
      }
    }
  }
}

TEST_CASE("constant-path gradient is the potential term alone") {
  const MassSystem sys({1.0, 2.0}, 2);
  Configuration x(2, 2);
  x << 0.8, 0.0, -0.4, 0.1;
  const DiscretePath p = DiscretePath::straight(x, x, 2.0, 9);
  const std::vector<Configuration> grad = action_gradient(sys, p);
  const Configuration pot = potential_partials(sys, x);
  const double dt = 2.0 / 8;
  for (const Configuration& g : grad)
    CHECK((g - dt * pot).norm() == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("uniform translation leaves the action gradient unchanged") {
  const MassSystem sys({1.0, 2.0}, 2);
  auto gen = test::rng(32);
  DiscretePath p;
  p.times = Eigen::VectorXd::LinSpaced(7, 0.0, 1.0);
  for (int k = 0; k < 7; ++k)
    p.nodes.push_back(test::random_separated(gen, 2, 2, 0.5));

  DiscretePath shifted = p;
  for (Configuration& node : shifted.nodes)
    node.rowwise() += Eigen::RowVector2d(2.0, -3.0);

  const auto g0 = action_gradient(sys, p);
  const auto g1 = action_gradient(sys, shifted);
  for (std::size_t k = 0; k < g0.size(); ++k)
    CHECK((g0[k] - g1[k]).norm() <= 1e-12 * (1.0 + g0[k].norm()));
}

TEST_CASE("fixed-time minimizer recovers the homothetic arc") {
  const TwoBody tb;
  MinimizeOptions opts;
  opts.rng_seed = 7;
  const MinimizeReport rep =
      minimize_fixed_time(tb.sys, tb.at(1.0), tb.at(8.0), 7.0, 128, opts);
  CHECK(rep.converged);
  CHECK(rep.grad_norm <= opts.grad_tol);

  const double analytic = tb.arc_action(1.0, 8.0);
  CHECK(std::abs(rep.action_value - analytic) <= 5e-3 * analytic);

  // node-wise deviation from the analytic arc (shifted to start at t=1)
  double worst = 0.0;
  for (int k = 0; k < rep.path.node_count(); ++k) {
    const Configuration exact = tb.at(1.0 + rep.path.times(k));
    worst = std::max(worst, mass_norm(tb.sys, rep.path.nodes[k] - exact));
  }
  const double scale = mass_norm(tb.sys, tb.at(8.0));
  CHECK(worst <= 5e-3 * scale);

  // first-order condition and the Hoelder bound on the returned minimizer
  CHECK(holder_excess(tb.sys, rep.path, rep.action_value) <= 1e-6 * scale);

  // 2 A tau >= m0 d^2 for the returned value
  const double d = body_max_distance(tb.at(1.0), tb.at(8.0));
  CHECK(2.0 * rep.action_value * 7.0 >= tb.sys.min_mass() * d * d);
}

TEST_CASE("loop minimization stays below the constant-path competitor") {
  const MassSystem sys({1.0, 1.0, 1.0}, 2);
  auto gen = test::rng(33);
  const Configuration x = test::random_separated(gen, 3, 2, 0.8);
  MinimizeOptions opts;
  opts.rng_seed = 5;
  const MinimizeReport rep = minimize_fixed_time(sys, x, x, 0.3, 33, opts);
  CHECK(rep.converged);
  CHECK(rep.action_value <= 0.3 * potential(sys, x) + 1e-9);
}

TEST_CASE("action scaling law on minimizers") {
  // A(gamma_{lambda,mu}) = lambda^{1/2} A(gamma) when mu = lambda^{3/2} tau
  const TwoBody tb;
  MinimizeOptions opts;
  opts.rng_seed = 3;
  opts.restarts = 1;
  const double lambda = 4.0;
  const MinimizeReport base =
      minimize_fixed_time(tb.sys, tb.at(1.0), tb.at(8.0), 7.0, 64, opts);
  const MinimizeReport scaled = minimize_fixed_time(
      tb.sys, lambda * tb.at(1.0), lambda * tb.at(8.0),
      std::pow(lambda, 1.5) * 7.0, 64, opts);
  CHECK(std::abs(scaled.action_value - 2.0 * base.action_value) <=
        1e-6 * base.action_value);
}

TEST_CASE("rescaled minimizers stay numerically critical") {
  const TwoBody tb;
  MinimizeOptions opts;
  opts.rng_seed = 9;
  opts.restarts = 0;
  const MinimizeReport base =
      minimize_fixed_time(tb.sys, tb.at(1.0), tb.at(8.0), 7.0, 48, opts);
  const double lambda = 2.0;
  DiscretePath scaled = base.path;
  scaled.times *= std::pow(lambda, 1.5);
  for (Configuration& node : scaled.nodes) node *= lambda;
  double sq = 0.0;
  for (const Configuration& g : action_gradient(tb.sys, scaled))
    sq += g.squaredNorm();
  // gradient scales like lambda^{-1/2}
  CHECK(std::sqrt(sq) <= 2.0 * opts.grad_tol / std::sqrt(lambda));
}

TEST_CASE("dim-1 minimization is refused, evaluation is not") {
  const MassSystem line({1.0, 1.0}, 1);
  Configuration x(2, 1), y(2, 1);
  x << 1.0, -1.0;
  y << 2.0, -2.0;
  CHECK_THROWS_AS(minimize_fixed_time(line, x, y, 1.0, 8),
                  std::invalid_argument);
  const DiscretePath p = DiscretePath::straight(x, y, 1.0, 8);
  CHECK(std::isfinite(action(line, p)));
  CHECK_NOTHROW(action_gradient(line, p));
}

TEST_CASE("exhausted iteration budget raises NonConvergence") {
  const TwoBody tb;
  MinimizeOptions opts;
  opts.max_iters = 1;
  opts.grad_tol = 1e-15;
  opts.restarts = 1;
  CHECK_THROWS_AS(
      minimize_fixed_time(tb.sys, tb.at(1.0), tb.at(8.0), 7.0, 32, opts),
      NonConvergence);
}

TEST_CASE("path plumbing: validation, subpath, reparametrize") {
  DiscretePath bad;
  bad.times = Eigen::Vector3d(0.0, 1.0, 0.5);
  bad.nodes = {Configuration::Zero(2, 2), Configuration::Zero(2, 2),
               Configuration::Zero(2, 2)};
  CHECK_THROWS(bad.validate());

  const TwoBody tb;
  const DiscretePath p = tb.sampled(1.0, 8.0, 11);
  const DiscretePath sub = subpath(p, 2, 6);
  CHECK(sub.node_count() == 5);
  CHECK(sub.times(0) == doctest::Approx(p.times(2)));

  const DiscretePath re = reparametrize(p, 14.0);
  CHECK(re.duration() == doctest::Approx(14.0));
  CHECK(re.times(0) == 0.0);
}
