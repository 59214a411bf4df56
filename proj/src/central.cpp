#include "ftm/central.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ftm {

namespace {

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return std::mt19937_64(z ^ (z >> 31));
}

// Recenter to G=0 and rescale to I=1.
Configuration project_sphere(const MassSystem& sys, Configuration x) {
  x.rowwise() -= center_of_mass(sys, x);
  return x / mass_norm(sys, x);
}

struct SphereRun {
  Configuration a;
  double value = std::numeric_limits<double>::infinity();
  double tangent_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Raw-coordinate Hessian of U (blocks over body pairs), row-major layout.
Eigen::MatrixXd potential_hessian_raw(const MassSystem& sys,
                                      const Configuration& x) {
  const long n = x.rows(), d = x.cols();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n * d, n * d);
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const Eigen::VectorXd rij = (x.row(i) - x.row(j)).transpose();
      const double r2 = rij.squaredNorm();
      const double r = std::sqrt(r2);
      const Eigen::MatrixXd block =
          sys.mass(i) * sys.mass(j) *
          (3.0 * rij * rij.transpose() / (r2 * r2 * r) -
           Eigen::MatrixXd::Identity(d, d) / (r2 * r));
      hess.block(i * d, i * d, d, d) += block;
      hess.block(j * d, j * d, d, d) += block;
      hess.block(i * d, j * d, d, d) -= block;
      hess.block(j * d, i * d, d, d) -= block;
    }
  }
  return hess;
}

// Newton iteration on the stationarity system ∂U/∂x + λ (m ∘ a) = 0,
// I(a) = 1. The Jacobian is singular along the rotation orbit, so the step
// is the minimum-norm least-squares solution.
void newton_polish(const MassSystem& sys, Configuration& a, int iters) {
  const long n = a.rows(), d = a.cols();
  const long m = n * d;
  double lambda = potential(sys, a);
  for (int it = 0; it < iters; ++it) {
    const Configuration raw_grad = potential_partials(sys, a);
    Eigen::VectorXd residual(m + 1);
    Eigen::VectorXd metric(m);
    for (long i = 0; i < n; ++i)
      for (long c = 0; c < d; ++c) {
        residual(i * d + c) =
            raw_grad(i, c) + lambda * sys.mass(i) * a(i, c);
        metric(i * d + c) = sys.mass(i) * a(i, c);
      }
    residual(m) = 0.5 * (moment_of_inertia(sys, a) - 1.0);

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m + 1, m + 1);
    jac.topLeftCorner(m, m) = potential_hessian_raw(sys, a);
    for (long i = 0; i < n; ++i)
      for (long c = 0; c < d; ++c)
        jac(i * d + c, i * d + c) += lambda * sys.mass(i);
    jac.block(0, m, m, 1) = metric;
    jac.block(m, 0, 1, m) = metric.transpose();

    const Eigen::VectorXd step =
        jac.completeOrthogonalDecomposition().solve(-residual);
    for (long i = 0; i < n; ++i)
      for (long c = 0; c < d; ++c) a(i, c) += step(i * d + c);
    lambda += step(m);
    a = project_sphere(sys, a);
  }
}

// Projected gradient descent for U on {I=1, G=0} with Barzilai-Borwein step
// lengths, followed by a Newton polish once the basin is identified. The
// mass-metric gradient of U is orthogonal to translations, so only the
// radial projection matters analytically; recentering is numerical hygiene.
SphereRun minimize_on_sphere(const MassSystem& sys, Configuration start,
                             const CentralConfigOptions& opts) {
  SphereRun run;
  Configuration x = project_sphere(sys, std::move(start));
  double u = potential(sys, x);

  Configuration grad = grad_potential(sys, x);
  Configuration tang = grad - mass_inner(sys, grad, x) * x;
  double step = 0.1 / std::max(u, 1e-12);
  Configuration x_prev, tang_prev;

  // phase 1: descend until the quadratic basin (coarse tolerance)
  const double coarse_tol = std::max(opts.grad_tol, 1e-5 * u);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const double residual = mass_norm(sys, tang);
    run.iterations = iter;
    if (residual <= coarse_tol) break;
    if (iter > 0) {
      const Configuration s = x - x_prev;
      const Configuration g_diff = tang - tang_prev;
      const double sy = mass_inner(sys, s, g_diff);
      if (sy > 0.0) step = moment_of_inertia(sys, s) / sy;
    }
    step = std::clamp(step, 1e-14, 1e6);

    x_prev = x;
    tang_prev = tang;
    double alpha = step;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      Configuration cand = project_sphere(sys, x - alpha * tang);
      const double u_cand = potential(sys, cand);
      if (u_cand < u - 1e-4 * alpha * residual * residual) {
        x = std::move(cand);
        u = u_cand;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;  // at the floating-point floor of the line search
    grad = grad_potential(sys, x);
    tang = grad - mass_inner(sys, grad, x) * x;
  }

  // phase 2: Newton on the central-configuration equation
  newton_polish(sys, x, 12);
  u = potential(sys, x);
  grad = grad_potential(sys, x);
  tang = grad - mass_inner(sys, grad, x) * x;

  run.a = std::move(x);
  run.value = u;
  run.tangent_residual = mass_norm(sys, tang);
  run.converged = run.tangent_residual <= opts.grad_tol;
  return run;
}

}  // namespace

CentralConfigResult find_minimal_configuration(const MassSystem& sys,
                                               std::uint64_t seed,
                                               const CentralConfigOptions& opts) {
  SphereRun best;
  bool have = false;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    auto rng = seeded_rng(seed, static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal(0.0, 1.0);
    Configuration start(sys.body_count(), sys.dim());
    for (long i = 0; i < start.rows(); ++i)
      for (long j = 0; j < start.cols(); ++j) start(i, j) = normal(rng);
    if (min_pair_separation(start) < 1e-6) continue;  // freak coincident draw
    SphereRun run = minimize_on_sphere(sys, std::move(start), opts);
    if (run.converged && (!have || run.value < best.value)) {
      best = std::move(run);
      have = true;
    }
  }
  if (!have)
    throw NonConvergence(
        "find_minimal_configuration: no restart reached the tangent "
        "tolerance");

  CentralConfigResult result;
  result.a0 = best.a;
  result.U0 = best.value;
  result.tangent_residual = best.tangent_residual;
  result.central_residual =
      mass_norm(sys, grad_potential(sys, best.a) + best.value * best.a);
  result.collinear_caveat = sys.dim() == 1;
  return result;
}

double homothetic_mu(double U0) {
  if (!(U0 > 0.0)) throw std::invalid_argument("homothetic_mu: U0 must be > 0");
  return std::cbrt(4.5 * U0);
}

HomotheticSpec make_homothetic(const CentralConfigResult& minimal) {
  return {minimal.a0, homothetic_mu(minimal.U0), minimal.U0};
}

DiscretePath homothetic_path(const HomotheticSpec& spec, double t0, double t1,
                             int n_nodes) {
  if (!(0.0 < t0 && t0 < t1))
    throw std::invalid_argument("homothetic_path: need 0 < t0 < t1");
  if (n_nodes < 2)
    throw std::invalid_argument("homothetic_path: n_nodes must be >= 2");
  DiscretePath p;
  p.times = Eigen::VectorXd::LinSpaced(n_nodes, t0, t1);
  p.nodes.reserve(n_nodes);
  for (int k = 0; k < n_nodes; ++k)
    p.nodes.push_back(spec.mu0 * std::pow(p.times(k), 2.0 / 3.0) * spec.a0);
  return p;
}

namespace {

double homothetic_action_value(double mu0, double t0, double t1) {
  return (4.0 / 3.0) * mu0 * mu0 * (std::cbrt(t1) - std::cbrt(t0));
}

}  // namespace

double homothetic_action(const HomotheticSpec& spec, double t0, double t1) {
  if (!(0.0 <= t0 && t0 <= t1))
    throw std::invalid_argument("homothetic_action: need 0 <= t0 <= t1");
  return homothetic_action_value(spec.mu0, t0, t1);
}

double kepler_free_time_value(double U0, double rho_a, double rho_b) {
  if (!(0.0 <= rho_a && rho_a < rho_b))
    throw std::invalid_argument(
        "kepler_free_time_value: need 0 <= rho_a < rho_b");
  const double mu0 = homothetic_mu(U0);
  const double t_a = std::pow(rho_a / mu0, 1.5);
  const double t_b = std::pow(rho_b / mu0, 1.5);
  return homothetic_action_value(mu0, t_a, t_b);
}

}  // namespace ftm
