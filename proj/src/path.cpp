#include "ftm/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ftm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix-style mixing so nearby seeds give unrelated streams
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return std::mt19937_64(z ^ (z >> 31));
}

Configuration gaussian_configuration(std::mt19937_64& rng, long n, long d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Configuration c(n, d);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < d; ++j) c(i, j) = normal(rng);
  return c;
}

}  // namespace

DiscretePath DiscretePath::straight(const Configuration& x,
                                    const Configuration& y, double tau,
                                    int n_nodes) {
  if (n_nodes < 2) throw std::invalid_argument("straight: n_nodes must be >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("straight: tau must be > 0");
  DiscretePath p;
  p.times = Eigen::VectorXd::LinSpaced(n_nodes, 0.0, tau);
  p.nodes.reserve(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const double s = static_cast<double>(k) / (n_nodes - 1);
    p.nodes.push_back((1.0 - s) * x + s * y);
  }
  return p;
}

void DiscretePath::validate() const {
  if (nodes.size() != static_cast<std::size_t>(times.size()))
    throw std::invalid_argument("DiscretePath: node/time count mismatch");
  if (times.size() < 2)
    throw std::invalid_argument("DiscretePath: need at least 2 nodes");
  for (long k = 0; k + 1 < times.size(); ++k)
    if (!(times(k) < times(k + 1)))
      throw std::invalid_argument("DiscretePath: times must strictly increase");
  for (std::size_t k = 1; k < nodes.size(); ++k)
    if (nodes[k].rows() != nodes[0].rows() || nodes[k].cols() != nodes[0].cols())
      throw DimensionMismatch("DiscretePath: inconsistent node shapes");
}

DiscretePath subpath(const DiscretePath& path, int k, int l) {
  if (k < 0 || l >= path.node_count() || k >= l)
    throw std::invalid_argument("subpath: need 0 <= k < l < node count");
  DiscretePath p;
  p.times = path.times.segment(k, l - k + 1);
  p.nodes.assign(path.nodes.begin() + k, path.nodes.begin() + l + 1);
  return p;
}

DiscretePath reparametrize(const DiscretePath& path, double new_duration) {
  if (!(new_duration > 0.0))
    throw std::invalid_argument("reparametrize: duration must be > 0");
  DiscretePath p = path;
  const double scale = new_duration / path.duration();
  p.times = (path.times.array() - path.times(0)) * scale;
  return p;
}

ActionParts action_parts(const MassSystem& sys, const DiscretePath& path) {
  path.validate();
  const int n = path.node_count() - 1;
  double kin = 0.0, pot = 0.0;
  double u_prev = potential(sys, path.nodes[0]);
  for (int k = 0; k < n; ++k) {
    const double dt = path.times(k + 1) - path.times(k);
    const Configuration diff = path.nodes[k + 1] - path.nodes[k];
    kin += 0.5 * moment_of_inertia(sys, diff) / dt;
    const double u_next = potential(sys, path.nodes[k + 1]);
    pot += 0.5 * dt * (u_prev + u_next);
    u_prev = u_next;
  }
  return {kin, pot};
}

double action(const MassSystem& sys, const DiscretePath& path) {
  const ActionParts parts = action_parts(sys, path);
  return parts.kinetic + parts.potential;
}

std::vector<Configuration> action_gradient(const MassSystem& sys,
                                           const DiscretePath& path) {
  path.validate();
  const int n = path.node_count() - 1;
  if (n < 2) return {};
  std::vector<Configuration> grad;
  grad.reserve(n - 1);
  for (int k = 1; k < n; ++k) {
    const double dt_prev = path.times(k) - path.times(k - 1);
    const double dt_next = path.times(k + 1) - path.times(k);
    Configuration g = (path.nodes[k] - path.nodes[k - 1]) / dt_prev -
                      (path.nodes[k + 1] - path.nodes[k]) / dt_next;
    g.array().colwise() *= sys.masses().array();
    g += 0.5 * (dt_prev + dt_next) * potential_partials(sys, path.nodes[k]);
    grad.push_back(std::move(g));
  }
  return grad;
}

double holder_excess(const MassSystem& sys, const DiscretePath& path,
                     double action_value) {
  path.validate();
  const int m = path.node_count();
  const double two_a = 2.0 * action_value;
  double worst = -kInf;
  for (int k = 0; k < m; ++k) {
    for (int l = k + 1; l < m; ++l) {
      const double lhs = mass_norm(sys, path.nodes[l] - path.nodes[k]);
      const double rhs = std::sqrt(two_a * (path.times(l) - path.times(k)));
      worst = std::max(worst, lhs - rhs);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Optimizer internals
// ---------------------------------------------------------------------------

namespace {

// LDLt-style factorization of the SPD tridiagonal kinetic operator
// diag_k = 1/dt_{k-1} + 1/dt_k, off_k = -1/dt_k over the interior nodes.
// Used as the fixed initial Hessian of the quasi-Newton iteration.
struct KineticSolver {
  Eigen::VectorXd diag, off, piv, mult;

  explicit KineticSolver(const Eigen::VectorXd& times) {
    const long n = times.size() - 1;  // intervals
    const long m = n - 1;             // interior nodes
    diag.resize(m);
    off.resize(std::max<long>(m - 1, 0));
    for (long k = 0; k < m; ++k) {
      const double dt_prev = times(k + 1) - times(k);
      const double dt_next = times(k + 2) - times(k + 1);
      diag(k) = 1.0 / dt_prev + 1.0 / dt_next;
      if (k + 1 < m) off(k) = -1.0 / dt_next;
    }
    piv.resize(m);
    mult.resize(std::max<long>(m - 1, 0));
    piv(0) = diag(0);
    for (long k = 1; k < m; ++k) {
      mult(k - 1) = off(k - 1) / piv(k - 1);
      piv(k) = diag(k) - mult(k - 1) * off(k - 1);
    }
  }

  // Solves T u = rhs in place (Thomas algorithm).
  void solve(Eigen::Ref<Eigen::VectorXd> rhs) const {
    const long m = diag.size();
    for (long k = 1; k < m; ++k) rhs(k) -= mult(k - 1) * rhs(k - 1);
    rhs(m - 1) /= piv(m - 1);
    for (long k = m - 2; k >= 0; --k)
      rhs(k) = (rhs(k) - off(k) * rhs(k + 1)) / piv(k);
  }
};

struct Problemspace {
  const MassSystem& sys;
  Eigen::VectorXd times;
  Configuration first, last;
  long n_interior, n_bodies, dim;

  Problemspace(const MassSystem& s, const DiscretePath& init)
      : sys(s),
        times(init.times),
        first(init.nodes.front()),
        last(init.nodes.back()),
        n_interior(init.node_count() - 2),
        n_bodies(init.nodes.front().rows()),
        dim(init.nodes.front().cols()) {}

  long size() const { return n_interior * n_bodies * dim; }

  Eigen::VectorXd flatten(const DiscretePath& p) const {
    Eigen::VectorXd z(size());
    for (long k = 0; k < n_interior; ++k)
      for (long i = 0; i < n_bodies; ++i)
        z.segment((k * n_bodies + i) * dim, dim) =
            p.nodes[k + 1].row(i).transpose();
    return z;
  }

  DiscretePath unflatten(const Eigen::VectorXd& z) const {
    DiscretePath p;
    p.times = times;
    p.nodes.resize(n_interior + 2, Configuration(n_bodies, dim));
    p.nodes.front() = first;
    p.nodes.back() = last;
    for (long k = 0; k < n_interior; ++k)
      for (long i = 0; i < n_bodies; ++i)
        p.nodes[k + 1].row(i) =
            z.segment((k * n_bodies + i) * dim, dim).transpose();
    return p;
  }

  Eigen::VectorXd flatten_grad(const std::vector<Configuration>& g) const {
    Eigen::VectorXd z(size());
    for (long k = 0; k < n_interior; ++k)
      for (long i = 0; i < n_bodies; ++i)
        z.segment((k * n_bodies + i) * dim, dim) = g[k].row(i).transpose();
    return z;
  }

  double min_interior_separation(const DiscretePath& p) const {
    double best = kInf;
    for (long k = 1; k <= n_interior; ++k)
      best = std::min(best, min_pair_separation(p.nodes[k]));
    return best;
  }

  // Applies the inverse kinetic Hessian channel by channel.
  void precondition(const KineticSolver& kin, Eigen::VectorXd& q) const {
    Eigen::VectorXd chan(n_interior);
    for (long i = 0; i < n_bodies; ++i) {
      const double mi = sys.mass(i);
      for (long c = 0; c < dim; ++c) {
        for (long k = 0; k < n_interior; ++k)
          chan(k) = q((k * n_bodies + i) * dim + c) / mi;
        kin.solve(chan);
        for (long k = 0; k < n_interior; ++k)
          q((k * n_bodies + i) * dim + c) = chan(k);
      }
    }
  }
};

}  // namespace

MinimizeReport minimize_path(const MassSystem& sys, const DiscretePath& initial,
                             const MinimizeOptions& opts) {
  initial.validate();
  if (initial.node_count() < 3)
    throw std::invalid_argument("minimize_path: need at least 3 nodes");
  check_shape(sys, initial.nodes.front());

  const Problemspace space(sys, initial);
  const KineticSolver kin(initial.times);

  MinimizeReport report;
  report.path = initial;
  report.min_separation = space.min_interior_separation(initial);

  Eigen::VectorXd z = space.flatten(initial);
  DiscretePath current = initial;
  double f = action(sys, current);
  if (!std::isfinite(f) || report.min_separation < opts.collision_guard) {
    report.action_value = f;
    report.grad_norm = kInf;
    return report;  // infeasible start; caller restarts with a bowed arc
  }

  const int history = 10;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  Eigen::VectorXd g = space.flatten_grad(action_gradient(sys, current));
  double min_sep_seen = report.min_separation;

  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    const double gnorm = g.norm();
    if (gnorm <= opts.grad_tol) {
      report.converged = true;
      break;
    }

    // two-loop recursion with the kinetic operator as initial Hessian
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (long h = static_cast<long>(s_hist.size()) - 1; h >= 0; --h) {
      alpha[h] = rho_hist[h] * s_hist[h].dot(q);
      q -= alpha[h] * y_hist[h];
    }
    space.precondition(kin, q);
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * y_hist[h].dot(q);
      q += (alpha[h] - beta) * s_hist[h];
    }
    Eigen::VectorXd direction = -q;
    double slope = g.dot(direction);
    if (!(slope < 0.0)) {  // stale curvature pairs; fall back to steepest
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -g;
      space.precondition(kin, direction);
      slope = g.dot(direction);
    }

    // backtracking Armijo search that also enforces the collision guard
    double step = 1.0;
    double f_new = kInf;
    DiscretePath trial;
    Eigen::VectorXd z_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      z_new = z + step * direction;
      trial = space.unflatten(z_new);
      const double sep = space.min_interior_separation(trial);
      if (sep >= opts.collision_guard) {
        f_new = action(sys, trial);
        if (f_new <= f + 1e-4 * step * slope) {
          accepted = true;
          min_sep_seen = std::min(min_sep_seen, sep);
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no acceptable step; stalled or guard-trapped

    Eigen::VectorXd g_new =
        space.flatten_grad(action_gradient(sys, trial));
    Eigen::VectorXd s_vec = z_new - z;
    Eigen::VectorXd y_vec = g_new - g;
    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
      if (static_cast<int>(s_hist.size()) == history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
    }
    z = std::move(z_new);
    g = std::move(g_new);
    f = f_new;
    current = std::move(trial);
  }

  report.path = std::move(current);
  report.action_value = f;
  report.grad_norm = g.norm();
  report.iterations = iter;
  report.min_separation = min_sep_seen;
  return report;
}

namespace {

DiscretePath initial_guess(const MassSystem& sys, const Configuration& x,
                           const Configuration& y, double tau, int n_nodes,
                           std::uint64_t seed, int attempt) {
  DiscretePath p = DiscretePath::straight(x, y, tau, n_nodes);
  auto rng = seeded_rng(seed, static_cast<std::uint64_t>(attempt));
  const double scale = mass_norm(sys, y - x);
  const double noise = 1e-3 * (scale > 0.0 ? scale : 1.0);
  for (int k = 1; k + 1 < n_nodes; ++k)
    p.nodes[k] += noise * gaussian_configuration(rng, x.rows(), x.cols());
  if (attempt > 0) {
    // bowed arc: half-sine bump in a random direction, growing per attempt
    Configuration dir = gaussian_configuration(rng, x.rows(), x.cols());
    dir /= std::max(mass_norm(sys, dir), 1e-300);
    const double amp = 0.15 * attempt * (scale > 0.0 ? scale : 1.0);
    for (int k = 1; k + 1 < n_nodes; ++k) {
      const double s = static_cast<double>(k) / (n_nodes - 1);
      p.nodes[k] += amp * std::sin(M_PI * s) * dir;
    }
  }
  return p;
}

}  // namespace

MinimizeReport minimize_fixed_time(const MassSystem& sys,
                                   const Configuration& x,
                                   const Configuration& y, double tau,
                                   int n_nodes, const MinimizeOptions& opts) {
  check_shape(sys, x);
  check_shape(sys, y);
  if (sys.dim() < 2)
    throw std::invalid_argument(
        "minimize_fixed_time: dim must be >= 2 (interior collision avoidance "
        "fails on the line)");
  if (!(tau > 0.0))
    throw std::invalid_argument("minimize_fixed_time: tau must be > 0");
  if (n_nodes < 3)
    throw std::invalid_argument("minimize_fixed_time: n_nodes must be >= 3");

  MinimizeReport best;
  bool have_best = false;
  bool all_trapped = true;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    DiscretePath init =
        initial_guess(sys, x, y, tau, n_nodes, opts.rng_seed, attempt);
    MinimizeReport run = minimize_path(sys, init, opts);
    const bool trapped = !run.converged &&
                         run.min_separation <= 2.0 * opts.collision_guard;
    if (!trapped) all_trapped = false;
    if (run.converged &&
        (!have_best || run.action_value < best.action_value)) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best) {
    if (all_trapped)
      throw CollisionTrapped(
          "minimize_fixed_time: every restart was squeezed against the "
          "collision guard");
    throw NonConvergence(
        "minimize_fixed_time: iteration budget exhausted without reaching "
        "grad_tol");
  }
  return best;
}

double phi_tau(const MassSystem& sys, const Configuration& x,
               const Configuration& y, double tau, int n_nodes,
               const MinimizeOptions& opts) {
  return minimize_fixed_time(sys, x, y, tau, n_nodes, opts).action_value;
}

}  // namespace ftm
