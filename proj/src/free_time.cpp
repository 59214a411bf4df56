#include "ftm/free_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ftm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScanPoints = 8;    // log-spaced τ scan of the bracket
constexpr int kBisectIters = 15;  // bisection budget on the mean energy
constexpr int kGoldenIters = 30;  // fallback search budget

double mean_energy(const MassSystem& sys, const DiscretePath& path) {
  const ActionParts parts = action_parts(sys, path);
  return (parts.kinetic - parts.potential) / path.duration();
}

// Time-averaged |T - U| over the intervals of the path.
double abs_energy_residual(const MassSystem& sys, const DiscretePath& path) {
  const int n = path.node_count() - 1;
  double acc = 0.0;
  double u_prev = potential(sys, path.nodes[0]);
  for (int k = 0; k < n; ++k) {
    const double dt = path.times(k + 1) - path.times(k);
    const double t_k =
        0.5 * moment_of_inertia(sys, path.nodes[k + 1] - path.nodes[k]) /
        (dt * dt);
    const double u_next = potential(sys, path.nodes[k + 1]);
    acc += dt * std::abs(t_k - 0.5 * (u_prev + u_next));
    u_prev = u_next;
  }
  return acc / path.duration();
}

struct TauSolve {
  double tau = 0.0;
  MinimizeReport report;
  double h = 0.0;  // mean energy along the minimizer
};

}  // namespace

TauBracket tau_bracket(const MassSystem& sys, const Configuration& x,
                       const Configuration& y, double action_upper_bound) {
  check_shape(sys, x);
  check_shape(sys, y);
  const double d = body_max_distance(x, y);
  if (!(d > 0.0)) throw DegenerateEndpoints("tau_bracket: x = y");
  if (!(action_upper_bound > 0.0))
    throw std::invalid_argument("tau_bracket: action bound must be positive");

  const double m0 = sys.min_mass();
  const double a_ub = action_upper_bound;
  const double t_lo = m0 * d * d / (2.0 * a_ub);

  // A ≥ τ m₀² / (2(‖x‖ + √(2Aτ/m₀))): the right-hand side grows like √τ, so
  // the admissible τ form an interval. Find its end by doubling + bisection.
  const double x_norm = body_max_norm(x);
  const auto lower_bound_at = [&](double tau) {
    return tau * m0 * m0 / (2.0 * (x_norm + std::sqrt(2.0 * a_ub * tau / m0)));
  };
  double lo = t_lo, hi = t_lo;
  while (lower_bound_at(hi) <= a_ub) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < kInf)) throw std::runtime_error("tau_bracket: no finite t_hi");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lower_bound_at(mid) <= a_ub ? lo : hi) = mid;
  }
  return {t_lo, 2.0 * hi};
}

namespace {

// Upper bound for φ(x,y) from straight chords over a grid of natural time
// scales. Falls back to a fixed-time solve if every chord hits a collision.
double probe_action_bound(const MassSystem& sys, const Configuration& x,
                          const Configuration& y, int n_nodes,
                          const MinimizeOptions& opts) {
  const double d = body_max_distance(x, y);
  const double tau_free = std::sqrt(d * d * d / sys.total_mass());
  double best = kInf;
  for (int j = -4; j <= 4; ++j) {
    const double tau = tau_free * std::pow(2.0, j);
    const double a =
        action(sys, DiscretePath::straight(x, y, tau, std::min(n_nodes, 65)));
    best = std::min(best, a);
  }
  if (std::isfinite(best)) return best;
  return phi_tau(sys, x, y, tau_free, n_nodes, opts);
}

TauSolve solve_at(const MassSystem& sys, const Configuration& x,
                  const Configuration& y, double tau, int n_nodes,
                  const MinimizeOptions& opts, const MinimizeReport* warm) {
  TauSolve out;
  out.tau = tau;
  if (warm != nullptr && warm->converged) {
    MinimizeReport run =
        minimize_path(sys, reparametrize(warm->path, tau), opts);
    if (run.converged) {
      out.report = std::move(run);
      out.h = mean_energy(sys, out.report.path);
      return out;
    }
  }
  out.report = minimize_fixed_time(sys, x, y, tau, n_nodes, opts);
  out.h = mean_energy(sys, out.report.path);
  return out;
}

}  // namespace

FreeTimeResult minimize_free_time(const MassSystem& sys,
                                  const Configuration& x,
                                  const Configuration& y, int n_nodes,
                                  const MinimizeOptions& opts) {
  check_shape(sys, x);
  check_shape(sys, y);
  if (((x - y).array() == 0.0).all())
    throw DegenerateEndpoints(
        "minimize_free_time: the free-time infimum is not attained for "
        "x = y");
  if (sys.dim() < 2)
    throw std::invalid_argument("minimize_free_time: dim must be >= 2");

  const double a_ub = probe_action_bound(sys, x, y, n_nodes, opts);
  const TauBracket bracket = tau_bracket(sys, x, y, a_ub);

  // The scan only locates the sign change of h, so it runs at a loosened
  // gradient tolerance; far-from-optimal transfer times can plateau in the
  // nearly flat rotational valley long after the value has converged.
  MinimizeOptions scan_opts = opts;
  scan_opts.grad_tol = std::max(opts.grad_tol, 1e-6);

  // Scan the bracket on a log grid; keep minimizers for warm starts.
  // Individual grid points that fail to converge are dropped rather than
  // failing the whole solve.
  std::vector<TauSolve> scan;
  scan.reserve(kScanPoints);
  const double ratio = bracket.t_hi / bracket.t_lo;
  const MinimizeReport* warm = nullptr;
  for (int j = 0; j < kScanPoints; ++j) {
    const double tau =
        bracket.t_lo * std::pow(ratio, static_cast<double>(j) / (kScanPoints - 1));
    try {
      scan.push_back(solve_at(sys, x, y, tau, n_nodes, scan_opts, warm));
      warm = &scan.back().report;
    } catch (const NonConvergence&) {
    } catch (const CollisionTrapped&) {
    }
  }
  if (scan.empty())
    throw NonConvergence(
        "minimize_free_time: no transfer time on the scan grid could be "
        "solved");

  int sign_changes = 0;
  int cross = -1;
  for (std::size_t j = 0; j + 1 < scan.size(); ++j) {
    if (scan[j].h > 0.0 && scan[j + 1].h <= 0.0) {
      ++sign_changes;
      cross = static_cast<int>(j);
    }
  }

  TauSolve best = scan[0];
  for (const TauSolve& s : scan)
    if (s.report.action_value < best.report.action_value) best = s;

  if (sign_changes == 1) {
    // bisection on the mean energy; dφ/dτ = −h vanishes at the optimum
    TauSolve lo = scan[cross], hi = scan[cross + 1];
    for (int i = 0; i < kBisectIters; ++i) {
      const double tau_mid = std::sqrt(lo.tau * hi.tau);
      TauSolve mid;
      try {
        mid = solve_at(sys, x, y, tau_mid, n_nodes, scan_opts,
                       lo.h > -hi.h ? &hi.report : &lo.report);
      } catch (const NonConvergence&) {
        break;
      } catch (const CollisionTrapped&) {
        break;
      }
      if (mid.report.action_value < best.report.action_value) best = mid;
      (mid.h > 0.0 ? lo : hi) = std::move(mid);
    }
    TauSolve& closest = (std::abs(lo.h) < std::abs(hi.h)) ? lo : hi;
    if (closest.report.action_value <
        best.report.action_value + 1e-9 * (1.0 + std::abs(best.report.action_value)))
      best = closest;
  } else {
    // h is not a single monotone crossing on this grid: golden section on
    // the value itself, over log τ
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(bracket.t_lo), b = std::log(bracket.t_hi);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    TauSolve sc =
        solve_at(sys, x, y, std::exp(c), n_nodes, scan_opts, &best.report);
    TauSolve sd =
        solve_at(sys, x, y, std::exp(d), n_nodes, scan_opts, &sc.report);
    for (int i = 0; i < kGoldenIters; ++i) {
      if (sc.report.action_value < sd.report.action_value) {
        b = d;
        sd = sc;
        d = c;
        c = b - invphi * (b - a);
        sc = solve_at(sys, x, y, std::exp(c), n_nodes, scan_opts, &sd.report);
      } else {
        a = c;
        sc = sd;
        c = d;
        d = a + invphi * (b - a);
        sd = solve_at(sys, x, y, std::exp(d), n_nodes, scan_opts, &sc.report);
      }
      const TauSolve& cand =
          (sc.report.action_value < sd.report.action_value) ? sc : sd;
      if (cand.report.action_value < best.report.action_value) best = cand;
    }
  }

  // definitive solve at the located transfer time, at the caller's tolerance
  TauSolve final_solve =
      solve_at(sys, x, y, best.tau, n_nodes, opts, &best.report);
  if (final_solve.report.converged) best = std::move(final_solve);

  FreeTimeResult result;
  result.tau_star = best.tau;
  result.phi_value = best.report.action_value;
  result.energy_residual = abs_energy_residual(sys, best.report.path);
  result.path = best.report.path;
  result.report = std::move(best.report);
  return result;
}

double phi(const MassSystem& sys, const Configuration& x,
           const Configuration& y, int n_nodes, const MinimizeOptions& opts) {
  check_shape(sys, x);
  check_shape(sys, y);
  if (((x - y).array() == 0.0).all())
    return 0.0;  // the infimum over loops of shrinking duration
  return minimize_free_time(sys, x, y, n_nodes, opts).phi_value;
}

VerificationReport verify_free_time_minimizer(const MassSystem& sys,
                                              const DiscretePath& path,
                                              const VerifyOptions& opts) {
  path.validate();
  if (path.node_count() < 5)
    throw std::invalid_argument("verify_free_time_minimizer: need >= 5 nodes");

  VerificationReport report;
  const double a_total = action(sys, path);
  const int m = path.node_count();

  // (a) discrete Euler-Lagrange residual
  {
    CheckResult c{"euler_lagrange_residual", false, kInf,
                  opts.el_tol_rel * (1.0 + std::abs(a_total))};
    try {
      double sq = 0.0;
      for (const Configuration& g : action_gradient(sys, path))
        sq += g.squaredNorm();
      c.measured = std::sqrt(sq);
    } catch (const CollisionError&) {
    }
    c.passed = c.measured <= c.tolerance;
    report.checks.push_back(c);
  }

  // (b) pointwise zero energy |T - U|
  {
    const double u_mid = potential(sys, path.nodes[m / 2]);
    CheckResult c{"zero_energy_pointwise", false, 0.0,
                  opts.energy_tol_rel * (std::isfinite(u_mid) ? u_mid : 1.0)};
    double u_prev = potential(sys, path.nodes[0]);
    for (int k = 0; k + 1 < m; ++k) {
      const double dt = path.times(k + 1) - path.times(k);
      const double t_k =
          0.5 * moment_of_inertia(sys, path.nodes[k + 1] - path.nodes[k]) /
          (dt * dt);
      const double u_next = potential(sys, path.nodes[k + 1]);
      c.measured =
          std::max(c.measured, std::abs(t_k - 0.5 * (u_prev + u_next)));
      u_prev = u_next;
    }
    c.passed = c.measured <= c.tolerance;
    report.checks.push_back(c);
  }

  // (c) interior separation
  {
    CheckResult c{"interior_separation", false, kInf, opts.min_separation};
    for (int k = 1; k + 1 < m; ++k)
      c.measured = std::min(c.measured, min_pair_separation(path.nodes[k]));
    c.passed = c.measured >= c.tolerance;
    report.checks.push_back(c);
  }

  // (d) restrictions are fixed-time minimal
  {
    std::mt19937_64 rng(opts.rng_seed);
    CheckResult c{"restriction_minimality", true, 0.0, 0.0};
    for (int trial = 0; trial < opts.subintervals; ++trial) {
      std::uniform_int_distribution<int> pick_k(0, m - 5);
      const int k = pick_k(rng);
      std::uniform_int_distribution<int> pick_l(k + 4, m - 1);
      const int l = pick_l(rng);
      const DiscretePath restricted = subpath(path, k, l);
      const double a_sub = action(sys, restricted);
      const double slack = opts.subinterval_slack_rel * (1.0 + std::abs(a_sub));
      double competitor = kInf;
      try {
        competitor = phi_tau(sys, path.nodes[k], path.nodes[l],
                             restricted.duration(),
                             std::min(restricted.node_count(), 129),
                             opts.minimize);
      } catch (const NonConvergence&) {
      } catch (const CollisionTrapped&) {
      }
      const double excess = a_sub - competitor;  // > 0 means a better path exists
      c.measured = std::max(c.measured, excess);
      c.tolerance = std::max(c.tolerance, slack);
      if (excess > slack) c.passed = false;
    }
    report.checks.push_back(c);
  }

  // (e) center-of-mass drift
  {
    CheckResult c{"center_of_mass_drift", false, 0.0, opts.com_tol};
    const Eigen::RowVectorXd g0 = center_of_mass(sys, path.nodes[0]);
    for (int k = 1; k < m; ++k)
      c.measured =
          std::max(c.measured, (center_of_mass(sys, path.nodes[k]) - g0).norm());
    c.passed = c.measured <= c.tolerance;
    report.checks.push_back(c);
  }

  report.all_passed = true;
  for (const CheckResult& c : report.checks)
    report.all_passed = report.all_passed && c.passed;
  return report;
}

}  // namespace ftm
