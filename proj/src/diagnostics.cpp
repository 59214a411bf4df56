#include "ftm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ftm {

DiagnosticsSeries diagnostics(const MassSystem& sys, const Trajectory& traj) {
  const int n = traj.sample_count();
  if (n == 0) throw std::invalid_argument("diagnostics: empty trajectory");
  DiagnosticsSeries s;
  s.times = traj.times;
  s.I_series.resize(n);
  s.U_series.resize(n);
  s.T_series.resize(n);
  s.g_series.resize(n);
  s.h_series.resize(n);
  s.com_series.resize(n);
  const Eigen::RowVectorXd g0 = center_of_mass(sys, traj.positions[0]);
  for (int k = 0; k < n; ++k) {
    const Configuration& x = traj.positions[k];
    const Configuration& v = traj.velocities[k];
    const double inertia = moment_of_inertia(sys, x);
    const double i_dot = 2.0 * mass_inner(sys, x, v);
    s.I_series(k) = inertia;
    s.U_series(k) = potential(sys, x);
    s.T_series(k) = kinetic(sys, v);
    s.g_series(k) = i_dot * std::pow(inertia, -0.25);
    s.h_series(k) = s.T_series(k) - s.U_series(k);
    s.com_series(k) = (center_of_mass(sys, x) - g0).norm();
  }
  return s;
}

double lagrange_jacobi_residual(const DiagnosticsSeries& s) {
  const long n = s.times.size();
  if (n < 5)
    throw std::invalid_argument("lagrange_jacobi_residual: need >= 5 samples");
  const double norm = std::max(1.0, 2.0 * s.U_series.maxCoeff());
  double worst = 0.0;
  for (long k = 1; k + 1 < n; ++k) {
    const double dm = s.times(k) - s.times(k - 1);
    const double dp = s.times(k + 1) - s.times(k);
    // second difference on a possibly nonuniform grid
    const double i_dd = 2.0 *
                        (dm * s.I_series(k + 1) - (dm + dp) * s.I_series(k) +
                         dp * s.I_series(k - 1)) /
                        (dm * dp * (dm + dp));
    const double target = 2.0 * s.U_series(k) + 4.0 * s.h_series(k);
    worst = std::max(worst, std::abs(i_dd - target));
  }
  return worst / norm;
}

double lagrange_jacobi_residual(const MassSystem& sys, const Trajectory& traj) {
  return lagrange_jacobi_residual(diagnostics(sys, traj));
}

GMonotonicityReport g_monotonicity(const DiagnosticsSeries& series,
                                   double tol_g) {
  const long n = series.g_series.size();
  if (n < 2)
    throw std::invalid_argument("g_monotonicity: need >= 2 samples");
  GMonotonicityReport report;
  report.min_increment = std::numeric_limits<double>::infinity();
  for (long k = 0; k + 1 < n; ++k)
    report.min_increment =
        std::min(report.min_increment, series.g_series(k + 1) - series.g_series(k));
  report.is_nondecreasing = report.min_increment >= -tol_g;
  return report;
}

std::pair<double, double> tail_window(const Eigen::VectorXd& times) {
  const double span = times(times.size() - 1) - times(0);
  return {times(0) + 0.5 * span, times(times.size() - 1)};
}

PowerLawFit fit_power_law(const Eigen::VectorXd& times,
                          const Eigen::VectorXd& values, double window_lo,
                          double window_hi) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_power_law: length mismatch");
  std::vector<long> in_window;
  for (long k = 0; k < times.size(); ++k) {
    if (times(k) < window_lo || times(k) > window_hi) continue;
    if (!(values(k) > 0.0))
      throw std::invalid_argument(
          "fit_power_law: non-positive value inside the window");
    in_window.push_back(k);
  }
  if (in_window.size() < 10)
    throw std::invalid_argument("fit_power_law: need >= 10 samples in window");

  // thin dense windows to a log-spaced subsample
  std::vector<long> picked;
  constexpr std::size_t kMaxPoints = 512;
  if (in_window.size() <= kMaxPoints) {
    picked = in_window;
  } else {
    const double t_first = times(in_window.front());
    const double t_last = times(in_window.back());
    const double log_ratio = std::log(t_last / std::max(t_first, 1e-300));
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < kMaxPoints; ++j) {
      const double t_want =
          t_first * std::exp(log_ratio * static_cast<double>(j) /
                             static_cast<double>(kMaxPoints - 1));
      while (cursor + 1 < in_window.size() && times(in_window[cursor]) < t_want)
        ++cursor;
      if (picked.empty() || picked.back() != in_window[cursor])
        picked.push_back(in_window[cursor]);
    }
  }

  const long m = static_cast<long>(picked.size());
  Eigen::VectorXd lx(m), ly(m);
  for (long j = 0; j < m; ++j) {
    lx(j) = std::log(times(picked[j]));
    ly(j) = std::log(values(picked[j]));
  }
  const double mx = lx.mean(), my = ly.mean();
  const Eigen::VectorXd dx = lx.array() - mx;
  const Eigen::VectorXd dy = ly.array() - my;
  const double sxx = dx.squaredNorm();
  const double slope = dx.dot(dy) / sxx;
  const double intercept = my - slope * mx;
  const double ss_res = (dy - slope * dx).squaredNorm();
  const double ss_tot = dy.squaredNorm();

  PowerLawFit fit;
  fit.exponent = slope;
  fit.coefficient = std::exp(intercept);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  return fit;
}

ParabolicReport parabolic_diagnostic(const DiagnosticsSeries& series,
                                     double tail_fraction) {
  const long n = series.T_series.size();
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw std::invalid_argument("parabolic_diagnostic: fraction in (0,1)");
  long start = static_cast<long>(std::ceil((1.0 - tail_fraction) * (n - 1)));
  start = std::clamp(start, 0L, n - 1);
  if (start >= n - 1 && n >= 2) start = n - 2;

  ParabolicReport report;
  report.T_tail_max = 0.0;
  report.decreasing = true;
  for (long k = start; k < n; ++k)
    report.T_tail_max = std::max(report.T_tail_max, series.T_series(k));
  // strictly decreasing with a relative margin, so that a constant series
  // (bounded orbit) does not qualify
  for (long k = start; k + 1 < n; ++k) {
    if (!(series.T_series(k + 1) <= series.T_series(k) * (1.0 - 1e-9))) {
      report.decreasing = false;
      break;
    }
  }
  return report;
}

}  // namespace ftm
