#pragma once

#include "ftm/dynamics.hpp"

namespace ftm {

/// Pointwise scalar series along a trajectory. g = İ·I^{−1/4} with
/// İ = 2·x·v; h = T − U; com is ‖G(x(t)) − G(x(t₀))‖.
struct DiagnosticsSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd I_series;
  Eigen::VectorXd U_series;
  Eigen::VectorXd T_series;
  Eigen::VectorXd g_series;
  Eigen::VectorXd h_series;
  Eigen::VectorXd com_series;
};

DiagnosticsSeries diagnostics(const MassSystem& sys, const Trajectory& traj);

/// Max over interior samples of |Ï_fd − 2U − 4h| normalized by max(1, max 2U),
/// with Ï_fd a centered second difference of the inertia series.
double lagrange_jacobi_residual(const DiagnosticsSeries& series);
double lagrange_jacobi_residual(const MassSystem& sys, const Trajectory& traj);

struct GMonotonicityReport {
  double min_increment = 0.0;
  bool is_nondecreasing = false;
};

GMonotonicityReport g_monotonicity(const DiagnosticsSeries& series,
                                   double tol_g = 1e-8);

struct PowerLawFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// Least squares line in log-log coordinates over samples with
/// window_lo ≤ t ≤ window_hi. Requires positive values and ≥ 10 samples in
/// the window; dense windows are thinned to a log-spaced subsample.
PowerLawFit fit_power_law(const Eigen::VectorXd& times,
                          const Eigen::VectorXd& values, double window_lo,
                          double window_hi);

/// Default asymptotic window: the last half of the time span.
std::pair<double, double> tail_window(const Eigen::VectorXd& times);

struct ParabolicReport {
  double T_tail_max = 0.0;
  bool decreasing = false;
};

/// Kinetic-energy tail statistics: completely parabolic motions have
/// T → 0, so the tail should be decreasing with small maximum.
ParabolicReport parabolic_diagnostic(const DiagnosticsSeries& series,
                                     double tail_fraction);

}  // namespace ftm
