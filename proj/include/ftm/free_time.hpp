#pragma once

#include "ftm/path.hpp"

#include <string>
#include <vector>

namespace ftm {

struct TauBracket {
  double t_lo;
  double t_hi;
};

/// Transfer-time bracket for the free-time minimum: t_lo from the action
/// lower bound 2Aτ ≥ m₀d², t_hi from the potential lower bound along curves
/// of bounded action (doubled for margin). Requires x ≠ y and an action
/// upper bound valid at some transfer time.
TauBracket tau_bracket(const MassSystem& sys, const Configuration& x,
                       const Configuration& y, double action_upper_bound);

struct FreeTimeResult {
  DiscretePath path;
  double tau_star = 0.0;
  double phi_value = 0.0;
  double energy_residual = 0.0;  // time-averaged |T − U| along the path
  MinimizeReport report;
};

/// Minimizes the action over both the path and the transfer time.
/// tau_star is located as a zero of the mean energy h(τ) along fixed-time
/// minimizers (dφ/dτ = −h), with a golden-section fallback on φ(x,y,τ).
FreeTimeResult minimize_free_time(const MassSystem& sys,
                                  const Configuration& x,
                                  const Configuration& y, int n_nodes,
                                  const MinimizeOptions& opts = {});

/// Critical action potential φ(x, y): 0 when x = y, otherwise the free-time
/// minimum value.
double phi(const MassSystem& sys, const Configuration& x,
           const Configuration& y, int n_nodes,
           const MinimizeOptions& opts = {});

struct VerifyOptions {
  double el_tol_rel = 1e-6;            // × (1 + |A|), Euler–Lagrange residual
  double energy_tol_rel = 1e-3;        // × U(midpoint), pointwise |T − U|
  double min_separation = 1e-6;        // interior collision guard
  double subinterval_slack_rel = 1e-3; // × (1 + |A_sub|), restriction check
  double com_tol = 1e-8;               // center-of-mass drift
  int subintervals = 8;
  std::uint64_t rng_seed = 0x5eed;
  MinimizeOptions minimize;            // competitor solves in check (d)
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed = false;
};

/// Certificate battery for the free-time-minimizer property:
/// (a) discrete Euler–Lagrange residual, (b) pointwise zero energy,
/// (c) interior separation, (d) restrictions stay fixed-time minimal,
/// (e) constant center of mass.
VerificationReport verify_free_time_minimizer(const MassSystem& sys,
                                              const DiscretePath& path,
                                              const VerifyOptions& opts = {});

}  // namespace ftm
