#pragma once

#include "ftm/configuration.hpp"
#include "ftm/types.hpp"

#include <vector>

namespace ftm {

struct IntegratorOptions {
  double tol = 1e-10;             // relative per-step error target
  double abs_tol_factor = 1e-3;   // absolute tolerance = tol × this
  int n_samples = 512;            // stored samples including both endpoints
  double collision_factor = 1e-6; // × initial min separation: early stop
};

enum class Termination { completed, collision_approach };

struct Trajectory {
  Eigen::VectorXd times;
  std::vector<Configuration> positions;
  std::vector<Configuration> velocities;
  double energy0 = 0.0;           // T(v₀) − U(x₀)
  double max_energy_drift = 0.0;  // max |h(t) − h(t₀)| over samples
  double min_separation = 0.0;    // smallest pairwise distance seen
  Termination termination = Termination::completed;

  int sample_count() const { return static_cast<int>(positions.size()); }
};

/// Integrates ẍ = ∇U(x) (mass-metric gradient, i.e. Newton's equations) with
/// an embedded Dormand–Prince 5(4) pair and per-step error control. Samples
/// are taken on the uniform grid over [t0, t1]; the run ends early with a
/// collision_approach flag if a pair separation falls below
/// collision_factor × the initial minimum separation.
Trajectory integrate_newton(const MassSystem& sys, const Configuration& x0,
                            const Configuration& v0, double t0, double t1,
                            const IntegratorOptions& opts = {});

}  // namespace ftm
