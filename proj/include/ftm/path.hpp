#pragma once

#include "ftm/configuration.hpp"
#include "ftm/types.hpp"

#include <cstdint>
#include <vector>

namespace ftm {

/// A time grid t₀ < t₁ < … < t_n with one configuration per node.
struct DiscretePath {
  Eigen::VectorXd times;
  std::vector<Configuration> nodes;

  double duration() const { return times(times.size() - 1) - times(0); }
  int node_count() const { return static_cast<int>(nodes.size()); }

  /// Straight segment from x to y on [0, tau] with n_nodes uniform nodes.
  static DiscretePath straight(const Configuration& x, const Configuration& y,
                               double tau, int n_nodes);

  void validate() const;  // strictly increasing times, matching node count
};

/// Restriction of the path to nodes [k, l].
DiscretePath subpath(const DiscretePath& path, int k, int l);

/// Same nodes, times rescaled linearly to the new duration (keeping t₀ = 0).
DiscretePath reparametrize(const DiscretePath& path, double new_duration);

struct ActionParts {
  double kinetic;    // Σ_k ½‖x_{k+1}−x_k‖²/Δt_k  (≈ ∫T dt)
  double potential;  // Σ_k Δt_k (U_k + U_{k+1})/2 (≈ ∫U dt)
};

ActionParts action_parts(const MassSystem& sys, const DiscretePath& path);

/// Discretized Lagrangian action; +inf when any node has a collision.
double action(const MassSystem& sys, const DiscretePath& path);

/// Exact gradient of the discrete action with respect to the coordinates of
/// the interior nodes (endpoints held fixed). Entry k is the gradient at
/// node k+1. Throws CollisionError at collision nodes.
std::vector<Configuration> action_gradient(const MassSystem& sys,
                                           const DiscretePath& path);

struct MinimizeOptions {
  int max_iters = 5000;
  double grad_tol = 1e-8;
  int restarts = 4;
  std::uint64_t rng_seed = 0;
  double collision_guard = 1e-9;  // minimum pairwise separation in line search
};

struct MinimizeReport {
  DiscretePath path;
  double action_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double min_separation = 0.0;  // smallest interior pair distance encountered
};

/// Single optimization run from the given initial path (endpoints fixed).
/// Never throws for numerical reasons; inspect report.converged.
MinimizeReport minimize_path(const MassSystem& sys, const DiscretePath& initial,
                             const MinimizeOptions& opts = {});

/// Local minimizer of the discrete action in C(x, y, tau), best of
/// opts.restarts+1 randomized starts. Requires dim ≥ 2 and n_nodes ≥ 3.
/// Throws NonConvergence or CollisionTrapped when every start fails.
MinimizeReport minimize_fixed_time(const MassSystem& sys,
                                   const Configuration& x,
                                   const Configuration& y, double tau,
                                   int n_nodes,
                                   const MinimizeOptions& opts = {});

/// Upper approximation of the fixed-time minimal action φ(x, y, τ).
double phi_tau(const MassSystem& sys, const Configuration& x,
               const Configuration& y, double tau, int n_nodes,
               const MinimizeOptions& opts = {});

/// max over node pairs k<l of ‖x_l−x_k‖ − √(2A)·√(t_l−t_k); ≤ ~0 for
/// minimizers (discrete form of the Hölder action bound).
double holder_excess(const MassSystem& sys, const DiscretePath& path,
                     double action_value);

}  // namespace ftm
