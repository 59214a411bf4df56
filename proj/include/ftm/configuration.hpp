#pragma once

#include "ftm/types.hpp"

namespace ftm {

/// Newtonian potential U(x) = Σ_{i<j} mᵢmⱼ/‖rᵢⱼ‖ (positive convention).
/// Returns +inf when the configuration has a collision, so that action
/// evaluation stays a total function.
double potential(const MassSystem& sys, const Configuration& x);

/// Kinetic energy T(v) = ½ Σ mᵢ‖vᵢ‖².
double kinetic(const MassSystem& sys, const Configuration& v);

/// Mass inner product x·y = Σ mᵢ ⟨rᵢ, sᵢ⟩ (symmetric bilinear).
double mass_inner(const MassSystem& sys, const Configuration& x,
                  const Configuration& y);

/// Moment of inertia I(x) = x·x = Σ mᵢ‖rᵢ‖².
double moment_of_inertia(const MassSystem& sys, const Configuration& x);

/// Norm induced by the mass inner product.
double mass_norm(const MassSystem& sys, const Configuration& x);

/// Barycenter G(x) = M⁻¹ Σ mᵢrᵢ.
Eigen::RowVectorXd center_of_mass(const MassSystem& sys,
                                  const Configuration& x);

/// Gradient of U with respect to the mass inner product; row i is the
/// Newtonian acceleration of body i. Throws CollisionError on a collision.
Configuration grad_potential(const MassSystem& sys, const Configuration& x);

/// Raw coordinate partials ∂U/∂rᵢ (no mass-metric raising); row i equals
/// mᵢ × grad_potential(x) row i.
Configuration potential_partials(const MassSystem& sys,
                                 const Configuration& x);

struct PolarDecomposition {
  double rho;       // I(x)^{1/2}
  Configuration u;  // x / rho, so I(u) = 1
};

/// x = rho · u with I(u) = 1. Throws on total collision at the origin.
PolarDecomposition polar_decompose(const MassSystem& sys,
                                   const Configuration& x);

/// Smallest pairwise body distance (plain Euclidean, no masses).
double min_pair_separation(const Configuration& x);

/// Pairwise distances below this are treated as collisions.
double collision_tolerance(const MassSystem& sys, const Configuration& x);

bool has_collision(const MassSystem& sys, const Configuration& x);

/// max over bodies of ‖rᵢ − sᵢ‖, the norm used in the action lower bound
/// 2Aτ ≥ m₀d².
double body_max_distance(const Configuration& x, const Configuration& y);

/// max over bodies of ‖rᵢ‖.
double body_max_norm(const Configuration& x);

/// Throws DimensionMismatch unless x is body_count × dim.
void check_shape(const MassSystem& sys, const Configuration& x);

}  // namespace ftm
