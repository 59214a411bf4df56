#pragma once

#include "ftm/path.hpp"

#include <cstdint>

namespace ftm {

struct CentralConfigOptions {
  int max_iters = 20000;
  double grad_tol = 1e-10;  // tangent gradient norm on {I=1, G=0}
  int restarts = 4;
};

struct CentralConfigResult {
  Configuration a0;          // I(a0)=1, G(a0)=0
  double U0 = 0.0;           // U(a0)
  double tangent_residual = 0.0;  // ‖projection of ∇U onto tangent of {I=1}‖
  double central_residual = 0.0;  // ‖∇U(a0) + U0·a0‖
  bool collinear_caveat = false;  // dim==1: minimality claims unsupported
};

/// Global minimizer of U on {I = 1, G = 0} by projected gradient descent,
/// best of restarts+1 seeded random starts.
CentralConfigResult find_minimal_configuration(
    const MassSystem& sys, std::uint64_t seed,
    const CentralConfigOptions& opts = {});

/// The coefficient making γ(t) = μ t^{2/3} a a motion: μ = (9 U₀/2)^{1/3}.
double homothetic_mu(double U0);

struct HomotheticSpec {
  Configuration a0;
  double mu0 = 0.0;
  double U0 = 0.0;
};

HomotheticSpec make_homothetic(const CentralConfigResult& minimal);

/// Samples γ(t) = μ₀ t^{2/3} a₀ on a uniform grid over [t0, t1], t0 > 0.
DiscretePath homothetic_path(const HomotheticSpec& spec, double t0, double t1,
                             int n_nodes);

/// Exact action of the homothetic arc: (4/3) μ₀² (t1^{1/3} − t0^{1/3}).
double homothetic_action(const HomotheticSpec& spec, double t0, double t1);

/// Free-time action of the zero-energy arc of the reduced one-dimensional
/// Kepler problem (Lagrangian ½ρ̇² + U₀/ρ) between radii rho_a < rho_b.
double kepler_free_time_value(double U0, double rho_a, double rho_b);

}  // namespace ftm
