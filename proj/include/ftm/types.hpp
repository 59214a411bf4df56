#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftm {

/// A configuration of N bodies: one row per body, one column per coordinate.
/// All geometry (norms, distances, gradients) is taken with respect to the
/// mass inner product x·y = Σ mᵢ ⟨rᵢ, sᵢ⟩ unless stated otherwise.
using Configuration = Eigen::MatrixXd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CollisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CollisionTrapped : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateEndpoints : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Masses and spatial dimension of the system, with derived constants.
class MassSystem {
 public:
  MassSystem(std::vector<double> masses, int dim);

  int body_count() const { return static_cast<int>(masses_.size()); }
  int dim() const { return dim_; }
  const Eigen::VectorXd& masses() const { return masses_; }
  double mass(int i) const { return masses_(i); }
  double total_mass() const { return total_mass_; }
  double min_mass() const { return min_mass_; }

 private:
  Eigen::VectorXd masses_;
  int dim_;
  double total_mass_;
  double min_mass_;
};

}  // namespace ftm
