#include "ftm/configuration.hpp"

#include <cmath>
#include <limits>

namespace ftm {

MassSystem::MassSystem(std::vector<double> masses, int dim) : dim_(dim) {
  if (masses.size() < 2)
    throw std::invalid_argument("MassSystem: need at least 2 bodies");
  if (dim < 1) throw std::invalid_argument("MassSystem: dim must be >= 1");
  masses_ = Eigen::Map<const Eigen::VectorXd>(masses.data(),
                                              static_cast<long>(masses.size()));
  for (long i = 0; i < masses_.size(); ++i)
    if (!(masses_(i) > 0.0))
      throw std::invalid_argument("MassSystem: masses must be positive");
  total_mass_ = masses_.sum();
  min_mass_ = masses_.minCoeff();
}

void check_shape(const MassSystem& sys, const Configuration& x) {
  if (x.rows() != sys.body_count() || x.cols() != sys.dim())
    throw DimensionMismatch("configuration is " + std::to_string(x.rows()) +
                            "x" + std::to_string(x.cols()) + ", expected " +
                            std::to_string(sys.body_count()) + "x" +
                            std::to_string(sys.dim()));
}

double min_pair_separation(const Configuration& x) {
  const long n = x.rows();
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      best = std::min(best, (x.row(i) - x.row(j)).norm());
  return best;
}

double collision_tolerance(const MassSystem& sys, const Configuration& x) {
  return 1e-12 * (1.0 + mass_norm(sys, x));
}

bool has_collision(const MassSystem& sys, const Configuration& x) {
  check_shape(sys, x);
  return min_pair_separation(x) < collision_tolerance(sys, x);
}

double potential(const MassSystem& sys, const Configuration& x) {
  check_shape(sys, x);
  const double tol = collision_tolerance(sys, x);
  const long n = x.rows();
  double u = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double r = (x.row(i) - x.row(j)).norm();
      if (r < tol) return std::numeric_limits<double>::infinity();
      u += sys.mass(i) * sys.mass(j) / r;
    }
  }
  return u;
}

double kinetic(const MassSystem& sys, const Configuration& v) {
  check_shape(sys, v);
  return 0.5 * (sys.masses().array() * v.rowwise().squaredNorm().array()).sum();
}

double mass_inner(const MassSystem& sys, const Configuration& x,
                  const Configuration& y) {
  check_shape(sys, x);
  check_shape(sys, y);
  return (sys.masses().array() * (x.array() * y.array()).rowwise().sum()).sum();
}

double moment_of_inertia(const MassSystem& sys, const Configuration& x) {
  check_shape(sys, x);
  return (sys.masses().array() * x.rowwise().squaredNorm().array()).sum();
}

double mass_norm(const MassSystem& sys, const Configuration& x) {
  return std::sqrt(moment_of_inertia(sys, x));
}

Eigen::RowVectorXd center_of_mass(const MassSystem& sys,
                                  const Configuration& x) {
  check_shape(sys, x);
  return (sys.masses().transpose() * x) / sys.total_mass();
}

Configuration potential_partials(const MassSystem& sys,
                                 const Configuration& x) {
  check_shape(sys, x);
  const double tol = collision_tolerance(sys, x);
  const long n = x.rows();
  Configuration g = Configuration::Zero(n, x.cols());
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const Eigen::RowVectorXd rij = x.row(i) - x.row(j);
      const double r = rij.norm();
      if (r < tol)
        throw CollisionError("potential gradient at a collision of bodies " +
                             std::to_string(i) + "," + std::to_string(j));
      const Eigen::RowVectorXd f = sys.mass(i) * sys.mass(j) / (r * r * r) * rij;
      g.row(i) -= f;  // dU/dr_i = -m_i m_j r_ij / r^3
      g.row(j) += f;
    }
  }
  return g;
}

Configuration grad_potential(const MassSystem& sys, const Configuration& x) {
  Configuration g = potential_partials(sys, x);
  g.array().colwise() /= sys.masses().array();
  return g;
}

PolarDecomposition polar_decompose(const MassSystem& sys,
                                   const Configuration& x) {
  const double inertia = moment_of_inertia(sys, x);
  if (!(inertia > 0.0))
    throw std::invalid_argument("polar_decompose: total collision at origin");
  const double rho = std::sqrt(inertia);
  return {rho, x / rho};
}

double body_max_distance(const Configuration& x, const Configuration& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DimensionMismatch("body_max_distance: shape mismatch");
  return (x - y).rowwise().norm().maxCoeff();
}

double body_max_norm(const Configuration& x) {
  return x.rowwise().norm().maxCoeff();
}

}  // namespace ftm
