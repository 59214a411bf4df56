#include "ftm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftm {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*: weights of the embedded error estimate
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
constexpr double e4 = 125.0 / 192 - 393.0 / 640;
constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
constexpr double e7 = -1.0 / 40;

struct State {
  Configuration x;
  Configuration v;
};

struct Deriv {
  Configuration dx;
  Configuration dv;
};

Deriv rhs(const MassSystem& sys, const State& s) {
  return {s.v, grad_potential(sys, s.x)};
}

State advance(const State& s, double h, const Deriv& k, double w) {
  return {s.x + (h * w) * k.dx, s.v + (h * w) * k.dv};
}

double error_norm(const State& y, const State& y_new, const Configuration& ex,
                  const Configuration& ev, double atol, double rtol) {
  double acc = 0.0;
  long count = 0;
  auto add = [&](const Configuration& e, const Configuration& a,
                 const Configuration& b) {
    for (long i = 0; i < e.rows(); ++i)
      for (long j = 0; j < e.cols(); ++j) {
        const double scale =
            atol + rtol * std::max(std::abs(a(i, j)), std::abs(b(i, j)));
        const double r = e(i, j) / scale;
        acc += r * r;
        ++count;
      }
  };
  add(ex, y.x, y_new.x);
  add(ev, y.v, y_new.v);
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace

Trajectory integrate_newton(const MassSystem& sys, const Configuration& x0,
                            const Configuration& v0, double t0, double t1,
                            const IntegratorOptions& opts) {
  check_shape(sys, x0);
  check_shape(sys, v0);
  if (!(t1 > t0))
    throw std::invalid_argument("integrate_newton: need t1 > t0");
  if (opts.n_samples < 2)
    throw std::invalid_argument("integrate_newton: need at least 2 samples");
  if (has_collision(sys, x0))
    throw CollisionError("integrate_newton: initial configuration collides");

  const double rtol = opts.tol;
  const double atol = opts.tol * opts.abs_tol_factor;
  const double initial_sep = min_pair_separation(x0);
  const double collision_limit = opts.collision_factor * initial_sep;
  const Eigen::VectorXd grid =
      Eigen::VectorXd::LinSpaced(opts.n_samples, t0, t1);

  Trajectory traj;
  traj.positions.reserve(opts.n_samples);
  traj.velocities.reserve(opts.n_samples);
  traj.energy0 = kinetic(sys, v0) - potential(sys, x0);
  traj.min_separation = initial_sep;

  std::vector<double> sample_times;
  sample_times.reserve(opts.n_samples);
  auto record = [&](double t, const State& s) {
    sample_times.push_back(t);
    traj.positions.push_back(s.x);
    traj.velocities.push_back(s.v);
    const double h_now = kinetic(sys, s.v) - potential(sys, s.x);
    traj.max_energy_drift =
        std::max(traj.max_energy_drift, std::abs(h_now - traj.energy0));
  };

  State y{x0, v0};
  double t = t0;
  record(t, y);

  Deriv k1 = rhs(sys, y);  // FSAL
  double h = (t1 - t0) / (10.0 * (opts.n_samples - 1));
  int next_sample = 1;
  bool collision = false;

  while (next_sample < opts.n_samples && !collision) {
    const double target = grid(next_sample);
    bool hit_target = false;
    double h_step = h;
    if (t + h_step >= target - 1e-14 * (t1 - t0)) {
      h_step = target - t;
      hit_target = true;
    }

    double err = std::numeric_limits<double>::infinity();
    State y_new;
    double sep_new = 0.0;
    Deriv k7;
    bool stage_collision = false;
    try {
      const double hs = h_step;
      const State s2 = advance(y, hs, k1, a21);
      const Deriv k2 = rhs(sys, s2);
      State s3{y.x + hs * (a31 * k1.dx + a32 * k2.dx),
               y.v + hs * (a31 * k1.dv + a32 * k2.dv)};
      const Deriv k3 = rhs(sys, s3);
      State s4{y.x + hs * (a41 * k1.dx + a42 * k2.dx + a43 * k3.dx),
               y.v + hs * (a41 * k1.dv + a42 * k2.dv + a43 * k3.dv)};
      const Deriv k4 = rhs(sys, s4);
      State s5{
          y.x + hs * (a51 * k1.dx + a52 * k2.dx + a53 * k3.dx + a54 * k4.dx),
          y.v + hs * (a51 * k1.dv + a52 * k2.dv + a53 * k3.dv + a54 * k4.dv)};
      const Deriv k5 = rhs(sys, s5);
      State s6{y.x + hs * (a61 * k1.dx + a62 * k2.dx + a63 * k3.dx +
                           a64 * k4.dx + a65 * k5.dx),
               y.v + hs * (a61 * k1.dv + a62 * k2.dv + a63 * k3.dv +
                           a64 * k4.dv + a65 * k5.dv)};
      const Deriv k6 = rhs(sys, s6);
      y_new = {y.x + hs * (b1 * k1.dx + b3 * k3.dx + b4 * k4.dx + b5 * k5.dx +
                           b6 * k6.dx),
               y.v + hs * (b1 * k1.dv + b3 * k3.dv + b4 * k4.dv + b5 * k5.dv +
                           b6 * k6.dv)};
      sep_new = min_pair_separation(y_new.x);
      if (sep_new < collision_limit) {
        traj.min_separation = std::min(traj.min_separation, sep_new);
        collision = true;
        break;
      }
      k7 = rhs(sys, y_new);
      const Configuration err_x =
          hs * (e1 * k1.dx + e3 * k3.dx + e4 * k4.dx + e5 * k5.dx +
                e6 * k6.dx + e7 * k7.dx);
      const Configuration err_v =
          hs * (e1 * k1.dv + e3 * k3.dv + e4 * k4.dv + e5 * k5.dv +
                e6 * k6.dv + e7 * k7.dv);
      err = error_norm(y, y_new, err_x, err_v, atol, rtol);
    } catch (const CollisionError&) {
      stage_collision = true;  // a stage sampled inside the collision zone
    }

    if (!stage_collision && std::isfinite(err) && err <= 1.0) {
      t = hit_target ? target : t + h_step;
      y = std::move(y_new);
      k1 = k7;
      traj.min_separation = std::min(traj.min_separation, sep_new);
      if (hit_target) {
        record(t, y);
        ++next_sample;
      }
      const double grow = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::max(h, h_step) * std::clamp(grow, 0.2, 5.0);
    } else {
      const double shrink = (std::isfinite(err) && err > 0.0)
                                ? 0.9 * std::pow(err, -0.2)
                                : 0.2;
      h = h_step * std::clamp(shrink, 0.2, 0.9);
    }
    if (!(h > 1e-14 * (t1 - t0))) {
      collision = true;  // stepsize underflow: stiff close approach
      break;
    }
  }

  traj.termination =
      collision ? Termination::collision_approach : Termination::completed;
  traj.times = Eigen::Map<const Eigen::VectorXd>(
      sample_times.data(), static_cast<long>(sample_times.size()));
  return traj;
}

}  // namespace ftm
