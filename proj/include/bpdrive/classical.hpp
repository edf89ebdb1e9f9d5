#pragma once
//
// Image classical Hamiltonian H(x, p, t') = -J' cos p - B' x sin t' of the
// driven lattice (sites -> x, quasimomentum -> p) and the closed-form drift
// velocities of magnons and bound pairs.
//
#include "bpdrive/bessel.hpp"
#include "bpdrive/model.hpp"

#include <vector>

namespace bpdrive {

struct ClassicalState {
  double x = 0.0;
  double p = 0.0;
};

struct ClassicalSample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
};

using ClassicalTrajectory = std::vector<ClassicalSample>;

/// p mapped into (-pi, pi].
inline double fold_momentum(double p) {
  double q = std::remainder(p, two_pi);
  if (q <= -pi) q += two_pi;
  return q;
}

/// Leapfrog integration of x' = J' sin p, p' = B' sin t'.
///
/// The force does not depend on x, so each kick is integrated exactly and p(t')
/// is evaluated in closed form, p0 + B'(1 - cos t'); the drift uses the momentum
/// at the half step. `dt` must divide 2 pi.
inline ClassicalTrajectory integrate_image(double J_prime, double B_prime, ClassicalState start,
                                           int periods, double dt = two_pi / 1000.0) {
  if (!(dt > 0.0) || dt > two_pi / 1000.0 * (1.0 + 1e-12))
    throw ModelError("integrate_image requires 0 < dt <= 2 pi / 1000");
  const long steps = std::lround(two_pi / dt);
  if (std::fabs(two_pi / dt - static_cast<double>(steps)) > 1e-6 * steps)
    throw ModelError("integrate_image requires dt to divide 2 pi");
  const double h = two_pi / static_cast<double>(steps);
  auto momentum = [&](double t) { return start.p + B_prime * (1.0 - std::cos(t)); };

  ClassicalTrajectory traj;
  traj.reserve(static_cast<std::size_t>(steps * periods + 1));
  double x = start.x;
  traj.push_back({0.0, x, start.p});
  for (long k = 0; k < steps * periods; ++k) {
    const double t = static_cast<double>(k) * h;
    x += h * J_prime * std::sin(momentum(t + 0.5 * h));
    const double t1 = static_cast<double>(k + 1) * h;
    traj.push_back({t1, x, momentum(t1)});
  }
  return traj;
}

/// Magnon drift velocity J' J0(B') sin(p0 + B'); one period moves 2 pi times this.
inline double magnon_velocity(double J_prime, double B_prime, double p0) {
  return J_prime * bessel_j0(B_prime) * std::sin(p0 + B_prime);
}

/// Bound-pair drift velocity (J'/2 Delta) J0(2B') sin(p0 + 2B').
inline double bound_velocity(double J_prime, double Delta, double B_prime, double p0) {
  if (Delta == 0.0) throw ModelError("bound_velocity requires Delta > 0");
  return J_prime / (2.0 * Delta) * bessel_j0(2.0 * B_prime) * std::sin(p0 + 2.0 * B_prime);
}

struct VelocityRow {
  double B_prime = 0.0;
  double v_magnon = 0.0;
  double v_bound = 0.0;
};

inline std::vector<VelocityRow> velocity_curve(double J_prime, double Delta, const std::vector<double>& B_grid,
                                               double p0) {
  std::vector<VelocityRow> rows;
  rows.reserve(B_grid.size());
  for (double b : B_grid)
    rows.push_back({b, magnon_velocity(J_prime, b, p0), bound_velocity(J_prime, Delta, b, p0)});
  return rows;
}

}  // namespace bpdrive
