#pragma once

#include <cmath>

#include "perch/error.hpp"

namespace perch {

/// Position/velocity/acceleration at both ends of a single flat-output axis.
struct AxisBoundary {
  double p0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
  double pT = 0.0;
  double vT = 0.0;
  double aT = 0.0;
};

struct AxisSample {
  double pos = 0.0;
  double vel = 0.0;
  double acc = 0.0;
  double jerk = 0.0;
  double snap = 0.0;
};

/// Minimum-jerk quintic for one axis, stored as the three costate constants
/// (c1, c2, c3) plus the initial state:
///
///   p(t) = c1/120 t^5 + c2/24 t^4 + c3/6 t^3 + a0/2 t^2 + v0 t + p0
///
/// The jerk is c1/2 t^2 + c2 t + c3, so snap is c1 t + c2.
struct AxisTrajectory {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double p0 = 0.0;
  double v0 = 0.0;
  double a0 = 0.0;
  double horizon = 0.0;

  /// Evaluates without the domain check; used on hot paths that already
  /// guarantee 0 <= t <= horizon.
  AxisSample at(double t) const {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double t5 = t4 * t;
    AxisSample s;
    s.pos = c1 / 120.0 * t5 + c2 / 24.0 * t4 + c3 / 6.0 * t3 + 0.5 * a0 * t2 + v0 * t + p0;
    s.vel = c1 / 24.0 * t4 + c2 / 6.0 * t3 + 0.5 * c3 * t2 + a0 * t + v0;
    s.acc = c1 / 6.0 * t3 + 0.5 * c2 * t2 + c3 * t + a0;
    s.jerk = 0.5 * c1 * t2 + c2 * t + c3;
    s.snap = c1 * t + c2;
    return s;
  }
};

/// Closed-form minimum-jerk solution for horizon T.
inline AxisTrajectory solve_axis(const AxisBoundary& b, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw PerchError(ErrorKind::kInvalidHorizon, "horizon must be positive, got " + std::to_string(T));
  }
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double T4 = T3 * T;
  const double T5 = T4 * T;

  const double d_acc = b.aT - b.a0;
  const double d_vel = b.vT - b.v0 - b.a0 * T;
  const double d_pos = b.pT - b.p0 - b.v0 * T - 0.5 * b.a0 * T2;

  AxisTrajectory traj;
  traj.c1 = (60.0 * T2 * d_acc - 360.0 * T * d_vel + 720.0 * d_pos) / T5;
  traj.c2 = (-24.0 * T3 * d_acc + 168.0 * T2 * d_vel - 360.0 * T * d_pos) / T5;
  traj.c3 = (3.0 * T4 * d_acc - 24.0 * T3 * d_vel + 60.0 * T2 * d_pos) / T5;
  traj.p0 = b.p0;
  traj.v0 = b.v0;
  traj.a0 = b.a0;
  traj.horizon = T;

  if (!std::isfinite(traj.c1) || !std::isfinite(traj.c2) || !std::isfinite(traj.c3)) {
    throw PerchError(ErrorKind::kNumericallyUnstable,
                     "coefficients overflow at horizon " + std::to_string(T));
  }
  return traj;
}

inline AxisSample eval(const AxisTrajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.horizon)) {
    throw PerchError(ErrorKind::kOutOfDomain, "t=" + std::to_string(t) + " outside [0, " +
                                                  std::to_string(traj.horizon) + "]");
  }
  return traj.at(t);
}

/// Integral of squared jerk over [0, horizon], exact for the quadratic jerk.
inline double jerk_cost(const AxisTrajectory& traj) {
  // j(t) = a t^2 + b t + c
  const double a = 0.5 * traj.c1;
  const double b = traj.c2;
  const double c = traj.c3;
  const double T = traj.horizon;
  const double T2 = T * T;
  const double T3 = T2 * T;
  return a * a * T3 * T2 / 5.0 + a * b * T2 * T2 / 2.0 + (b * b + 2.0 * a * c) * T3 / 3.0 +
         b * c * T2 + c * c * T;
}

}  // namespace perch
