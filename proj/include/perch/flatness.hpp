#pragma once

#include <cmath>
#include <string_view>

#include "perch/dynamics.hpp"
#include "perch/error.hpp"
#include "perch/minjerk.hpp"

namespace perch {

/// Second to fourth derivatives of the flat outputs (y, z) at one instant.
struct FlatOutputs {
  double acc_y = 0.0;
  double acc_z = 0.0;
  double jerk_y = 0.0;
  double jerk_z = 0.0;
  double snap_y = 0.0;
  double snap_z = 0.0;
};

inline FlatOutputs flat_outputs(const AxisSample& y, const AxisSample& z) {
  return {y.acc, z.acc, y.jerk, z.jerk, y.snap, z.snap};
}

namespace detail {

inline void require_regular(double lifted_z, double acc_y) {
  if (lifted_z == 0.0 && acc_y == 0.0) {
    throw PerchError(ErrorKind::kFreeFallSingularity, "z'' + g and y'' are both zero");
  }
}

}  // namespace detail

/// Roll angle from the flat outputs, phi = -atan2(y'', z'' + g). Agrees with
/// the single-argument form whenever z'' + g > 0.
inline double flat_to_attitude(const FlatOutputs& f) {
  const double w = f.acc_z + kGravity;
  detail::require_regular(w, f.acc_y);
  return -std::atan2(f.acc_y, w);
}

/// Roll rate, the time derivative of flat_to_attitude.
inline double flat_to_roll_rate(const FlatOutputs& f) {
  const double w = f.acc_z + kGravity;
  detail::require_regular(w, f.acc_y);
  return -(f.jerk_y * w - f.acc_y * f.jerk_z) / (w * w + f.acc_y * f.acc_y);
}

/// Roll acceleration. Expanded analytically:
///   N = y''' w - y'' z''',  D = w^2 + y''^2,  w = z'' + g
///   N' = y'''' w - y'' z'''',  D' = 2 (w z''' + y'' y''')
///   phi'' = -(N' D - N D') / D^2
inline double flat_to_roll_accel(const FlatOutputs& f) {
  const double w = f.acc_z + kGravity;
  detail::require_regular(w, f.acc_y);
  const double num = f.jerk_y * w - f.acc_y * f.jerk_z;
  const double den = w * w + f.acc_y * f.acc_y;
  const double num_dot = f.snap_y * w - f.acc_y * f.snap_z;
  const double den_dot = 2.0 * (w * f.jerk_z + f.acc_y * f.jerk_y);
  return -(num_dot * den - num * den_dot) / (den * den);
}

inline RotorCommand flat_to_lifts(const FlatOutputs& f, const QuadParams& p) {
  const double w = f.acc_z + kGravity;
  detail::require_regular(w, f.acc_y);
  const double sum = p.mass * std::sqrt(w * w + f.acc_y * f.acc_y);
  const double diff = flat_to_roll_accel(f) * p.inertia / p.arm;
  return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

/// State and input bounds checked by uniform sampling.
struct Constraints {
  double z_min = 0.1;
  double z_max = 4.0;
  double v_min = -5.0;
  double v_max = 5.0;
  double max_lift = 0.945 * kGravity;
  int samples = 50;

  void validate() const {
    if (!(z_min < z_max) || !(v_min < v_max) || !(max_lift > 0.0) || samples < 2) {
      throw PerchError(ErrorKind::kInvalidArgument,
                       "constraints need z_min < z_max, v_min < v_max, max_lift > 0, samples >= 2");
    }
  }
};

enum class Violation { kNone, kAltitude, kVelocity, kLift };

inline constexpr std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kAltitude: return "altitude";
    case Violation::kVelocity: return "velocity";
    case Violation::kLift: return "lift";
  }
  return "unknown";
}

struct Feasibility {
  bool feasible = true;
  Violation kind = Violation::kNone;
  double time = 0.0;  // instant of the earliest violation

  explicit operator bool() const { return feasible; }
};

/// Samples z, y', z', F1 and F2 at `samples` uniform instants on [0, T]
/// (both ends included) and reports the earliest violation. Bounds are
/// closed intervals. A free-fall singularity counts as a lift violation.
inline Feasibility check_feasible(const AxisTrajectory& traj_y, const AxisTrajectory& traj_z,
                                  const Constraints& c, const QuadParams& params) {
  if (traj_y.horizon != traj_z.horizon) {
    throw PerchError(ErrorKind::kInvalidArgument, "axis trajectories must share one horizon");
  }
  const double T = traj_y.horizon;
  const int n = c.samples;
  for (int i = 0; i < n; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(n - 1);
    const AxisSample y = traj_y.at(t);
    const AxisSample z = traj_z.at(t);
    if (!(z.pos >= c.z_min && z.pos <= c.z_max)) return {false, Violation::kAltitude, t};
    if (!(y.vel >= c.v_min && y.vel <= c.v_max) || !(z.vel >= c.v_min && z.vel <= c.v_max)) {
      return {false, Violation::kVelocity, t};
    }
    const FlatOutputs f = flat_outputs(y, z);
    if (f.acc_z + kGravity == 0.0 && f.acc_y == 0.0) return {false, Violation::kLift, t};
    const RotorCommand lifts = flat_to_lifts(f, params);
    if (!(lifts.f1 >= 0.0 && lifts.f1 <= c.max_lift && lifts.f2 >= 0.0 &&
          lifts.f2 <= c.max_lift)) {
      return {false, Violation::kLift, t};
    }
  }
  return {};
}

}  // namespace perch
