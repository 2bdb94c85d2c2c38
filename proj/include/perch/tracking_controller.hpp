#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "perch/dynamics.hpp"
#include "perch/error.hpp"

namespace perch {

using Vec3 = std::array<double, 3>;  // x, y, z

struct ControllerGains {
  Vec3 kp{6.0, 6.0, 6.0};  // 1/s^2
  Vec3 kv{4.0, 4.0, 4.0};  // 1/s
  Vec3 ki{0.5, 0.5, 0.5};  // 1/s^3
  double handover_window = 0.1;  // s
  double integral_limit = 0.5;   // m s, per axis

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      if (kp[i] < 0.0 || kv[i] < 0.0 || ki[i] < 0.0) {
        throw PerchError(ErrorKind::kInvalidArgument, "controller gains must be non-negative");
      }
    }
    if (!(handover_window > 0.0) || !(integral_limit >= 0.0)) {
      throw PerchError(ErrorKind::kInvalidArgument,
                       "handover window must be positive and integral limit non-negative");
    }
  }
};

struct ReferencePoint {
  Vec3 pos{};
  Vec3 vel{};
  Vec3 acc{};
};

struct TrackedState {
  Vec3 pos{};
  Vec3 vel{};
};

struct AccelerationCommand {
  Vec3 acc{};
  Vec3 feedforward_gain{1.0, 1.0, 1.0};
  bool handover = false;  // inside the terminal feedforward-only window
};

/// Variable feedforward gain: 1 / (1 + |kp e_p + kv e_v| / (|a_ref| + 0.5)).
inline double feedforward_gain(double kp, double kv, double pos_error, double vel_error,
                               double ref_acc) {
  return 1.0 / (1.0 + std::abs(kp * pos_error + kv * vel_error) / (std::abs(ref_acc) + 0.5));
}

/// Position-velocity-integral tracking with a variable acceleration
/// feedforward. Inside the last `handover_window` seconds of the reference
/// the command is the reference acceleration verbatim.
class TrackingController {
 public:
  explicit TrackingController(ControllerGains gains = {}) : gains_(gains) { gains_.validate(); }

  void reset() { integral_ = {}; }
  const ControllerGains& gains() const { return gains_; }
  const Vec3& integral() const { return integral_; }

  /// `t` is time since the reference started, `horizon` its length, and `dt`
  /// the time since the previous call (integrator step).
  AccelerationCommand command_acceleration(const ReferencePoint& ref, const TrackedState& actual,
                                           double t, double horizon, double dt) {
    AccelerationCommand out;
    if (t > horizon - gains_.handover_window) {
      out.acc = ref.acc;
      out.handover = true;
      return out;
    }
    for (int i = 0; i < 3; ++i) {
      const double ep = ref.pos[i] - actual.pos[i];
      const double ev = ref.vel[i] - actual.vel[i];
      integral_[i] = std::clamp(integral_[i] + ep * dt, -gains_.integral_limit, gains_.integral_limit);
      const double ka = feedforward_gain(gains_.kp[i], gains_.kv[i], ep, ev, ref.acc[i]);
      out.feedforward_gain[i] = ka;
      out.acc[i] = gains_.kp[i] * ep + gains_.kv[i] * ev + gains_.ki[i] * integral_[i] + ka * ref.acc[i];
    }
    return out;
  }

 private:
  ControllerGains gains_;
  Vec3 integral_{};
};

struct AttitudeThrustCmd {
  double thrust = 0.0;  // N
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Body Z axis for roll-then-pitch composition with zero yaw.
inline Vec3 body_z_axis(double roll, double pitch) {
  return {std::cos(roll) * std::sin(pitch), -std::sin(roll), std::cos(roll) * std::cos(pitch)};
}

/// Converts a commanded acceleration into collective thrust and attitude.
inline AttitudeThrustCmd acceleration_to_attitude_thrust(const Vec3& acc, double mass) {
  const double ax = acc[0];
  const double ay = acc[1];
  const double az = acc[2] + 9.8;
  const double norm = std::sqrt(ax * ax + ay * ay + az * az);
  if (norm == 0.0) {
    throw PerchError(ErrorKind::kFreeFallSingularity, "commanded acceleration equals -g");
  }
  AttitudeThrustCmd cmd;
  cmd.roll = -std::asin(std::clamp(ay / norm, -1.0, 1.0));
  cmd.pitch = std::atan2(ax, az);
  cmd.yaw = 0.0;
  const Vec3 zq = body_z_axis(cmd.roll, cmd.pitch);
  cmd.thrust = mass * (ax * zq[0] + ay * zq[1] + az * zq[2]);
  return cmd;
}

/// Acceleration produced by a thrust/attitude pair, (f/m) Z_q - g e3.
inline Vec3 attitude_thrust_to_acceleration(const AttitudeThrustCmd& cmd, double mass) {
  const Vec3 zq = body_z_axis(cmd.roll, cmd.pitch);
  return {cmd.thrust / mass * zq[0], cmd.thrust / mass * zq[1], cmd.thrust / mass * zq[2] - 9.8};
}

/// Roll setpoint with optional rate and acceleration feedforward. Between
/// control ticks the setpoint is extrapolated with the feedforward terms.
struct RollSetpoint {
  double roll = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// Inner roll loop standing in for the autopilot's attitude controller:
///   phi'' = ff_accel + kp (phi_set - phi) + kd (rate_set - phi')
///   F1 - F2 = (J / d_s) phi''
/// with each lift clamped to [0, max_lift]. With `feedforward` off the
/// setpoint rate and acceleration are ignored, leaving the plain PD law
/// F1 - F2 = (J / d_s)(kp (phi_c - phi) - kd phi').
struct AttitudeLoop {
  double kp = 300.0;  // 1/s^2
  double kd = 35.0;   // 1/s
  bool feedforward = true;

  RotorCommand lifts(double thrust, const RollSetpoint& sp, double since_setpoint,
                     const QuadState& s, const QuadParams& p) const {
    double roll = sp.roll;
    double rate = 0.0;
    double accel = 0.0;
    if (feedforward) {
      const double h = since_setpoint;
      roll += sp.rate * h + 0.5 * sp.accel * h * h;
      rate = sp.rate + sp.accel * h;
      accel = sp.accel;
    }
    const double diff = p.inertia / p.arm * (accel + kp * (roll - s.phi) + kd * (rate - s.dphi));
    return {std::clamp(0.5 * (thrust + diff), 0.0, p.max_lift),
            std::clamp(0.5 * (thrust - diff), 0.0, p.max_lift)};
  }

  RotorCommand lifts(double thrust, double roll_cmd, const QuadState& s, const QuadParams& p) const {
    return lifts(thrust, RollSetpoint{roll_cmd, 0.0, 0.0}, 0.0, s, p);
  }
};

}  // namespace perch
