#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>

#include "perch/error.hpp"

namespace perch {

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Self-sealing cup and wheel geometry. The trigger-cup dimensions and the
/// stiffness are not measured for the built gripper; defaults are nominal.
struct GripperGeometry {
  double holder_radius = 0.0062;   // r_h
  double seal_radius = 0.0060;     // r_s
  double trigger_radius = 0.0080;  // R
  double neck_radius = 0.0030;     // r
  double fulcrum_height = 0.0040;  // h_c
  double stiffness = 0.002;        // k, N m per rad-equivalent
  double wheel_radius = 0.0657;    // r_w
  double cup_angle = deg2rad(30.0);  // alpha_w
  double open_gap = 0.001;         // delta threshold for "open"
  double mount_offset = 0.0859;    // wheel pivot distance below the body centre

  void validate() const {
    if (!(holder_radius > 0.0) || !(seal_radius > 0.0) || !(trigger_radius > 0.0) ||
        !(neck_radius > 0.0) || !(fulcrum_height > 0.0) || !(stiffness > 0.0) ||
        !(wheel_radius > 0.0) || !(open_gap > 0.0) || !(mount_offset >= 0.0)) {
      throw PerchError(ErrorKind::kInvalidArgument, "gripper lengths and stiffness must be positive");
    }
    if (!(trigger_radius > neck_radius)) {
      throw PerchError(ErrorKind::kInvalidArgument, "trigger cup radius must exceed neck radius");
    }
    if (!(cup_angle > 0.0)) throw PerchError(ErrorKind::kInvalidArgument, "cup angle must be positive");
  }
};

/// Normal force on the trigger cup producing gap `delta`.
inline double activation_force(const GripperGeometry& g, double delta) {
  return (delta + g.holder_radius - g.seal_radius) * g.stiffness /
         ((g.trigger_radius - g.neck_radius) * g.fulcrum_height);
}

/// Force at which the trigger cup counts as open.
inline double activation_force(const GripperGeometry& g) { return activation_force(g, g.open_gap); }

/// Torque about the cup centre. Friction helps when the cup direction and the
/// tangential velocity agree (n_c . v >= 0) and opposes otherwise.
inline double contact_torque(double normal_force, double normal_lever, double friction_force,
                             double friction_lever, double direction_dot_velocity) {
  if (direction_dot_velocity >= 0.0) return normal_force * normal_lever + friction_force * friction_lever;
  return normal_force * normal_lever - friction_force * friction_lever;
}

enum class CupPosition { kLower = -1, kCenter = 0, kUpper = 1 };

struct CupSelection {
  CupPosition cup = CupPosition::kCenter;
  double residual = 0.0;  // angle error left for the engaged cup, rad
};

/// The wheel rolls with the tangential velocity; among the cups whose
/// direction does not oppose the velocity, the one closest to the impact
/// angle error engages. Ties go to the rolling direction.
inline CupSelection select_cup(double tangential_velocity, double angle_error, double cup_angle) {
  const int rolling = tangential_velocity > 0.0 ? 1 : (tangential_velocity < 0.0 ? -1 : 0);
  // Candidates in preference order; a later one must be strictly better.
  const std::array<int, 3> order =
      rolling == 0 ? std::array<int, 3>{0, -1, 1} : std::array<int, 3>{rolling, 0, -rolling};
  CupSelection best;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int idx : order) {
    if (rolling != 0 && idx == -rolling) continue;  // would oppose the velocity
    const double residual = angle_error - idx * cup_angle;
    if (std::abs(residual) < best_abs - 1e-12) {
      best = {static_cast<CupPosition>(idx), residual};
      best_abs = std::abs(residual);
    }
  }
  return best;
}

/// Impact tolerances: attitude error interval and relative-velocity box.
struct PerchEnvelope {
  double phi_min = deg2rad(-19.5);
  double phi_max = deg2rad(31.6);
  double vt_min = -0.15;
  double vt_max = 1.0;
  double vn_min = -1.1;
  double vn_max = -0.05;

  static PerchEnvelope md_gripper() { return {}; }
  static PerchEnvelope conventional_cups() {
    return {deg2rad(-6.1), deg2rad(21.7), -0.05, 0.5, -0.8, -0.1};
  }

  void validate() const {
    if (!(phi_min < phi_max) || !(vt_min < vt_max) || !(vn_min < vn_max)) {
      throw PerchError(ErrorKind::kInvalidArgument, "envelope bounds need min < max");
    }
  }
};

enum class PerchFailure { kNone, kAngle, kVelocity, kNoContact, kDetached };

inline constexpr std::string_view to_string(PerchFailure f) {
  switch (f) {
    case PerchFailure::kNone: return "none";
    case PerchFailure::kAngle: return "A-failure";
    case PerchFailure::kVelocity: return "V-failure";
    case PerchFailure::kNoContact: return "no-contact";
    case PerchFailure::kDetached: return "detached";
  }
  return "unknown";
}

struct PerchVerdict {
  bool success = false;
  PerchFailure failure = PerchFailure::kNone;
};

/// Angle violations take precedence over velocity violations.
inline PerchVerdict judge_perch(double angle_error, double tangential_velocity,
                                double normal_velocity, const PerchEnvelope& env) {
  if (!(angle_error >= env.phi_min && angle_error <= env.phi_max)) {
    return {false, PerchFailure::kAngle};
  }
  if (!(tangential_velocity >= env.vt_min && tangential_velocity <= env.vt_max) ||
      !(normal_velocity >= env.vn_min && normal_velocity <= env.vn_max)) {
    return {false, PerchFailure::kVelocity};
  }
  return {true, PerchFailure::kNone};
}

struct AdhesionModel {
  double pressure = -61.5e3;   // P_G, Pa (gauge, negative)
  double cup_radius = 0.015;   // m
  double friction = 0.3;       // mu

  void validate() const {
    if (!(pressure < 0.0) || !(cup_radius > 0.0) || !(friction > 0.0 && friction <= 1.0)) {
      throw PerchError(ErrorKind::kInvalidArgument,
                       "adhesion needs negative pressure, positive radius, friction in (0, 1]");
    }
  }
};

struct AdhesionForces {
  double adhesion = 0.0;      // F_G, N
  double max_friction = 0.0;  // N
};

inline AdhesionForces adhesion_force(const AdhesionModel& a, int cups) {
  const double fg = -static_cast<double>(cups) * std::numbers::pi * a.cup_radius * a.cup_radius * a.pressure;
  return {fg, a.friction * fg};
}

}  // namespace perch
