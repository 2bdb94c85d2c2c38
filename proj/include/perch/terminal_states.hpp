#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "perch/dynamics.hpp"
#include "perch/error.hpp"
#include "perch/surface_predictor.hpp"

namespace perch {

/// Desired impact condition expressed in the surface frame.
struct PerchConditions {
  double tangential_velocity = 0.3;  // dV_Ys, m/s
  double normal_velocity = -0.5;     // dV_Zs, m/s, negative toward the surface
  double normal_offset = 0.2;        // l_Zs, m

  void validate() const {
    if (!std::isfinite(tangential_velocity) || !std::isfinite(normal_velocity) ||
        !std::isfinite(normal_offset) || normal_offset < 0.0) {
      throw PerchError(ErrorKind::kInvalidArgument, "perch conditions must be finite with l_Zs >= 0");
    }
  }
};

struct TerminalStates {
  double y = 0.0;
  double z = 0.0;
  double vy = 0.0;
  double vz = 0.0;
  double ay = 0.0;
  double az = 0.0;
};

/// Unit tangent and outward normal of a surface inclined by phi.
struct SurfaceFrame {
  double ty, tz;  // Y_s
  double ny, nz;  // Z_s

  explicit SurfaceFrame(double phi)
      : ty(std::cos(phi)), tz(std::sin(phi)), ny(-std::sin(phi)), nz(std::cos(phi)) {}
};

/// Terminal state at prediction time `t`: body Z aligned with the surface
/// normal at thrust m*g, the surface-frame relative velocity rotated into the
/// world, and the position standing off the surface point by l_Zs along the
/// normal.
inline TerminalStates get_terminal_states(const SurfacePrediction& p, double t,
                                          const PerchConditions& cond) {
  const SurfaceState s = predict(p, t);
  const double sphi = std::sin(s.phi);
  const double cphi = std::cos(s.phi);
  TerminalStates out;
  out.ay = -kGravity * sphi;
  out.az = -kGravity + kGravity * cphi;
  out.vy = s.vy + cond.tangential_velocity * cphi - cond.normal_velocity * sphi;
  out.vz = s.vz + cond.tangential_velocity * sphi + cond.normal_velocity * cphi;
  out.y = s.y - cond.normal_offset * sphi;
  out.z = s.z + cond.normal_offset * cphi;
  return out;
}

enum class SurfaceMotionDirection { kStatic, kForward, kBackward };

inline constexpr std::string_view to_string(SurfaceMotionDirection d) {
  switch (d) {
    case SurfaceMotionDirection::kStatic: return "static";
    case SurfaceMotionDirection::kForward: return "forward";
    case SurfaceMotionDirection::kBackward: return "backward";
  }
  return "unknown";
}

inline std::optional<SurfaceMotionDirection> parse_motion_direction(std::string_view s) {
  if (s == "static") return SurfaceMotionDirection::kStatic;
  if (s == "forward") return SurfaceMotionDirection::kForward;
  if (s == "backward") return SurfaceMotionDirection::kBackward;
  return std::nullopt;
}

/// Perch conditions keyed by surface motion and inclination. The shipped
/// defaults are the experimentally tuned values for the MD-Gripper platform.
class PerchConditionTable {
 public:
  struct Entry {
    SurfaceMotionDirection motion;
    double inclination_deg;
    PerchConditions conditions;
  };

  static PerchConditionTable defaults() {
    using M = SurfaceMotionDirection;
    PerchConditionTable t;
    t.entries_ = {
        {M::kStatic, 47.0, {0.3, -0.5, 0.2}},    {M::kStatic, 70.0, {0.3, -0.5, 0.25}},
        {M::kStatic, 90.0, {0.3, -0.5, 0.33}},   {M::kForward, 47.0, {0.3, -0.2, 0.07}},
        {M::kForward, 70.0, {0.3, -0.2, 0.23}},  {M::kForward, 90.0, {0.3, -0.1, 0.15}},
        {M::kBackward, 47.0, {0.3, -0.3, 0.1}},  {M::kBackward, 70.0, {0.3, -0.6, 0.19}},
        {M::kBackward, 90.0, {0.3, -0.6, 0.25}},
    };
    return t;
  }

  /// Table from CSV: header row, then motion,inclination_deg,dv_ys,dv_zs,l_zs.
  static PerchConditionTable from_csv(std::istream& in) {
    PerchConditionTable t;
    std::string line;
    std::getline(in, line);
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::vector<std::string> cols;
      for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
      const auto where = "perch table line " + std::to_string(line_no);
      if (cols.size() != 5) throw PerchError(ErrorKind::kConfig, where + ": expected 5 columns");
      const auto motion = parse_motion_direction(cols[0]);
      if (!motion) throw PerchError(ErrorKind::kConfig, where + ": unknown motion '" + cols[0] + "'");
      Entry e{*motion, 0.0, {}};
      try {
        e.inclination_deg = std::stod(cols[1]);
        e.conditions = {std::stod(cols[2]), std::stod(cols[3]), std::stod(cols[4])};
      } catch (const std::logic_error&) {
        throw PerchError(ErrorKind::kConfig, where + ": not a number");
      }
      e.conditions.validate();
      t.entries_.push_back(e);
    }
    return t;
  }

  static PerchConditionTable from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PerchError(ErrorKind::kConfig, "cannot open perch table " + path);
    return from_csv(in);
  }

  /// Exact match on motion and inclination (to 1e-6 degree).
  std::optional<PerchConditions> lookup(SurfaceMotionDirection motion, double inclination_deg) const {
    for (const auto& e : entries_) {
      if (e.motion == motion && std::abs(e.inclination_deg - inclination_deg) < 1e-6) {
        return e.conditions;
      }
    }
    return std::nullopt;
  }

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace perch
