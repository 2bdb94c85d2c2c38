#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "perch/error.hpp"

namespace perch {

inline constexpr double kGravity = 9.8;

/// Planar vehicle parameters. Defaults describe the 0.945 kg perching
/// platform; the roll inertia is not published and is configuration.
struct QuadParams {
  double mass = 0.945;     // kg
  double inertia = 0.01;   // roll moment of inertia, kg m^2
  double arm = 0.0792;     // rotor-pair arm length d_s, m
  double max_lift = 0.945 * kGravity;  // per rotor pair, N

  void validate() const {
    if (!(mass > 0.0) || !(inertia > 0.0) || !(arm > 0.0) || !(max_lift > 0.0)) {
      throw PerchError(ErrorKind::kInvalidArgument,
                       "quad parameters must be positive (mass, inertia, arm, max_lift)");
    }
  }
};

/// Planar state in the sagittal plane. Also used for its own time derivative,
/// in which case each field holds the rate of the corresponding state field.
struct QuadState {
  double y = 0.0;
  double z = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double phi = 0.0;
  double dphi = 0.0;

  bool finite() const {
    return std::isfinite(y) && std::isfinite(z) && std::isfinite(dy) && std::isfinite(dz) &&
           std::isfinite(phi) && std::isfinite(dphi);
  }

  friend QuadState operator+(const QuadState& a, const QuadState& b) {
    return {a.y + b.y, a.z + b.z, a.dy + b.dy, a.dz + b.dz, a.phi + b.phi, a.dphi + b.dphi};
  }
  friend QuadState operator*(double k, const QuadState& a) {
    return {k * a.y, k * a.z, k * a.dy, k * a.dz, k * a.phi, k * a.dphi};
  }
};

/// Lifts of the two rotor pairs.
struct RotorCommand {
  double f1 = 0.0;
  double f2 = 0.0;

  double total() const { return f1 + f2; }
  bool feasible(double max_lift) const {
    return f1 >= 0.0 && f2 >= 0.0 && f1 <= max_lift && f2 <= max_lift;
  }
};

/// Planar equations of motion. Returns the state rate.
inline QuadState derivative(const QuadState& s, const RotorCommand& cmd, const QuadParams& p) {
  const double thrust = cmd.f1 + cmd.f2;
  return {s.dy,
          s.dz,
          -thrust * std::sin(s.phi) / p.mass,
          thrust * std::cos(s.phi) / p.mass - kGravity,
          s.dphi,
          (cmd.f1 - cmd.f2) * p.arm / p.inertia};
}

/// One classical Runge-Kutta step. `command(t)` is queried at the stage times.
template <typename CommandFn>
QuadState rk4_step(const QuadState& s, CommandFn&& command, double t, double dt,
                   const QuadParams& p) {
  const RotorCommand c0 = command(t);
  const RotorCommand ch = command(t + 0.5 * dt);
  const RotorCommand c1 = command(t + dt);
  const QuadState k1 = derivative(s, c0, p);
  const QuadState k2 = derivative(s + (0.5 * dt) * k1, ch, p);
  const QuadState k3 = derivative(s + (0.5 * dt) * k2, ch, p);
  const QuadState k4 = derivative(s + dt * k3, c1, p);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step integration over [0, horizon]. Returns the sampled states,
/// starting with `initial`. The final step is shortened to land on `horizon`.
template <typename CommandFn>
std::vector<QuadState> integrate(const QuadState& initial, CommandFn&& command,
                                 const QuadParams& p, double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon >= dt)) {
    throw PerchError(ErrorKind::kInvalidArgument, "integrate requires dt > 0 and horizon >= dt");
  }
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  std::vector<QuadState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(initial);
  QuadState s = initial;
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double h = std::min(dt, horizon - t);
    s = rk4_step(s, command, t, h, p);
    if (!s.finite()) {
      throw PerchError(ErrorKind::kIntegrationDiverged,
                       "non-finite state at t=" + std::to_string(t + h));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace perch
