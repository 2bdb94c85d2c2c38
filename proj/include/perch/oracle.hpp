#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "perch/dynamics.hpp"
#include "perch/flatness.hpp"
#include "perch/minjerk.hpp"
#include "perch/terminal_states.hpp"
#include "perch/time_search.hpp"

namespace perch::oracle {

/// Quintic Hermite interpolant built from the six basis polynomials on the
/// normalised interval s = t / T. Shares nothing with the costate solution
/// in minjerk.hpp, so it serves as an independent reference.
class HermiteQuintic {
 public:
  HermiteQuintic(const AxisBoundary& b, double T) : b_(b), T_(T) {}

  double horizon() const { return T_; }

  double position(double t) const {
    const double s = t / T_;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    const double h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    const double h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    const double h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    const double h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    const double h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    return h0 * b_.p0 + h1 * T_ * b_.v0 + h2 * T_ * T_ * b_.a0 + h3 * T_ * T_ * b_.aT +
           h4 * T_ * b_.vT + h5 * b_.pT;
  }

 private:
  AxisBoundary b_;
  double T_;
};

/// Smallest horizon in [lo, hi] on a uniform `step` grid that passes the
/// feasibility test, or nullopt.
inline std::optional<double> brute_force_min_horizon(const PlanningProblem& pb, double lo, double hi,
                                                     double step = 1e-3) {
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double T = lo + static_cast<double>(k) * step;
    if (feasible_at(pb, T)) return T;
  }
  return std::nullopt;
}

/// Largest horizon gap reported by the brute-force scan against `found`:
/// positive when the scan finds something earlier.
inline double minimality_gap(const PlanningProblem& pb, double t_last, double found,
                             double step = 1e-3) {
  const auto best = brute_force_min_horizon(pb, 0.5 * t_last, 1.5 * t_last, step);
  if (!best) return 0.0;
  return found - *best;
}

struct RoundTrip {
  double max_position_error = 0.0;  // m
  double max_roll_error = 0.0;      // rad
};

/// Drives the planar dynamics with the flatness lifts of a trajectory pair,
/// starting from the state it encodes, and compares against the flat outputs.
inline RoundTrip flatness_round_trip(const TrajectoryPair& pair, const QuadParams& p, double dt) {
  const double T = pair.horizon();
  auto command = [&](double t) {
    const double s = std::clamp(t, 0.0, T);
    return flat_to_lifts(flat_outputs(pair.y.at(s), pair.z.at(s)), p);
  };
  const AxisSample y0 = pair.y.at(0.0);
  const AxisSample z0 = pair.z.at(0.0);
  const FlatOutputs f0 = flat_outputs(y0, z0);
  const QuadState start{y0.pos, z0.pos, y0.vel, z0.vel, flat_to_attitude(f0), flat_to_roll_rate(f0)};
  const std::vector<QuadState> states = integrate(start, command, p, dt, T);

  RoundTrip out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double t = std::min(T, static_cast<double>(i) * dt);
    const AxisSample y = pair.y.at(t);
    const AxisSample z = pair.z.at(t);
    out.max_position_error =
        std::max(out.max_position_error, std::hypot(states[i].y - y.pos, states[i].z - z.pos));
    out.max_roll_error = std::max(out.max_roll_error,
                                  std::abs(states[i].phi - flat_to_attitude(flat_outputs(y, z))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random case generators and the three cross-check suites.

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline AxisBoundary random_boundary(std::mt19937_64& rng) {
  return {uniform(rng, -3.0, 3.0), uniform(rng, -2.0, 2.0), uniform(rng, -5.0, 5.0),
          uniform(rng, -3.0, 3.0), uniform(rng, -2.0, 2.0), uniform(rng, -5.0, 5.0)};
}

/// Pair of min-jerk axes between hover-like states that passes the default
/// constraint check, with horizon at most `max_horizon`.
inline TrajectoryPair random_feasible_pair(std::mt19937_64& rng, const QuadParams& p,
                                           double max_horizon = 2.0) {
  const Constraints c;
  for (;;) {
    const double T = uniform(rng, 0.6, max_horizon);
    const AxisBoundary by{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -2.0, 2.0),
                          uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -2.0, 2.0)};
    const AxisBoundary bz{uniform(rng, 1.0, 2.0), uniform(rng, -1.0, 1.0), uniform(rng, -2.0, 2.0),
                          uniform(rng, 1.0, 2.0), uniform(rng, -1.0, 1.0), uniform(rng, -2.0, 2.0)};
    TrajectoryPair pair{solve_axis(by, T), solve_axis(bz, T)};
    if (check_feasible(pair.y, pair.z, c, p).feasible) return pair;
  }
}

/// Perching problem with a random start, surface pose and motion. The
/// inclination is drawn from [0, 90] degrees and the perch conditions from
/// the table row of the nearest tabulated inclination.
inline PlanningProblem random_problem(std::mt19937_64& rng) {
  PlanningProblem pb;
  pb.start = {uniform(rng, -2.0, -0.8), uniform(rng, -0.5, 0.5), 0.0,
              uniform(rng, 1.0, 2.0),   uniform(rng, -0.3, 0.3), 0.0};
  const double deg = uniform(rng, 0.0, 90.0);
  const double moving = uniform(rng, 0.0, 1.0);
  const SurfaceMotionDirection dir = moving < 0.4   ? SurfaceMotionDirection::kStatic
                                     : moving < 0.7 ? SurfaceMotionDirection::kForward
                                                    : SurfaceMotionDirection::kBackward;
  const double tab = deg < 58.5 ? 47.0 : (deg < 80.0 ? 70.0 : 90.0);
  pb.conditions = *PerchConditionTable::defaults().lookup(dir, tab);
  pb.surface.t_ref = 0.0;
  pb.surface.y = uniform(rng, -0.2, 0.2);
  pb.surface.z = uniform(rng, 0.8, 1.2);
  const double speed = uniform(rng, 0.3, 1.2);
  pb.surface.vy = dir == SurfaceMotionDirection::kStatic ? 0.0
                  : dir == SurfaceMotionDirection::kForward ? speed
                                                            : -speed;
  pb.surface.phi = deg * std::numbers::pi / 180.0;
  pb.constraints.max_lift = 0.78 * pb.params.max_lift;
  return pb;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct SuiteReport {
  std::string name;
  bool pass = false;
  int cases = 0;
  double worst = 0.0;  // the suite's headline error measure
  std::string detail;
};

/// Closed form against the Hermite interpolant on `n` random instances:
/// position deviation on a 201-point grid and boundary reproduction.
inline SuiteReport minjerk_suite(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteReport r{"minjerk", true, n, 0.0, ""};
  double worst_boundary = 0.0;
  for (int i = 0; i < n; ++i) {
    const AxisBoundary b = random_boundary(rng);
    const double T = uniform(rng, 0.2, 5.0);
    const AxisTrajectory traj = solve_axis(b, T);
    const HermiteQuintic h(b, T);
    for (int k = 0; k <= 200; ++k) {
      const double t = T * k / 200.0;
      r.worst = std::max(r.worst, std::abs(traj.at(t).pos - h.position(t)));
    }
    const AxisSample e = traj.at(T);
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
    worst_boundary = std::max({worst_boundary, rel(e.pos, b.pT), rel(e.vel, b.vT), rel(e.acc, b.aT)});
  }
  r.pass = r.worst < 1e-6 && worst_boundary < 1e-9;
  r.detail = "max position deviation " + sci(r.worst) + " m, max boundary error " +
             sci(worst_boundary);
  return r;
}

/// Windowed minimum-time search against a 1 ms scan of the same window on `n` random problems.
inline SuiteReport timesearch_suite(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteReport r{"timesearch", true, 0, 0.0, ""};
  int infeasible = 0, missed = 0;
  ManualClock clock;
  const MinTimePlanner planner(clock);
  while (r.cases < n) {
    const PlanningProblem pb = random_problem(rng);
    SearchState s;
    try {
      s = planner.initialize(pb);
    } catch (const PerchError&) {
      continue;
    }
    s.t_last *= uniform(rng, 0.8, 1.4);
    const double t_last = s.t_last;
    ++r.cases;
    const PlanResult pr = planner.plan(s, pb);
    const auto best = brute_force_min_horizon(pb, 0.5 * t_last, 1.5 * t_last);
    if (pr.outcome != PlanOutcome::kFound) {
      if (best) ++missed;
      continue;
    }
    if (!check_feasible(pr.trajectories->y, pr.trajectories->z, pb.constraints, pb.params).feasible) {
      ++infeasible;
    }
    if (best) r.worst = std::max(r.worst, *pr.horizon - *best);
    else ++missed;
  }
  r.pass = r.worst <= 0.1 + 1e-9 && infeasible == 0 && missed == 0;
  r.detail = "max gap to scan " + sci(r.worst) + " s, infeasible returns " +
             std::to_string(infeasible) + ", disagreements on existence " + std::to_string(missed);
  return r;
}

/// Open-loop flatness round trip on `n` random feasible pairs.
inline SuiteReport flatness_suite(int n, std::uint64_t seed, double dt = 1e-4) {
  std::mt19937_64 rng(seed);
  const QuadParams p;
  SuiteReport r{"flatness", true, n, 0.0, ""};
  for (int i = 0; i < n; ++i) {
    const TrajectoryPair pair = random_feasible_pair(rng, p);
    r.worst = std::max(r.worst, flatness_round_trip(pair, p, dt).max_position_error);
  }
  r.pass = r.worst < 1e-4;
  r.detail = "max position error " + sci(r.worst) + " m";
  return r;
}

}  // namespace perch::oracle
