#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "perch/error.hpp"
#include "perch/flatness.hpp"
#include "perch/minjerk.hpp"
#include "perch/surface_predictor.hpp"
#include "perch/terminal_states.hpp"

namespace perch {

/// Monotonic time source in seconds. The planner only reads it to stamp the
/// end of a solve and to measure elapsed time for the fallback countdown.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  double now() const override {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  }
};

/// Clock driven by the caller, for simulation and tests.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(double t = 0.0) : t_(t) {}
  double now() const override { return t_; }
  void set(double t) { t_ = t; }
  void advance(double dt) { t_ += dt; }

 private:
  double t_;
};

/// Position, velocity and acceleration of both flat outputs.
struct FlatState {
  double y = 0.0;
  double vy = 0.0;
  double ay = 0.0;
  double z = 0.0;
  double vz = 0.0;
  double az = 0.0;
};

struct TrajectoryPair {
  AxisTrajectory y;
  AxisTrajectory z;

  double horizon() const { return y.horizon; }
};

inline TrajectoryPair solve_pair(const FlatState& s0, const TerminalStates& st, double T) {
  return {solve_axis({s0.y, s0.vy, s0.ay, st.y, st.vy, st.ay}, T),
          solve_axis({s0.z, s0.vz, s0.az, st.z, st.vz, st.az}, T)};
}

struct SearchState {
  double t_last = 0.0;  // horizon found by the previous solve
  double t_end = 0.0;   // clock reading at the end of the previous solve
  bool initialized = false;
};

enum class PlanOutcome { kFound, kFallback, kStopped };

inline constexpr std::string_view to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::kFound: return "found";
    case PlanOutcome::kFallback: return "fallback";
    case PlanOutcome::kStopped: return "stopped";
  }
  return "unknown";
}

struct PlanResult {
  std::optional<double> horizon;
  std::optional<TerminalStates> terminal;
  std::optional<TrajectoryPair> trajectories;
  double solve_time = 0.0;  // wall-clock seconds
  PlanOutcome outcome = PlanOutcome::kStopped;
  int feasibility_tests = 0;
};

struct SearchOptions {
  double init_step = 0.1;    // initialization scan step, s
  double init_cap = 10.0;    // initialization scan limit, s
  double min_horizon = 0.4;  // below this the planner stops
  double bisect_tolerance = 0.1;
  double min_step = 0.01;
  int window_divisions = 5;
};

/// Everything the feasibility test needs besides the horizon.
struct PlanningProblem {
  FlatState start;
  SurfacePrediction surface;
  PerchConditions conditions;
  Constraints constraints;
  QuadParams params;
};

/// Solves the pair for horizon T against the terminal state predicted at T
/// and checks it. Numerically unusable horizons count as infeasible.
inline bool feasible_at(const PlanningProblem& pb, double T) {
  if (!(T > 0.0)) return false;
  try {
    const TerminalStates st = get_terminal_states(pb.surface, T, pb.conditions);
    const TrajectoryPair pair = solve_pair(pb.start, st, T);
    return check_feasible(pair.y, pair.z, pb.constraints, pb.params).feasible;
  } catch (const PerchError&) {
    return false;
  }
}

/// Minimum terminal time search in a window centred on the previous solution.
class MinTimePlanner {
 public:
  explicit MinTimePlanner(const Clock& clock, SearchOptions options = {})
      : clock_(&clock), options_(options) {}

  const SearchOptions& options() const { return options_; }

  /// First-feasible linear scan from zero; seeds the search state.
  SearchState initialize(const PlanningProblem& pb) const {
    const auto steps = static_cast<int>(std::floor(options_.init_cap / options_.init_step + 1e-9));
    for (int k = 1; k <= steps; ++k) {
      const double T = options_.init_step * k;
      if (feasible_at(pb, T)) return {T, clock_->now(), true};
    }
    throw PerchError(ErrorKind::kInitializationFailed,
                     "no feasible horizon up to " + std::to_string(options_.init_cap) + " s");
  }

  PlanResult plan(SearchState& s, const PlanningProblem& pb) const {
    if (!s.initialized) {
      throw PerchError(ErrorKind::kInvalidArgument, "plan() on an uninitialized search state");
    }
    const auto wall_start = std::chrono::steady_clock::now();
    PlanResult result;
    int tests = 0;
    auto test = [&](double T) {
      ++tests;
      return feasible_at(pb, T);
    };

    const double t_last = s.t_last;
    double t_left = 0.5 * t_last;
    double t_right = 1.5 * t_last;
    double step = (t_right - t_left) / options_.window_divisions;
    bool found = false;
    while (!found) {
      found = test(t_left);
      if (!found) {
        t_left += step;
        if (t_left > t_right) {
          step /= 2.0;
          t_left = 0.5 * t_last + step;
          if (step < options_.min_step) break;
        }
      } else {
        t_right = t_left;
        t_left = t_right - step;
        while (t_right - t_left > options_.bisect_tolerance) {
          const double mid = 0.5 * (t_left + t_right);
          if (!test(mid)) {
            t_left = mid;
          } else {
            t_right = mid;
          }
        }
        break;
      }
    }

    double T = 0.0;
    if (found) {
      T = t_right;
      s.t_last = T;
      s.t_end = clock_->now();
      result.outcome = PlanOutcome::kFound;
    } else {
      const double now = clock_->now();
      T = s.t_last - (now - s.t_end);
      s.t_last = T;
      s.t_end = clock_->now();
      result.outcome = PlanOutcome::kFallback;
    }

    if (T >= options_.min_horizon) {
      result.horizon = T;
      result.terminal = get_terminal_states(pb.surface, T, pb.conditions);
      result.trajectories = solve_pair(pb.start, *result.terminal, T);
    } else {
      result.outcome = PlanOutcome::kStopped;
    }
    result.feasibility_tests = tests;
    result.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
  }

 private:
  const Clock* clock_;
  SearchOptions options_;
};

}  // namespace perch
