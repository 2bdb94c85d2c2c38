#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "perch/dynamics.hpp"
#include "perch/flatness.hpp"
#include "perch/gripper_model.hpp"
#include "perch/surface_predictor.hpp"
#include "perch/terminal_states.hpp"
#include "perch/time_search.hpp"
#include "perch/tracking_controller.hpp"

namespace perch {

/// Truth motion of the surface along Y: at rest until `start_time`, then a
/// constant-acceleration ramp to `target_speed`, then constant speed.
struct SurfaceMotion {
  SurfaceMotionDirection direction = SurfaceMotionDirection::kStatic;
  double target_speed = 1.0;  // magnitude, m/s
  double accel = 1.0;         // magnitude, m/s^2
  double start_time = 0.5;    // s

  double sign() const {
    switch (direction) {
      case SurfaceMotionDirection::kForward: return 1.0;
      case SurfaceMotionDirection::kBackward: return -1.0;
      default: return 0.0;
    }
  }
  double ramp_end() const { return start_time + target_speed / accel; }

  double offset(double t) const {
    if (t <= start_time || sign() == 0.0) return 0.0;
    const double tr = ramp_end();
    if (t <= tr) return sign() * 0.5 * accel * (t - start_time) * (t - start_time);
    return sign() * (0.5 * accel * (tr - start_time) * (tr - start_time) + target_speed * (t - tr));
  }
  double speed(double t) const {
    if (t <= start_time || sign() == 0.0) return 0.0;
    if (t <= ramp_end()) return sign() * accel * (t - start_time);
    return sign() * target_speed;
  }
  double acceleration(double t) const {
    if (t <= start_time || sign() == 0.0 || t > ramp_end()) return 0.0;
    return sign() * accel;
  }
};

struct SimSettings {
  double physics_dt = 1e-3;
  double control_rate = 30.0;    // Hz, also the surface sampling rate
  double fit_window = 0.5;       // s
  double start_delay = 0.5;      // earliest planning start, s
  double detect_speed = 0.1;     // fitted surface speed that counts as moving, m/s
  double timeout = 8.0;          // s
  double attach_hold = 2.0;      // s the attachment must persist
  double contact_margin = 0.03;  // m, wheel overlap at the planned terminal pose
  std::optional<double> plane_offset;  // plate plane along the normal from the marker point
  int cups = 2;
};

/// Planner constraints with the lift bound at `fraction` of the actuator limit,
/// leaving headroom for the feedback terms.
inline Constraints planner_constraints(const QuadParams& q, double fraction) {
  Constraints c;
  c.max_lift = fraction * q.max_lift;
  return c;
}

struct Scenario {
  std::string name = "scenario";
  double inclination = deg2rad(47.0);
  double surface_y = 0.0;  // marker reference point at t = 0
  double surface_z = 1.0;
  SurfaceMotion motion;
  QuadState initial{-1.2, 1.4, 0.0, 0.0, 0.0, 0.0};
  QuadParams quad;
  Constraints constraints = planner_constraints(quad, 0.78);
  PerchConditions conditions;
  ControllerGains gains;
  AttitudeLoop attitude;
  PerchEnvelope envelope;
  GripperGeometry gripper;
  AdhesionModel adhesion;
  SearchOptions search;
  SimSettings sim;
  double noise_sigma = 0.001;  // m, on surface samples
  std::uint64_t seed = 1;

  void validate() const {
    quad.validate();
    constraints.validate();
    conditions.validate();
    gains.validate();
    envelope.validate();
    gripper.validate();
    adhesion.validate();
    if (!initial.finite()) throw PerchError(ErrorKind::kInvalidArgument, "initial state must be finite");
    if (!(sim.physics_dt > 0.0) || !(sim.control_rate > 0.0) || !(sim.fit_window > 0.0) ||
        !(sim.timeout > 0.0) || !(noise_sigma >= 0.0)) {
      throw PerchError(ErrorKind::kInvalidArgument, "simulation settings must be positive");
    }
    if (sim.cups < 1) throw PerchError(ErrorKind::kInvalidArgument, "at least one cup must engage");
    if (!(search.init_step > 0.0) || !(search.min_step > 0.0) || search.window_divisions < 1 ||
        !(search.bisect_tolerance > 0.0)) {
      throw PerchError(ErrorKind::kInvalidArgument, "planner steps and divisions must be positive");
    }
    if (motion.direction != SurfaceMotionDirection::kStatic &&
        (!(motion.accel > 0.0) || !(motion.target_speed >= 0.0))) {
      throw PerchError(ErrorKind::kInvalidArgument, "moving surface needs accel > 0 and speed >= 0");
    }
  }

  /// Signed distance of the contact plane from the marker point along the
  /// outward normal.
  double plane_offset() const {
    return sim.plane_offset.value_or(conditions.normal_offset -
                                     (gripper.mount_offset + gripper.wheel_radius) +
                                     sim.contact_margin);
  }
};

enum class ControlPhase { kHover, kTracking, kAligned };

struct TraceRow {
  double t, y, z, phi, dy, dz, dphi, f1, f2;
  double y_ref, z_ref, vy_ref, vz_ref, ay_ref, az_ref;
  double ay_cmd, az_cmd, roll_cmd, thrust_cmd;
  double surface_y, surface_vy;
  double solve_ms;
};

struct ControlRecord {
  double t = 0.0;
  double tau = 0.0;      // time into the active trajectory
  double horizon = 0.0;  // active trajectory length (0 when hovering)
  ControlPhase phase = ControlPhase::kHover;
  bool handover = false;
  Vec3 ref_acc{};
  Vec3 cmd_acc{};
  Vec3 feedforward_gain{};
  AttitudeThrustCmd attitude;
};

struct PlanRecord {
  double t = 0.0;
  PlanOutcome outcome = PlanOutcome::kStopped;
  bool initial_scan = false;
  bool reused = false;  // fallback: the previous trajectory stays active
  bool feasible = false;  // check_feasible on the adopted trajectory at plan time
  double horizon = std::numeric_limits<double>::quiet_NaN();
  double solve_time = 0.0;
  SearchState state_before;
  PlanningProblem problem;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  bool contact = false;
  bool success = false;
  PerchFailure failure = PerchFailure::kNoContact;
  double impact_time = std::numeric_limits<double>::quiet_NaN();
  double angle_error = std::numeric_limits<double>::quiet_NaN();  // phi_s - phi, rad
  double tangential_velocity = std::numeric_limits<double>::quiet_NaN();
  double normal_velocity = std::numeric_limits<double>::quiet_NaN();
  double surface_speed = std::numeric_limits<double>::quiet_NaN();
  CupSelection cup;
  bool attach_held = false;
  std::vector<double> solve_times;
  std::vector<TraceRow> trace;
  std::vector<ControlRecord> controls;
  std::vector<PlanRecord> plans;
};

namespace detail {

struct ActiveTrajectory {
  TrajectoryPair pair;
  double start = 0.0;
};

inline ReferencePoint reference_at(const ActiveTrajectory& a, double tau) {
  const double T = a.pair.horizon();
  const double s = std::clamp(tau, 0.0, T);
  const AxisSample y = a.pair.y.at(s);
  const AxisSample z = a.pair.z.at(s);
  return {{0.0, y.pos, z.pos}, {0.0, y.vel, z.vel}, {0.0, y.acc, z.acc}};
}

/// Whether the attached vehicle stays on for `hold` seconds with rotors
/// stopped: adhesion must carry the normal pull and friction the shear.
inline bool attachment_holds(const Scenario& sc, double t_impact) {
  const AdhesionForces cap = adhesion_force(sc.adhesion, sc.sim.cups);
  const SurfaceFrame fr(sc.inclination);
  for (double t = t_impact; t <= t_impact + sc.sim.attach_hold; t += sc.sim.physics_dt) {
    const double fy = sc.quad.mass * sc.motion.acceleration(t);
    const double fz = sc.quad.mass * kGravity;  // m (a_s - g e_z), z part
    const double pull = -(fr.ny * fy + fr.nz * fz);  // force the cups must supply toward the plate
    const double shear = std::abs(fr.ty * fy + fr.tz * fz);
    if (pull > cap.adhesion || shear > cap.max_friction) return false;
  }
  return true;
}

}  // namespace detail

/// Runs one closed-loop perch: noisy surface sampling and replanning at the
/// control rate, tracking controller and inner roll loop, rigid-body stepping
/// at the physics rate, and impact scoring.
inline EpisodeResult run_episode(const Scenario& sc) {
  sc.validate();
  EpisodeResult res;
  res.seed = sc.seed;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  const double dt = sc.sim.physics_dt;
  const double period = 1.0 / sc.sim.control_rate;
  const double phi_s = sc.inclination;
  const SurfaceFrame frame(phi_s);
  const double plane_offset = sc.plane_offset();
  const double m = sc.quad.mass;

  ManualClock clock;
  const MinTimePlanner planner(clock, sc.search);
  SearchState search;
  TrackingController controller(sc.gains);
  SurfaceTrack track;

  QuadState x = sc.initial;
  std::optional<detail::ActiveTrajectory> active;
  bool planning = false;
  bool stopped = false;
  AttitudeThrustCmd att{m * kGravity, 0.0, 0.0, 0.0};
  ReferencePoint ref{{0.0, sc.initial.y, sc.initial.z}, {}, {}};
  Vec3 cmd_acc{};
  RollSetpoint roll_sp;
  double tick_time = 0.0;
  long tick = 0;

  const auto steps = static_cast<long>(std::ceil(sc.sim.timeout / dt));
  res.trace.reserve(static_cast<std::size_t>(steps));

  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    double solve_ms = 0.0;

    if (t + 1e-9 >= static_cast<double>(tick) * period) {
      ++tick;
      tick_time = t;
      clock.set(t);
      const double sy = sc.surface_y + sc.motion.offset(t);
      track.append({t, sy + sc.noise_sigma * noise(rng), sc.surface_z + sc.noise_sigma * noise(rng)});

      if (!planning && t + 1e-9 >= sc.sim.start_delay && track.size() >= 2) {
        if (sc.motion.direction == SurfaceMotionDirection::kStatic) {
          planning = true;
        } else {
          planning = std::abs(fit(track, sc.sim.fit_window, phi_s).vy) >= sc.sim.detect_speed;
        }
      }

      if (planning && !stopped) {
        PlanningProblem pb;
        pb.surface = fit(track, sc.sim.fit_window, phi_s);
        pb.conditions = sc.conditions;
        pb.constraints = sc.constraints;
        pb.params = sc.quad;
        Vec3 acc0{};
        if (active) acc0 = detail::reference_at(*active, t - active->start).acc;
        pb.start = {x.y, x.dy, acc0[1], x.z, x.dz, acc0[2]};

        PlanRecord rec;
        rec.t = t;
        rec.state_before = search;
        rec.problem = pb;
        if (!search.initialized) {
          try {
            search = planner.initialize(pb);
            const TrajectoryPair pair =
                solve_pair(pb.start, get_terminal_states(pb.surface, search.t_last, pb.conditions),
                           search.t_last);
            active = detail::ActiveTrajectory{pair, t};
            controller.reset();
            rec.initial_scan = true;
            rec.outcome = PlanOutcome::kFound;
            rec.horizon = search.t_last;
            rec.feasible = check_feasible(pair.y, pair.z, sc.constraints, sc.quad).feasible;
          } catch (const PerchError& e) {
            if (e.kind() != ErrorKind::kInitializationFailed) throw;
            rec.outcome = PlanOutcome::kStopped;
          }
        } else {
          const PlanResult pr = planner.plan(search, pb);
          rec.outcome = pr.outcome;
          rec.solve_time = pr.solve_time;
          res.solve_times.push_back(pr.solve_time);
          solve_ms = pr.solve_time * 1e3;
          if (pr.outcome == PlanOutcome::kFound) {
            active = detail::ActiveTrajectory{*pr.trajectories, t};
            rec.horizon = *pr.horizon;
            rec.feasible =
                check_feasible(pr.trajectories->y, pr.trajectories->z, sc.constraints, sc.quad).feasible;
          } else if (pr.outcome == PlanOutcome::kFallback) {
            rec.reused = true;
            rec.horizon = *pr.horizon;
          } else {
            stopped = true;
          }
        }
        res.plans.push_back(rec);
      }

      ControlRecord cr;
      cr.t = t;
      const TrackedState actual{{0.0, x.y, x.z}, {0.0, x.dy, x.dz}};
      if (active) {
        const double tau = t - active->start;
        const double T = active->pair.horizon();
        ref = detail::reference_at(*active, tau);
        cr.tau = tau;
        cr.horizon = T;
        const double tau_ff = std::clamp(tau, 0.0, T);
        const FlatOutputs fo = flat_outputs(active->pair.y.at(tau_ff), active->pair.z.at(tau_ff));
        if (tau <= T) {
          roll_sp.rate = flat_to_roll_rate(fo);
          roll_sp.accel = flat_to_roll_accel(fo);
          const AccelerationCommand ac = controller.command_acceleration(ref, actual, tau, T, period);
          cmd_acc = ac.acc;
          cr.handover = ac.handover;
          cr.feedforward_gain = ac.feedforward_gain;
          cr.phase = ControlPhase::kTracking;
        } else {
          cmd_acc = ref.acc;  // terminal acceleration: attitude aligned with the surface
          roll_sp.rate = 0.0;
          roll_sp.accel = 0.0;
          cr.phase = ControlPhase::kAligned;
        }
      } else {
        const AccelerationCommand ac = controller.command_acceleration(
            ref, actual, 0.0, std::numeric_limits<double>::infinity(), period);
        cmd_acc = ac.acc;
        roll_sp.rate = 0.0;
        roll_sp.accel = 0.0;
        cr.feedforward_gain = ac.feedforward_gain;
        cr.phase = ControlPhase::kHover;
      }
      att = acceleration_to_attitude_thrust(cmd_acc, m);
      roll_sp.roll = att.roll;
      cr.ref_acc = ref.acc;
      cr.cmd_acc = cmd_acc;
      cr.attitude = att;
      res.controls.push_back(cr);
    }

    const RotorCommand lifts = sc.attitude.lifts(att.thrust, roll_sp, t - tick_time, x, sc.quad);
    res.trace.push_back({t, x.y, x.z, x.phi, x.dy, x.dz, x.dphi, lifts.f1, lifts.f2, ref.pos[1],
                         ref.pos[2], ref.vel[1], ref.vel[2], ref.acc[1], ref.acc[2], cmd_acc[1],
                         cmd_acc[2], att.roll, att.thrust, sc.surface_y + sc.motion.offset(t),
                         sc.motion.speed(t), solve_ms});

    x = rk4_step(x, [&](double) { return lifts; }, t, dt, sc.quad);
    if (!x.finite()) break;

    const double tn = t + dt;
    const double py = sc.surface_y + sc.motion.offset(tn) + plane_offset * frame.ny;
    const double pz = sc.surface_z + plane_offset * frame.nz;
    const double cy = x.y + sc.gripper.mount_offset * std::sin(x.phi);
    const double cz = x.z - sc.gripper.mount_offset * std::cos(x.phi);
    const double dist = frame.ny * (cy - py) + frame.nz * (cz - pz);
    if (dist <= sc.gripper.wheel_radius) {
      res.contact = true;
      res.impact_time = tn;
      res.angle_error = phi_s - x.phi;
      const double vs = sc.motion.speed(tn);
      const double rvy = x.dy - vs;
      const double rvz = x.dz;
      res.tangential_velocity = frame.ty * rvy + frame.tz * rvz;
      res.normal_velocity = frame.ny * rvy + frame.nz * rvz;
      res.surface_speed = vs;
      res.cup = select_cup(res.tangential_velocity, res.angle_error, sc.gripper.cup_angle);
      const PerchVerdict v =
          judge_perch(res.angle_error, res.tangential_velocity, res.normal_velocity, sc.envelope);
      res.failure = v.failure;
      if (v.success) {
        res.attach_held = detail::attachment_holds(sc, tn);
        res.success = res.attach_held;
        if (!res.attach_held) res.failure = PerchFailure::kDetached;
      }
      break;
    }
  }
  return res;
}

struct BatchSummary {
  std::string name;
  int episodes = 0;
  int successes = 0;
  int angle_failures = 0;
  int velocity_failures = 0;
  int no_contact = 0;
  int detached = 0;
  double mean_surface_speed = std::numeric_limits<double>::quiet_NaN();  // over successes
  std::vector<double> solve_times;
  std::vector<EpisodeResult> episodes_detail;

  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }

  double fraction_solves_below(double seconds) const {
    if (solve_times.empty()) return 0.0;
    const auto n = std::count_if(solve_times.begin(), solve_times.end(),
                                 [&](double s) { return s < seconds; });
    return static_cast<double>(n) / static_cast<double>(solve_times.size());
  }
};

/// Runs n episodes with seeds seed, seed+1, ... Results are keyed by seed, so
/// their order never depends on execution order.
inline BatchSummary run_batch(const Scenario& sc, int n, bool keep_traces = false) {
  if (n <= 0) throw PerchError(ErrorKind::kInvalidArgument, "batch size must be positive");
  BatchSummary sum;
  sum.name = sc.name;
  double speed_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Scenario s = sc;
    s.seed = sc.seed + static_cast<std::uint64_t>(i);
    EpisodeResult r = run_episode(s);
    ++sum.episodes;
    if (r.success) {
      ++sum.successes;
      speed_acc += r.surface_speed;
    }
    switch (r.failure) {
      case PerchFailure::kAngle: ++sum.angle_failures; break;
      case PerchFailure::kVelocity: ++sum.velocity_failures; break;
      case PerchFailure::kNoContact: ++sum.no_contact; break;
      case PerchFailure::kDetached: ++sum.detached; break;
      case PerchFailure::kNone: break;
    }
    sum.solve_times.insert(sum.solve_times.end(), r.solve_times.begin(), r.solve_times.end());
    if (!keep_traces) {
      r.trace.clear();
      r.trace.shrink_to_fit();
      r.controls.clear();
      r.controls.shrink_to_fit();
      r.plans.clear();
      r.plans.shrink_to_fit();
    }
    sum.episodes_detail.push_back(std::move(r));
  }
  if (sum.successes > 0) sum.mean_surface_speed = speed_acc / sum.successes;
  return sum;
}

// ---------------------------------------------------------------------------
// CSV output. Every file starts with a header row.

inline void write_trace_csv(std::ostream& os, const EpisodeResult& r) {
  os << "t,y,z,phi,dy,dz,dphi,F1,F2,y_ref,z_ref,vy_ref,vz_ref,ay_ref,az_ref,ay_cmd,az_cmd,"
        "roll_cmd,thrust_cmd,surface_y,surface_vy,solve_ms\n";
  os.precision(10);
  for (const auto& w : r.trace) {
    os << w.t << ',' << w.y << ',' << w.z << ',' << w.phi << ',' << w.dy << ',' << w.dz << ','
       << w.dphi << ',' << w.f1 << ',' << w.f2 << ',' << w.y_ref << ',' << w.z_ref << ','
       << w.vy_ref << ',' << w.vz_ref << ',' << w.ay_ref << ',' << w.az_ref << ',' << w.ay_cmd
       << ',' << w.az_cmd << ',' << w.roll_cmd << ',' << w.thrust_cmd << ',' << w.surface_y << ','
       << w.surface_vy << ',' << w.solve_ms << '\n';
  }
}

inline void write_result_csv(std::ostream& os, const EpisodeResult& r) {
  os << "seed,contact,success,failure,impact_time,phi_e_deg,dv_ys,dv_zs,nu_s,cup,plans\n";
  os << r.seed << ',' << r.contact << ',' << r.success << ',' << to_string(r.failure) << ','
     << r.impact_time << ',' << rad2deg(r.angle_error) << ',' << r.tangential_velocity << ','
     << r.normal_velocity << ',' << r.surface_speed << ',' << static_cast<int>(r.cup.cup) << ','
     << r.plans.size() << '\n';
}

/// One row per scenario: success rate and mean impact surface speed.
inline void write_batch_summary_csv(std::ostream& os, const std::vector<BatchSummary>& rows) {
  os << "scenario,episodes,successes,success_rate,avg_nu_s,a_failures,v_failures,no_contact,"
        "detached,solves,solve_below_10ms\n";
  for (const auto& s : rows) {
    os << s.name << ',' << s.episodes << ',' << s.successes << ',' << s.success_rate() << ','
       << s.mean_surface_speed << ',' << s.angle_failures << ',' << s.velocity_failures << ','
       << s.no_contact << ',' << s.detached << ',' << s.solve_times.size() << ','
       << s.fraction_solves_below(0.010) << '\n';
  }
}

/// Solve-time histogram in 1 ms bins; the last bin collects everything above.
inline void write_solve_histogram_csv(std::ostream& os, const std::vector<double>& solve_times,
                                      int bins = 20) {
  std::vector<int> counts(static_cast<std::size_t>(bins) + 1, 0);
  for (double s : solve_times) {
    const auto b = static_cast<std::size_t>(std::min<double>(bins, std::floor(s * 1e3)));
    ++counts[b];
  }
  os << "bin_ms_lo,bin_ms_hi,count\n";
  for (int b = 0; b <= bins; ++b) {
    os << b << ',';
    if (b == bins) os << "inf"; else os << b + 1;
    os << ',' << counts[static_cast<std::size_t>(b)] << '\n';
  }
}

/// Impact relative velocities with verdicts, for the velocity-envelope plot.
inline void write_impact_scatter_csv(std::ostream& os, const BatchSummary& s) {
  os << "seed,dv_zs,dv_ys,phi_e_deg,success,failure\n";
  for (const auto& r : s.episodes_detail) {
    if (!r.contact) continue;
    os << r.seed << ',' << r.normal_velocity << ',' << r.tangential_velocity << ','
       << rad2deg(r.angle_error) << ',' << r.success << ',' << to_string(r.failure) << '\n';
  }
}

}  // namespace perch
