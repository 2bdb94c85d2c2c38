#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perch/error.hpp"
#include "perch/sim_harness.hpp"

namespace perch {

namespace detail {

// Reads one INI section into typed fields. Every key must be claimed by a
// field binding; leftovers are reported by name.
class SectionReader {
 public:
  SectionReader(const boost::property_tree::ptree& tree, std::string name)
      : name_(std::move(name)) {
    if (const auto child = tree.get_child_optional(name_)) {
      present_ = true;
      for (const auto& [k, v] : *child) values_[k] = v.get_value<std::string>();
    }
  }

  bool present() const { return present_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void number(const std::string& key, double& out) {
    if (const auto s = take(key)) out = parse_double(key, *s);
  }
  void degrees(const std::string& key, double& out_rad) {
    if (const auto s = take(key)) out_rad = deg2rad(parse_double(key, *s));
  }
  void integer(const std::string& key, int& out) {
    if (const auto s = take(key)) {
      std::size_t pos = 0;
      try {
        const long v = std::stol(*s, &pos);
        if (pos == s->size()) {
          out = static_cast<int>(v);
          return;
        }
      } catch (const std::logic_error&) {
      }
      throw bad(key, "expected an integer, got '" + *s + "'");
    }
  }
  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const auto s = take(key)) {
      std::size_t pos = 0;
      try {
        if (!s->empty() && (*s)[0] != '-') {
          const unsigned long long v = std::stoull(*s, &pos);
          if (pos == s->size()) {
            out = v;
            return;
          }
        }
      } catch (const std::logic_error&) {
      }
      throw bad(key, "expected a non-negative integer, got '" + *s + "'");
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const auto s = take(key)) {
      if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") {
        out = true;
      } else if (*s == "false" || *s == "0" || *s == "no" || *s == "off") {
        out = false;
      } else {
        throw bad(key, "expected a boolean, got '" + *s + "'");
      }
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const auto s = take(key)) out = *s;
  }
  /// Either one value for all three axes or a comma-separated triple.
  void triple(const std::string& key, Vec3& out) {
    const auto s = take(key);
    if (!s) return;
    std::stringstream ss(*s);
    std::vector<double> vals;
    for (std::string part; std::getline(ss, part, ',');) vals.push_back(parse_double(key, part));
    if (vals.size() == 1) {
      out = {vals[0], vals[0], vals[0]};
    } else if (vals.size() == 3) {
      out = {vals[0], vals[1], vals[2]};
    } else {
      throw bad(key, "expected one value or three comma-separated values");
    }
  }
  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  void finish() const {
    if (!values_.empty()) {
      throw PerchError(ErrorKind::kConfig, "unknown key '" + name_ + "." + values_.begin()->first + "'");
    }
  }

  PerchError bad(const std::string& key, const std::string& why) const {
    return PerchError(ErrorKind::kConfig, "key '" + name_ + "." + key + "': " + why);
  }

 private:
  double parse_double(const std::string& key, const std::string& raw) const {
    std::size_t b = raw.find_first_not_of(" \t");
    std::size_t e = raw.find_last_not_of(" \t");
    const std::string s = b == std::string::npos ? "" : raw.substr(b, e - b + 1);
    std::size_t pos = 0;
    try {
      const double v = std::stod(s, &pos);
      if (pos == s.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    throw bad(key, "expected a number, got '" + raw + "'");
  }

  std::string name_;
  bool present_ = false;
  std::map<std::string, std::string> values_;
};

}  // namespace detail

/// Parses a scenario from INI text. Sections and keys are listed in
/// README.md; anything not listed is rejected with its name in the message.
/// Perch conditions start from the built-in table row for the scenario's
/// motion and inclination; [perch] keys override it.
inline Scenario parse_scenario(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw PerchError(ErrorKind::kConfig, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> kSections = {"scenario",  "surface", "quad",     "constraints",
                                                  "perch",     "controller", "attitude", "envelope",
                                                  "gripper",   "adhesion", "sim",      "planner"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw PerchError(ErrorKind::kConfig, "key '" + name + "' outside any section");
    }
    if (!kSections.count(name)) throw PerchError(ErrorKind::kConfig, "unknown section '" + name + "'");
  }

  Scenario sc;
  using detail::SectionReader;

  SectionReader scen(tree, "scenario");
  scen.text("name", sc.name);
  scen.unsigned64("seed", sc.seed);
  scen.number("noise_sigma", sc.noise_sigma);
  scen.number("initial_y", sc.initial.y);
  scen.number("initial_z", sc.initial.z);
  scen.finish();

  SectionReader surf(tree, "surface");
  double inclination_deg = rad2deg(sc.inclination);
  surf.number("inclination_deg", inclination_deg);
  sc.inclination = deg2rad(inclination_deg);
  surf.number("y", sc.surface_y);
  surf.number("z", sc.surface_z);
  if (const auto m = surf.take("motion")) {
    const auto dir = parse_motion_direction(*m);
    if (!dir) throw surf.bad("motion", "expected static, forward or backward, got '" + *m + "'");
    sc.motion.direction = *dir;
  }
  surf.number("target_speed", sc.motion.target_speed);
  surf.number("accel", sc.motion.accel);
  surf.number("start_time", sc.motion.start_time);
  surf.finish();

  SectionReader quad(tree, "quad");
  quad.number("mass", sc.quad.mass);
  quad.number("inertia", sc.quad.inertia);
  quad.number("arm", sc.quad.arm);
  quad.number("max_lift", sc.quad.max_lift);
  quad.finish();

  SectionReader cons(tree, "constraints");
  if (cons.has("max_lift") && cons.has("lift_fraction")) {
    throw cons.bad("max_lift", "give either max_lift or lift_fraction, not both");
  }
  double lift_fraction = 0.78;
  cons.number("lift_fraction", lift_fraction);
  sc.constraints = planner_constraints(sc.quad, lift_fraction);
  cons.number("max_lift", sc.constraints.max_lift);
  cons.number("z_min", sc.constraints.z_min);
  cons.number("z_max", sc.constraints.z_max);
  cons.number("v_min", sc.constraints.v_min);
  cons.number("v_max", sc.constraints.v_max);
  cons.integer("samples", sc.constraints.samples);
  cons.finish();

  SectionReader perch(tree, "perch");
  const auto row = PerchConditionTable::defaults().lookup(sc.motion.direction, inclination_deg);
  if (row) {
    sc.conditions = *row;
  } else if (!perch.present()) {
    throw PerchError(ErrorKind::kConfig, "no [perch] section and no table entry for " +
                                             std::string(to_string(sc.motion.direction)) + " at " +
                                             std::to_string(inclination_deg) + " deg");
  }
  perch.number("dv_ys", sc.conditions.tangential_velocity);
  perch.number("dv_zs", sc.conditions.normal_velocity);
  perch.number("l_zs", sc.conditions.normal_offset);
  perch.finish();

  SectionReader ctrl(tree, "controller");
  ctrl.triple("kp", sc.gains.kp);
  ctrl.triple("kv", sc.gains.kv);
  ctrl.triple("ki", sc.gains.ki);
  ctrl.number("handover_window", sc.gains.handover_window);
  ctrl.number("integral_limit", sc.gains.integral_limit);
  ctrl.finish();

  SectionReader att(tree, "attitude");
  att.number("kp", sc.attitude.kp);
  att.number("kd", sc.attitude.kd);
  att.boolean("feedforward", sc.attitude.feedforward);
  att.finish();

  SectionReader env(tree, "envelope");
  if (const auto preset = env.take("preset")) {
    if (*preset == "md_gripper") {
      sc.envelope = PerchEnvelope::md_gripper();
    } else if (*preset == "conventional") {
      sc.envelope = PerchEnvelope::conventional_cups();
    } else {
      throw env.bad("preset", "expected md_gripper or conventional, got '" + *preset + "'");
    }
  }
  env.degrees("phi_min_deg", sc.envelope.phi_min);
  env.degrees("phi_max_deg", sc.envelope.phi_max);
  env.number("vt_min", sc.envelope.vt_min);
  env.number("vt_max", sc.envelope.vt_max);
  env.number("vn_min", sc.envelope.vn_min);
  env.number("vn_max", sc.envelope.vn_max);
  env.finish();

  SectionReader grip(tree, "gripper");
  grip.number("holder_radius", sc.gripper.holder_radius);
  grip.number("seal_radius", sc.gripper.seal_radius);
  grip.number("trigger_radius", sc.gripper.trigger_radius);
  grip.number("neck_radius", sc.gripper.neck_radius);
  grip.number("fulcrum_height", sc.gripper.fulcrum_height);
  grip.number("stiffness", sc.gripper.stiffness);
  grip.number("wheel_radius", sc.gripper.wheel_radius);
  grip.degrees("cup_angle_deg", sc.gripper.cup_angle);
  grip.number("open_gap", sc.gripper.open_gap);
  grip.number("mount_offset", sc.gripper.mount_offset);
  grip.finish();

  SectionReader adh(tree, "adhesion");
  adh.number("pressure", sc.adhesion.pressure);
  adh.number("cup_radius", sc.adhesion.cup_radius);
  adh.number("friction", sc.adhesion.friction);
  adh.finish();

  SectionReader sim(tree, "sim");
  sim.number("physics_dt", sc.sim.physics_dt);
  sim.number("control_rate", sc.sim.control_rate);
  sim.number("fit_window", sc.sim.fit_window);
  sim.number("start_delay", sc.sim.start_delay);
  sim.number("detect_speed", sc.sim.detect_speed);
  sim.number("timeout", sc.sim.timeout);
  sim.number("attach_hold", sc.sim.attach_hold);
  sim.number("contact_margin", sc.sim.contact_margin);
  if (sim.has("plane_offset")) {
    double po = 0.0;
    sim.number("plane_offset", po);
    sc.sim.plane_offset = po;
  }
  sim.integer("cups", sc.sim.cups);
  sim.finish();

  SectionReader plan(tree, "planner");
  plan.number("init_step", sc.search.init_step);
  plan.number("init_cap", sc.search.init_cap);
  plan.number("min_horizon", sc.search.min_horizon);
  plan.number("bisect_tolerance", sc.search.bisect_tolerance);
  plan.number("min_step", sc.search.min_step);
  plan.integer("window_divisions", sc.search.window_divisions);
  plan.finish();

  try {
    sc.validate();
  } catch (const PerchError& e) {
    throw PerchError(ErrorKind::kConfig, e.what());
  }
  return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PerchError(ErrorKind::kConfig, "cannot open scenario file " + path);
  return parse_scenario(in);
}

}  // namespace perch
