#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "perch/scenario_config.hpp"

using namespace perch;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const PerchError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(ScenarioConfig, EmptyFileGivesDefaults) {
  const Scenario sc = parse_scenario_text("");
  const Scenario def;
  EXPECT_EQ(sc.inclination, def.inclination);
  EXPECT_EQ(sc.constraints.max_lift, def.constraints.max_lift);
  EXPECT_EQ(sc.attitude.kp, def.attitude.kp);
  EXPECT_EQ(sc.conditions.normal_offset, 0.2);
}

TEST(ScenarioConfig, FullFileMatchesDefaults) {
  const Scenario sc = load_scenario(std::string(PERCH_SCENARIO_DIR) + "/static_47_full.ini");
  const Scenario def;
  EXPECT_NEAR(sc.inclination, def.inclination, 1e-15);
  EXPECT_EQ(sc.quad.mass, def.quad.mass);
  EXPECT_NEAR(sc.quad.max_lift, def.quad.max_lift, 1e-12);
  EXPECT_NEAR(sc.constraints.max_lift, def.constraints.max_lift, 1e-12);
  EXPECT_EQ(sc.gains.kp, def.gains.kp);
  EXPECT_EQ(sc.gains.ki, def.gains.ki);
  EXPECT_EQ(sc.attitude.kd, def.attitude.kd);
  EXPECT_NEAR(sc.envelope.phi_max, def.envelope.phi_max, 1e-15);
  EXPECT_NEAR(sc.gripper.cup_angle, def.gripper.cup_angle, 1e-15);
  EXPECT_EQ(sc.adhesion.pressure, def.adhesion.pressure);
  EXPECT_EQ(sc.sim.contact_margin, def.sim.contact_margin);
  EXPECT_EQ(sc.search.window_divisions, def.search.window_divisions);
  EXPECT_EQ(sc.noise_sigma, def.noise_sigma);
  EXPECT_EQ(sc.initial.y, def.initial.y);
}

TEST(ScenarioConfig, EveryShippedScenarioLoads) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(PERCH_SCENARIO_DIR)) {
    if (e.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_scenario(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 9);
}

TEST(ScenarioConfig, TableLookupAndOverride) {
  const Scenario sc = parse_scenario_text("[surface]\ninclination_deg = 90\nmotion = forward\n");
  EXPECT_EQ(sc.motion.direction, SurfaceMotionDirection::kForward);
  EXPECT_EQ(sc.conditions.normal_velocity, -0.1);
  EXPECT_EQ(sc.conditions.normal_offset, 0.15);
  const Scenario o = parse_scenario_text("[surface]\ninclination_deg = 90\n[perch]\nl_zs = 0.4\n");
  EXPECT_EQ(o.conditions.normal_offset, 0.4);
  EXPECT_EQ(o.conditions.normal_velocity, -0.5);
  const Scenario free = parse_scenario_text("[surface]\ninclination_deg = 60\n[perch]\nl_zs = 0.3\n");
  EXPECT_EQ(free.conditions.normal_offset, 0.3);
}

TEST(ScenarioConfig, ValuesParsed) {
  const Scenario sc = parse_scenario_text(
      "[scenario]\nseed = 18446744073709551615\nname = x\n"
      "[controller]\nkp = 1, 2, 3\nkv = 5\n"
      "[attitude]\nfeedforward = off\n"
      "[envelope]\npreset = conventional\n"
      "[sim]\nplane_offset = 0.07\n"
      "[constraints]\nmax_lift = 7.5\n");
  EXPECT_EQ(sc.seed, 18446744073709551615ull);
  EXPECT_EQ(sc.gains.kp, (Vec3{1, 2, 3}));
  EXPECT_EQ(sc.gains.kv, (Vec3{5, 5, 5}));
  EXPECT_FALSE(sc.attitude.feedforward);
  EXPECT_NEAR(rad2deg(sc.envelope.phi_min), -6.1, 1e-12);
  ASSERT_TRUE(sc.sim.plane_offset.has_value());
  EXPECT_EQ(*sc.sim.plane_offset, 0.07);
  EXPECT_EQ(sc.constraints.max_lift, 7.5);
}

TEST(ScenarioConfig, ErrorsNameTheKey) {
  EXPECT_TRUE(contains(error_of("[surface]\ninclinaton_deg = 47\n"), "surface.inclinaton_deg"));
  EXPECT_TRUE(contains(error_of("[quad]\nmass = heavy\n"), "quad.mass"));
  EXPECT_TRUE(contains(error_of("[quad]\nmass = 1.0kg\n"), "quad.mass"));
  EXPECT_TRUE(contains(error_of("[sim]\ncups = 2.5\n"), "sim.cups"));
  EXPECT_TRUE(contains(error_of("[scenario]\nseed = -1\n"), "scenario.seed"));
  EXPECT_TRUE(contains(error_of("[attitude]\nfeedforward = maybe\n"), "attitude.feedforward"));
  EXPECT_TRUE(contains(error_of("[surface]\nmotion = sideways\n"), "surface.motion"));
  EXPECT_TRUE(contains(error_of("[envelope]\npreset = huge\n"), "envelope.preset"));
  EXPECT_TRUE(contains(error_of("[controller]\nkp = 1, 2\n"), "controller.kp"));
  EXPECT_TRUE(contains(error_of("[constraints]\nmax_lift = 5\nlift_fraction = 0.5\n"), "constraints.max_lift"));
  EXPECT_TRUE(contains(error_of("[telemetry]\nrate = 5\n"), "telemetry"));
  EXPECT_TRUE(contains(error_of("loose = 1\n"), "loose"));
  EXPECT_TRUE(contains(error_of("[surface]\ninclination_deg = 60\n"), "no [perch] section"));
  EXPECT_TRUE(contains(error_of("[quad]\nmass = 1\nmass = 2\n"), "line"));
  EXPECT_TRUE(contains(error_of("[quad]\nmass = -1\n"), "mass"));
}

TEST(ScenarioConfig, MissingFile) {
  try {
    load_scenario("/nonexistent/scenario.ini");
    FAIL();
  } catch (const PerchError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}
