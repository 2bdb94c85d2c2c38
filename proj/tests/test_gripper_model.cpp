#include <gtest/gtest.h>

#include <cmath>

#include "perch/gripper_model.hpp"

using namespace perch;

TEST(Adhesion, TwoCupNumbers) {
  const AdhesionForces f = adhesion_force(AdhesionModel{}, 2);
  EXPECT_NEAR(f.adhesion, 86.9, 0.005 * 86.9);
  EXPECT_NEAR(f.max_friction, 26.1, 0.005 * 26.1);
  // the load the cups carry exceeds the 9.26 N vehicle weight
  EXPECT_GT(f.max_friction, 0.945 * 9.8);
}

TEST(Adhesion, ScalesWithCupsAndArea) {
  AdhesionModel a;
  EXPECT_DOUBLE_EQ(adhesion_force(a, 1).adhesion * 2, adhesion_force(a, 2).adhesion);
  const double base = adhesion_force(a, 1).adhesion;
  a.cup_radius *= 2;
  EXPECT_DOUBLE_EQ(adhesion_force(a, 1).adhesion, 4 * base);
  a.pressure = 1.0;
  EXPECT_THROW(a.validate(), PerchError);
}

TEST(Envelope, AngleTakesPrecedence) {
  const PerchEnvelope env;
  EXPECT_EQ(judge_perch(deg2rad(40), 5.0, 5.0, env).failure, PerchFailure::kAngle);
  EXPECT_EQ(judge_perch(deg2rad(10), 5.0, -0.5, env).failure, PerchFailure::kVelocity);
  EXPECT_EQ(judge_perch(deg2rad(10), 0.3, 0.0, env).failure, PerchFailure::kVelocity);
  const PerchVerdict ok = judge_perch(deg2rad(10), 0.3, -0.5, env);
  EXPECT_TRUE(ok.success);
  EXPECT_EQ(ok.failure, PerchFailure::kNone);
}

TEST(Envelope, BoundsAreInclusive) {
  const PerchEnvelope env;
  EXPECT_TRUE(judge_perch(env.phi_min, env.vt_min, env.vn_min, env).success);
  EXPECT_TRUE(judge_perch(env.phi_max, env.vt_max, env.vn_max, env).success);
  EXPECT_FALSE(judge_perch(std::nextafter(env.phi_max, 1.0), 0.3, -0.5, env).success);
  EXPECT_FALSE(judge_perch(0.0, 0.3, std::nextafter(env.vn_max, 0.0), env).success);
  EXPECT_FALSE(judge_perch(std::nan(""), 0.3, -0.5, env).success);
}

TEST(Envelope, PointEnvelopeRejectsAnyError) {
  PerchEnvelope env{0.0, 0.0, 0.3, 0.3, -0.5, -0.5};
  EXPECT_TRUE(judge_perch(0.0, 0.3, -0.5, env).success);
  EXPECT_FALSE(judge_perch(1e-9, 0.3, -0.5, env).success);
  EXPECT_THROW(env.validate(), PerchError);  // not a valid configured envelope
}

TEST(Envelope, Presets) {
  const PerchEnvelope md = PerchEnvelope::md_gripper();
  EXPECT_NEAR(rad2deg(md.phi_min), -19.5, 1e-12);
  EXPECT_NEAR(rad2deg(md.phi_max), 31.6, 1e-12);
  const PerchEnvelope conv = PerchEnvelope::conventional_cups();
  EXPECT_NEAR(rad2deg(conv.phi_min), -6.1, 1e-12);
  EXPECT_NEAR(rad2deg(conv.phi_max), 21.7, 1e-12);
  EXPECT_LT(conv.phi_max - conv.phi_min, md.phi_max - md.phi_min);
  EXPECT_EQ(to_string(PerchFailure::kAngle), "A-failure");
  EXPECT_EQ(to_string(PerchFailure::kVelocity), "V-failure");
}

TEST(CupSelection, RollingDirectionCases) {
  const double a = deg2rad(30);
  const CupSelection up = select_cup(0.5, a, a);
  EXPECT_EQ(up.cup, CupPosition::kUpper);
  EXPECT_NEAR(up.residual, 0.0, 1e-15);
  // a negative error cannot use the lower cup while rolling forward
  const CupSelection c = select_cup(0.5, -a, a);
  EXPECT_EQ(c.cup, CupPosition::kCenter);
  EXPECT_NEAR(c.residual, -a, 1e-15);
  EXPECT_EQ(select_cup(-0.5, -a, a).cup, CupPosition::kLower);
  EXPECT_EQ(select_cup(0.0, 0.1, a).cup, CupPosition::kCenter);
  EXPECT_EQ(select_cup(0.0, -0.9, a).cup, CupPosition::kLower);
  // tie at half the cup angle goes to the rolling direction
  EXPECT_EQ(select_cup(0.5, 0.5 * a, a).cup, CupPosition::kUpper);
}

TEST(CupSelection, ResidualNeverWorseThanCenterProperty) {
  const double a = deg2rad(30);
  for (int i = -90; i <= 90; ++i) {
    for (double v : {-1.0, 0.0, 1.0}) {
      const double e = deg2rad(i);
      const CupSelection s = select_cup(v, e, a);
      ASSERT_LE(std::abs(s.residual), std::abs(e) + 1e-15);
      ASSERT_NEAR(s.residual, e - static_cast<int>(s.cup) * a, 1e-15);
      if (v > 0) {
        ASSERT_NE(s.cup, CupPosition::kLower);
      }
      if (v < 0) {
        ASSERT_NE(s.cup, CupPosition::kUpper);
      }
    }
  }
}

TEST(Gripper, ActivationForce) {
  const GripperGeometry g;
  const double k = g.stiffness / ((g.trigger_radius - g.neck_radius) * g.fulcrum_height);
  EXPECT_DOUBLE_EQ(activation_force(g, 0.0), (g.holder_radius - g.seal_radius) * k);
  EXPECT_NEAR(activation_force(g, 0.002) - activation_force(g, 0.001), 0.001 * k, 1e-12);
  EXPECT_EQ(activation_force(g), activation_force(g, g.open_gap));
  GripperGeometry bad = g;
  bad.neck_radius = bad.trigger_radius;
  EXPECT_THROW(bad.validate(), PerchError);
}

TEST(Gripper, ContactTorqueSign) {
  EXPECT_DOUBLE_EQ(contact_torque(2.0, 0.1, 1.0, 0.05, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(contact_torque(2.0, 0.1, 1.0, 0.05, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(contact_torque(2.0, 0.1, 1.0, 0.05, -1.0), 0.15);
}
