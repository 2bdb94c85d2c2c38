#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "perch/minjerk.hpp"
#include "perch/oracle.hpp"
#include "qp_oracle.hpp"

using namespace perch;

namespace {

double numeric_jerk_cost(const AxisTrajectory& traj, int n = 2000) {
  // composite Simpson on the squared jerk
  const double h = traj.horizon / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double j = traj.at(i * h).jerk;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * j * j;
  }
  return acc * h / 3.0;
}

}  // namespace

TEST(MinJerk, RestToRestMidpoint) {
  const AxisTrajectory traj = solve_axis({0, 0, 0, 1, 0, 0}, 1.0);
  const AxisSample mid = traj.at(0.5);
  EXPECT_NEAR(mid.pos, 0.5, 1e-15);
  EXPECT_NEAR(mid.vel, 1.875, 1e-14);
  EXPECT_NEAR(mid.acc, 0.0, 1e-13);
}

TEST(MinJerk, StartStateIsReproducedExactly) {
  const AxisBoundary b{0.3, -1.2, 2.5, 4.0, 0.7, -9.8};
  const AxisSample s = solve_axis(b, 1.7).at(0.0);
  EXPECT_EQ(s.pos, b.p0);
  EXPECT_EQ(s.vel, b.v0);
  EXPECT_EQ(s.acc, b.a0);
}

TEST(MinJerk, MatchesHigherDegreeQp) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const AxisBoundary b = oracle::random_boundary(rng);
    const double T = oracle::uniform(rng, 0.2, 5.0);
    const AxisTrajectory traj = solve_axis(b, T);
    const perch::testing::JerkQp<9> qp(b, T);
    EXPECT_LT(qp.high_order_norm(), 1e-7);
    for (int k = 0; k <= 50; ++k) {
      const double t = T * k / 50.0;
      ASSERT_NEAR(traj.at(t).pos, qp.position(t), 1e-6) << "instance " << i << " t " << t;
    }
  }
}

TEST(MinJerk, MatchesHermiteInterpolant) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const AxisBoundary b = oracle::random_boundary(rng);
    const double T = oracle::uniform(rng, 0.2, 5.0);
    const AxisTrajectory traj = solve_axis(b, T);
    const oracle::HermiteQuintic h(b, T);
    for (int k = 0; k <= 50; ++k) {
      const double t = T * k / 50.0;
      ASSERT_NEAR(traj.at(t).pos, h.position(t), 1e-9);
    }
  }
}

TEST(MinJerk, TerminalStateReproducedProperty) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const AxisBoundary b = oracle::random_boundary(rng);
    const double T = oracle::uniform(rng, 0.1, 8.0);
    const AxisSample e = solve_axis(b, T).at(T);
    ASSERT_NEAR(e.pos, b.pT, 1e-9 * std::max(1.0, std::abs(b.pT)));
    ASSERT_NEAR(e.vel, b.vT, 1e-9 * std::max(1.0, std::abs(b.vT)));
    ASSERT_NEAR(e.acc, b.aT, 1e-9 * std::max(1.0, std::abs(b.aT)));
  }
}

TEST(MinJerk, DerivativesAreConsistent) {
  const AxisTrajectory traj = solve_axis({0.1, 0.4, -1.0, 2.0, -0.3, 0.8}, 1.3);
  const double h = 1e-5;
  for (double t : {0.2, 0.65, 1.1}) {
    const AxisSample a = traj.at(t - h), b = traj.at(t + h), c = traj.at(t);
    EXPECT_NEAR((b.pos - a.pos) / (2 * h), c.vel, 1e-8);
    EXPECT_NEAR((b.vel - a.vel) / (2 * h), c.acc, 1e-8);
    EXPECT_NEAR((b.acc - a.acc) / (2 * h), c.jerk, 1e-7);
    EXPECT_NEAR((b.jerk - a.jerk) / (2 * h), c.snap, 1e-6);
  }
}

TEST(MinJerk, PerturbationRaisesCost) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100; ++i) {
    const AxisBoundary b = oracle::random_boundary(rng);
    const double T = oracle::uniform(rng, 0.5, 3.0);
    const AxisTrajectory traj = solve_axis(b, T);
    const double eps = oracle::uniform(rng, -1.0, 1.0);
    // s^3 (1 - s)^3 leaves position, velocity and acceleration untouched at both ends
    const int n = 4000;
    const double h = T / n;
    double perturbed = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = k * h, s = t / T;
      const double d3 = (120.0 * s * s * s - 180.0 * s * s + 72.0 * s - 6.0) / (T * T * T);
      const double j = traj.at(t).jerk + eps * d3;
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      perturbed += w * j * j;
    }
    perturbed *= h / 3.0;
    EXPECT_GE(perturbed, jerk_cost(traj) - 1e-9 * std::max(1.0, jerk_cost(traj)));
  }
}

TEST(MinJerk, JerkCostMatchesQuadrature) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 50; ++i) {
    const AxisTrajectory traj = solve_axis(oracle::random_boundary(rng), oracle::uniform(rng, 0.3, 4.0));
    const double exact = jerk_cost(traj);
    EXPECT_NEAR(exact, numeric_jerk_cost(traj), 1e-8 * std::max(1.0, exact));
  }
}

TEST(MinJerk, RejectsBadHorizon) {
  for (double T : {0.0, -1.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
    try {
      solve_axis({}, T);
      FAIL() << "accepted T=" << T;
    } catch (const PerchError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidHorizon);
    }
  }
}

TEST(MinJerk, TinyHorizonOverflows) {
  try {
    solve_axis({0, 0, 0, 1e300, 0, 0}, 1e-80);
    FAIL();
  } catch (const PerchError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumericallyUnstable);
  }
}

TEST(MinJerk, EvalChecksDomain) {
  const AxisTrajectory traj = solve_axis({0, 0, 0, 1, 0, 0}, 2.0);
  EXPECT_NO_THROW(eval(traj, 0.0));
  EXPECT_NO_THROW(eval(traj, 2.0));
  for (double t : {-1e-12, 2.0 + 1e-12, std::nan("")}) {
    try {
      eval(traj, t);
      FAIL();
    } catch (const PerchError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kOutOfDomain);
    }
  }
}
