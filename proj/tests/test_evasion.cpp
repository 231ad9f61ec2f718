#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvlc/error.hpp"
#include "cvlc/evasion.hpp"
#include "cvlc/worst_case.hpp"
#include "oracles.hpp"

using namespace cvlc;

namespace {

VehicleState At(double p, double v, double py = 0.0, double vy = 0.0) { return {p, v, py, vy}; }

const MechanicalLimits kLimits{};
const LaneGeometry kGeometry{};

}  // namespace

TEST(LateralEvasion, FromTargetLaneCenterAtRest) {
  const LateralPlan plan = LateralEvasion(1.75, 0.0, kGeometry, 2.0);
  EXPECT_NEAR(plan.t_1, std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(plan.t_y_f, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(plan.Position(plan.t_y_f), 0.75, 1e-12);
  EXPECT_NEAR(plan.Velocity(plan.t_y_f), 0.0, 1e-12);
}

TEST(LateralEvasion, MovingTowardTarget) {
  const LateralPlan plan = LateralEvasion(1.0, 0.5, kGeometry, 2.0);
  EXPECT_NEAR(plan.t_1, 0.6453, 1e-4);
  EXPECT_NEAR(plan.t_y_f, 1.0406, 1e-4);
}

TEST(LateralEvasion, AlreadyInOriginalLane) {
  const LateralPlan plan = LateralEvasion(0.3, -0.2, kGeometry, 2.0);
  EXPECT_TRUE(plan.already_clear);
  EXPECT_EQ(plan.t_y_f, 0.0);
}

TEST(LateralEvasion, IntegratedEndpointMatchesTarget) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> py(0.8, 3.5), vy(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double y = py(rng);
    const double v = vy(rng);
    const LateralPlan plan = LateralEvasion(y, v, kGeometry, 2.0);
    if (plan.already_clear) continue;
    const auto end = oracle::SimLateral(y, v, 2.0, plan.t_1, plan.t_y_f, 1e-3);
    // Overshooting toward the original lane ends at rest below the target.
    if (plan.t_1 > 0.0) {
      EXPECT_NEAR(end.p, 0.75, 1e-6) << i;
    } else {
      EXPECT_LE(end.p, 0.75 + 1e-9) << i;
    }
    EXPECT_NEAR(end.v, 0.0, 1e-6) << i;
  }
}

TEST(LongitudinalEvasion, ClosedFormMatchesOracle) {
  // Full acceleration reaches 103.5 m while the braking leader is at 83 m, so
  // the acceleration phase must end early: t_x_1 = 3 - sqrt(5).
  const auto plan = LongitudinalEvasion(At(0, 30), At(20, 30), 6.0, kLimits, 2.0, 3.0);
  EXPECT_NEAR(plan.t_x_1, 3.0 - std::sqrt(5.0), 1e-9);
  EXPECT_EQ(plan.case_id, 1);
  const double sim = oracle::SimMaxAccelTime({0, 30}, {20, 30}, 6.0, 3.0, 6.0, 2.0, 3.0);
  EXPECT_NEAR(plan.t_x_1, sim, 5e-3);
}

TEST(LongitudinalEvasion, CloseLeader) {
  const auto plan = LongitudinalEvasion(At(0, 30), At(8, 30), 6.0, kLimits, 2.0, 3.0);
  EXPECT_NEAR(plan.t_x_1, 0.2311, 1e-4);
  EXPECT_EQ(plan.case_id, 1);
  EXPECT_NEAR(plan.Velocity(3.0), 14.08, 1e-2);
  const double sim = oracle::SimMaxAccelTime({0, 30}, {8, 30}, 6.0, 3.0, 6.0, 2.0, 3.0);
  EXPECT_NEAR(plan.t_x_1, sim, 5e-3);
}

TEST(LongitudinalEvasion, SlowLeaderIsInfeasible) {
  EXPECT_FALSE(TryLongitudinalEvasion(At(0, 30), At(4, 5), 6.0, kLimits, 2.0, 3.0));
  try {
    LongitudinalEvasion(At(0, 30), At(4, 5), 6.0, kLimits, 2.0, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEvasionInfeasible);
  }
}

TEST(LongitudinalEvasion, FarLeaderKeepsAccelerating) {
  const auto plan = LongitudinalEvasion(At(0, 30), At(200, 30), 6.0, kLimits, 2.0, 3.0);
  EXPECT_EQ(plan.t_x_1, 3.0);
  EXPECT_EQ(plan.method, LongitudinalMethod::kKeepAccelerating);
}

TEST(LongitudinalEvasion, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> gap(3, 60), v0(5, 35), vl(0, 35), a1(0.5, 6),
      horizon(0.3, 3);
  int feasible = 0;
  for (int i = 0; i < 80; ++i) {
    const double g = gap(rng), ve = v0(rng), v_l = vl(rng), a = a1(rng), T = horizon(rng);
    const auto plan = TryLongitudinalEvasion(At(0, ve), At(g, v_l), a, kLimits, 2.0, T);
    const double sim = oracle::SimMaxAccelTime({0, ve}, {g, v_l}, a, 3.0, 6.0, 2.0, T);
    if (!plan) {
      EXPECT_TRUE(std::isnan(sim)) << i;
      continue;
    }
    ++feasible;
    EXPECT_NEAR(plan->t_x_1, sim, 5e-3) << i;
  }
  EXPECT_GT(feasible, 40);
}

TEST(LongitudinalEvasion, PlanKeepsMinGapOverHorizon) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> gap(3, 60), v0(5, 35), vl(0, 35), a1(0.5, 6),
      horizon(0.3, 3);
  for (int i = 0; i < 500; ++i) {
    const VehicleState ego = At(0, v0(rng));
    const VehicleState leader = At(gap(rng), vl(rng));
    const double a = a1(rng), T = horizon(rng);
    const auto plan = TryLongitudinalEvasion(ego, leader, a, kLimits, 2.0, T);
    if (!plan) continue;
    const auto front = PiecewiseMotion::Constant(leader.p_x, leader.v_x, -a);
    EXPECT_GE(MinGap(front, plan->Motion(), 0.0, T).gap, 2.0 - 1e-6) << i;
    EXPECT_GE(plan->t_x_1, 0.0);
    EXPECT_LE(plan->t_x_1, T);
    EXPECT_LE(plan->t_x_1, plan->t_x_2 + 1e-12);
  }
}

TEST(EgoPosition, TracksLeaderAtMinGapOnceMatched) {
  const auto plan = LongitudinalEvasion(At(0, 30), At(8, 30), 6.0, kLimits, 2.0, 3.0);
  const VehicleState leader = At(8, 30);
  EXPECT_EQ(EgoPositionAt(plan, 0.0), 0.0);
  // Case 1 never matches inside the horizon; extend the check over a
  // velocity-matching instance instead.
  const auto tracked = LongitudinalEvasion(At(0, 30), At(30, 25), 2.0, kLimits, 2.0, 10.0);
  ASSERT_TRUE(std::isfinite(tracked.tau_1));
  const VehicleState lead2 = At(30, 25);
  if (tracked.t_x_1 < 10.0) {
    const double t = 0.5 * (tracked.tau_1 + std::min(10.0, tracked.tau_2));
    EXPECT_NEAR(LeaderPositionAt(lead2, 2.0, t) - EgoPositionAt(tracked, t), 2.0, 1e-6);
  }
  EXPECT_GE(LeaderPositionAt(leader, 6.0, 3.0) - EgoPositionAt(plan, 3.0), 2.0 - 1e-9);
}

TEST(FollowerEnvelope, FreezesAtStandstill) {
  EXPECT_NEAR(FollowerPositionAt(At(0, 12), -6.0, 5.0), 12.0, 1e-12);
  EXPECT_NEAR(FollowerPositionAt(At(0, 30), 3.0, 1.0), 31.5, 1e-12);
}

TEST(EvasionExists, CollaborativeFollowerFarLeaderPasses) {
  EvasionContext ctx{kLimits, kGeometry, 2.0};
  const auto check = EvasionExists(At(0, 30, 1.75), At(40, 30, 3.5), 6.0, At(-25, 30, 3.5),
                                   FollowerModel::kCollaborative, ctx);
  EXPECT_TRUE(check.exists);
  EXPECT_EQ(check.limiting_constraint, LimitingConstraint::kNone);
}

TEST(EvasionExists, AggressiveCloseFollowerFails) {
  EvasionContext ctx{kLimits, kGeometry, 2.0};
  const auto check = EvasionExists(At(0, 30, 1.75), At(40, 30, 3.5), 6.0, At(-3, 35, 3.5),
                                   FollowerModel::kAggressive, ctx);
  EXPECT_FALSE(check.exists);
  EXPECT_EQ(check.limiting_constraint, LimitingConstraint::kFollower);
}

// Three-second retreat: one metre of lateral travel at a_y_m = 4/9.
TEST(EvasionExists, CloseFollowerDependsOnModel) {
  MechanicalLimits slow = kLimits;
  slow.a_y_m = 4.0 / 9.0;
  EvasionContext ctx{slow, kGeometry, 2.0};
  const VehicleState ego = At(0, 30, 1.75);
  ASSERT_NEAR(LateralEvasion(1.75, 0.0, kGeometry, slow.a_y_m).t_y_f, 3.0, 1e-12);

  const auto aggressive = EvasionExists(ego, At(6, 30, 3.5), 6.0, At(-5, 30, 3.5),
                                        FollowerModel::kAggressive, ctx);
  EXPECT_FALSE(aggressive.exists);
  EXPECT_EQ(aggressive.limiting_constraint, LimitingConstraint::kFollower);

  const auto collaborative = EvasionExists(ego, At(6, 30, 3.5), 6.0, At(-5, 30, 3.5),
                                           FollowerModel::kCollaborative, ctx);
  ASSERT_TRUE(collaborative.exists);
  const LongitudinalPlan& lon = *collaborative.longitudinal;
  double worst = kInf;
  for (int k = 0; k <= 3000; ++k) {
    const double t = k * 1e-3;
    worst = std::min(worst, lon.Position(t) - FollowerPositionAt(At(-5, 30), -6.0, t));
  }
  EXPECT_GE(worst, 2.0);
}

TEST(EvasionExists, CloseLeaderFails) {
  EvasionContext ctx{kLimits, kGeometry, 2.0};
  const auto check = EvasionExists(At(0, 30, 1.75), At(4, 5, 3.5), 6.0, std::nullopt,
                                   FollowerModel::kAbsent, ctx);
  EXPECT_FALSE(check.exists);
  EXPECT_EQ(check.limiting_constraint, LimitingConstraint::kLeader);
}

TEST(EvasionExists, ClearEgoAlwaysHasPlan) {
  EvasionContext ctx{kLimits, kGeometry, 2.0};
  const auto check = EvasionExists(At(0, 30, 0.0), At(1, 0, 3.5), 6.0, At(-1, 30, 3.5),
                                   FollowerModel::kAggressive, ctx);
  EXPECT_TRUE(check.exists);
  EXPECT_TRUE(check.lateral.already_clear);
}

TEST(EvasionPlan, StateAtStartReproducesInitialState) {
  EvasionContext ctx{kLimits, kGeometry, 2.0};
  const VehicleState ego = At(0, 30, 1.75, 0.4);
  const auto check = EvasionExists(ego, At(40, 30, 3.5), 6.0, std::nullopt,
                                   FollowerModel::kAbsent, ctx);
  ASSERT_TRUE(check.exists);
  const EvasionPlan plan = EvasionPlan::From(check);
  const VehicleState s = plan.StateAt(0.0);
  EXPECT_NEAR(s.p_x, ego.p_x, 1e-12);
  EXPECT_NEAR(s.v_x, ego.v_x, 1e-12);
  EXPECT_NEAR(s.p_y, ego.p_y, 1e-12);
  EXPECT_NEAR(s.v_y, ego.v_y, 1e-12);
  const VehicleState end = plan.StateAt(plan.horizon());
  EXPECT_NEAR(end.p_y, kGeometry.retreat_target(), 1e-9);
}
