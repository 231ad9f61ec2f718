#include <gtest/gtest.h>

#include <cmath>

#include "cvlc/decision.hpp"
#include "cvlc/error.hpp"
#include "cvlc/kinematics.hpp"
#include "oracles.hpp"

using namespace cvlc;

namespace {

CertificationInput Input(const VehicleState& leader, double a1) {
  CertificationInput in;
  in.leader = leader;
  in.leader_decel = a1;
  in.ctx.min_gap = in.ctx.geometry.center_margin();
  in.dt = 0.1;
  return in;
}

EvasionPlan PlanFrom(const VehicleState& ego, const CertificationInput& in) {
  const EvasionCheck c = EvasionExists(ego, in.leader, in.leader_decel, in.follower,
                                       in.follower_model, in.ctx);
  EXPECT_TRUE(c.exists);
  return EvasionPlan::From(c);
}

}  // namespace

TEST(DecideStep, WideGapsProceed) {
  const VehicleState ego{0.0, 30.0, 1.0, 0.6};
  CertificationInput in = Input({40.0, 30.0, 3.5, 0.0}, 4.0);
  in.follower = VehicleState{-40.0, 30.0, 3.5, 0.0};
  in.follower_model = FollowerModel::kAggressive;
  const Command mild{0.2, 1.0};
  const Decision d = DecideStep(ego, mild, PlanFrom(ego, in), 0.0, in);
  ASSERT_EQ(d.behavior, Behavior::kProceed);
  EXPECT_EQ(d.command, mild);
  EXPECT_EQ(d.next_ego, StepKinematics(ego, mild.a_x, mild.a_y, in.dt));

  // The certified plan keeps the leader margin by brute force.
  const LongitudinalPlan& lon = *d.certified.longitudinal;
  const VehicleState lead_next = {in.leader.p_x + 30.0 * 0.1 - 0.5 * 4.0 * 0.01,
                                  30.0 - 0.4, 3.5, 0.0};
  const double sim = oracle::SimEvasionMinGap({d.next_ego.p_x, d.next_ego.v_x},
                                              {lead_next.p_x, lead_next.v_x}, 4.0, 3.0, 6.0,
                                              lon.t_x_1, lon.t_y_f, 1e-4);
  EXPECT_GE(sim, in.ctx.min_gap - 1e-3);
}

TEST(DecideStep, HardBrakingLeaderForcesHesitate) {
  const VehicleState ego{0.0, 30.0, 1.2, 0.6};
  const CertificationInput in = Input({22.4, 20.0, 3.5, 0.0}, 6.0);
  const Command push{0.0, 2.0};
  EXPECT_FALSE(CertifyCandidate(ego, push, in).exists);

  EvasionPlan stale;  // exhausted: the hold keeps the planner's a_x
  const Decision d = DecideStep(ego, push, stale, 1.0, in);
  ASSERT_EQ(d.behavior, Behavior::kHesitate);
  EXPECT_FALSE(d.proceed_certified);
  EXPECT_TRUE(d.hesitate_certified);
  EXPECT_DOUBLE_EQ(d.command.a_x, push.a_x);
  EXPECT_DOUBLE_EQ(d.command.a_y, -2.0);
}

TEST(DecideStep, HesitateFollowsStoredLongitudinalProfile) {
  const VehicleState ego{0.0, 30.0, 1.2, 0.6};
  const CertificationInput in = Input({22.4, 20.0, 3.5, 0.0}, 6.0);
  const CertificationInput wide = Input({60.0, 30.0, 3.5, 0.0}, 6.0);
  const EvasionPlan plan = PlanFrom(ego, wide);
  const Decision d = DecideStep(ego, {0.0, 2.0}, plan, 0.0, in);
  ASSERT_EQ(d.behavior, Behavior::kHesitate);
  EXPECT_DOUBLE_EQ(d.command.a_x, plan.longitudinal.Acceleration(0.0));
}

TEST(DecideStep, NothingCertifiedAborts) {
  const VehicleState ego0{0.0, 30.0, 1.5, 0.5};
  const CertificationInput wide = Input({60.0, 30.0, 3.5, 0.0}, 6.0);
  const EvasionPlan plan = PlanFrom(ego0, wide);

  // The world turns hostile: the leader is now close and slow.
  const double elapsed = 0.2;
  const VehicleState ego = plan.StateAt(elapsed);
  const CertificationInput hostile = Input({ego.p_x + 7.0, 5.0, 3.5, 0.0}, 6.0);
  const Decision d = DecideStep(ego, {1.0, 2.0}, plan, elapsed, hostile);
  ASSERT_EQ(d.behavior, Behavior::kAbort);
  EXPECT_FALSE(d.proceed_certified);
  EXPECT_FALSE(d.hesitate_certified);
  EXPECT_FALSE(d.plan_exhausted);
  const VehicleState want = plan.StateAt(elapsed + hostile.dt);
  EXPECT_NEAR(d.next_ego.p_x, want.p_x, 1e-12);
  EXPECT_NEAR(d.next_ego.v_x, want.v_x, 1e-12);
  EXPECT_NEAR(d.next_ego.p_y, want.p_y, 1e-12);
  EXPECT_NEAR(d.next_ego.v_y, want.v_y, 1e-12);
}

TEST(DecideStep, IsDeterministic) {
  const VehicleState ego{0.0, 30.0, 1.2, 0.6};
  const CertificationInput in = Input({22.4, 20.0, 3.5, 0.0}, 6.0);
  const EvasionPlan plan = PlanFrom(ego, Input({60.0, 30.0, 3.5, 0.0}, 6.0));
  const Decision a = DecideStep(ego, {0.3, 1.0}, plan, 0.1, in);
  const Decision b = DecideStep(ego, {0.3, 1.0}, plan, 0.1, in);
  EXPECT_EQ(a.behavior, b.behavior);
  EXPECT_EQ(a.command, b.command);
  EXPECT_EQ(a.next_ego, b.next_ego);
}

TEST(HesitateAction, StopsLateralMotion) {
  const MechanicalLimits lim;
  EXPECT_DOUBLE_EQ(HesitateAction({0, 30, 1.2, 0.0}, 0.0, lim, 0.1).a_y, 0.0);
  EXPECT_DOUBLE_EQ(HesitateAction({0, 30, 1.2, 0.5}, 0.0, lim, 0.1).a_y, -2.0);
  const Command c = HesitateAction({0, 30, 1.2, -0.3}, 0.0, lim, 0.1);
  EXPECT_DOUBLE_EQ(c.a_y, 2.0);
  EXPECT_LE(-0.3 + c.a_y * 0.1, 1e-12);
  EXPECT_NEAR(HesitateAction({0, 30, 1.2, 0.15}, 0.0, lim, 0.1).a_y, -1.5, 1e-12);
}

TEST(AbortAction, FollowsBangBangSegments) {
  const VehicleState ego{0.0, 30.0, 1.75, 0.0};
  const EvasionPlan plan = PlanFrom(ego, Input({60.0, 30.0, 3.5, 0.0}, 2.0));
  const LateralPlan& lat = plan.lateral;
  const MechanicalLimits lim;
  ASSERT_GT(lat.t_1, 0.0);
  EXPECT_DOUBLE_EQ(AbortAction(plan, 0.5 * lat.t_1).a_y, -lim.a_y_m);
  EXPECT_DOUBLE_EQ(AbortAction(plan, 0.5 * (lat.t_1 + lat.t_y_f)).a_y, lim.a_y_m);
  ASSERT_GT(plan.longitudinal.t_x_1, 0.0);
  EXPECT_DOUBLE_EQ(AbortAction(plan, 0.5 * plan.longitudinal.t_x_1).a_x, lim.a_x_a);
}

TEST(AbortAction, ExhaustedPlanThrows) {
  const VehicleState ego{0.0, 30.0, 1.75, 0.0};
  const EvasionPlan plan = PlanFrom(ego, Input({60.0, 30.0, 3.5, 0.0}, 2.0));
  try {
    AbortAction(plan, plan.horizon() + 0.1);
    FAIL() << "expected PlanExhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlanExhausted);
  }
}
