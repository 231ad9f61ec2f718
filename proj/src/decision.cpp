#include "cvlc/decision.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvlc/error.hpp"
#include "cvlc/kinematics.hpp"
#include "cvlc/worst_case.hpp"

namespace cvlc {

namespace {

double MaxLateralInStep(const VehicleState& ego, double a_y, double dt) {
  double y = std::max(ego.p_y, ego.p_y + ego.v_y * dt + 0.5 * a_y * dt * dt);
  if (a_y < 0.0 && ego.v_y > 0.0) {
    const double t = std::min(dt, ego.v_y / -a_y);
    y = std::max(y, ego.p_y + ego.v_y * t + 0.5 * a_y * t * t);
  }
  return y;
}

}  // namespace

EvasionCheck CertifyCandidate(const VehicleState& ego, const Command& cmd,
                              const CertificationInput& in) {
  const double dt = in.dt;
  const double a1 = in.leader_decel;
  const bool has_follower = in.follower && in.follower_model != FollowerModel::kAbsent;
  const double a_f = FollowerWorstAccel(in.follower_model, in.ctx.limits);

  if (MaxLateralInStep(ego, cmd.a_y, dt) > in.ctx.geometry.retreat_target() + 1e-12) {
    const auto ego_motion = PiecewiseMotion::Constant(ego.p_x, ego.v_x, cmd.a_x);
    const auto lead_motion = PiecewiseMotion::Constant(in.leader.p_x, in.leader.v_x, -a1);
    if (MinGap(lead_motion, ego_motion, 0.0, dt).gap < in.ctx.min_gap) {
      EvasionCheck fail;
      fail.limiting_constraint = LimitingConstraint::kLeader;
      return fail;
    }
    if (has_follower) {
      const auto rear = PiecewiseMotion::Constant(in.follower->p_x, in.follower->v_x, a_f);
      if (MinGap(ego_motion, rear, 0.0, dt).gap < in.ctx.min_gap) {
        EvasionCheck fail;
        fail.limiting_constraint = LimitingConstraint::kFollower;
        return fail;
      }
    }
  }

  const VehicleState ego_next = StepKinematics(ego, cmd.a_x, cmd.a_y, dt);
  VehicleState leader_next = in.leader;
  leader_next.p_x = LeaderPositionAt(in.leader, a1, dt);
  leader_next.v_x = LeaderVelocityAt(in.leader, a1, dt);
  std::optional<VehicleState> follower_next;
  if (in.follower) {
    follower_next = *in.follower;
    follower_next->p_x = FollowerPositionAt(*in.follower, a_f, dt);
    follower_next->v_x = std::max(0.0, in.follower->v_x + a_f * dt);
  }
  return EvasionExists(ego_next, leader_next, a1, follower_next, in.follower_model, in.ctx);
}

Command HesitateAction(const VehicleState& ego, double a_x, const MechanicalLimits& limits,
                       double dt) {
  return {a_x, std::clamp(-ego.v_y / dt, -limits.a_y_m, limits.a_y_m)};
}

Command AbortAction(const EvasionPlan& plan, double elapsed) {
  if (elapsed > plan.horizon()) {
    throw Error(ErrorCode::kPlanExhausted,
                "evasion plan ended at " + std::to_string(plan.horizon()) + " s, requested " +
                    std::to_string(elapsed) + " s");
  }
  return plan.CommandAt(elapsed);
}

Decision DecideStep(const VehicleState& ego, const Command& planner_command,
                    const EvasionPlan& previous_plan, double elapsed,
                    const CertificationInput& in) {
  Decision d;
  const double dt = in.dt;

  EvasionCheck proceed = CertifyCandidate(ego, planner_command, in);
  d.proceed_certified = proceed.exists;
  if (proceed.exists) {
    d.behavior = Behavior::kProceed;
    d.command = planner_command;
    d.certified = std::move(proceed);
    d.next_ego = StepKinematics(ego, d.command.a_x, d.command.a_y, dt);
    return d;
  }

  const bool exhausted = elapsed >= previous_plan.horizon();
  const double hesitate_ax =
      exhausted ? planner_command.a_x : previous_plan.longitudinal.Acceleration(elapsed);
  const Command hesitate_cmd = HesitateAction(ego, hesitate_ax, in.ctx.limits, dt);
  EvasionCheck hesitate = CertifyCandidate(ego, hesitate_cmd, in);
  d.hesitate_certified = hesitate.exists;
  if (hesitate.exists) {
    d.behavior = Behavior::kHesitate;
    d.command = hesitate_cmd;
    d.certified = std::move(hesitate);
    d.next_ego = StepKinematics(ego, d.command.a_x, d.command.a_y, dt);
    return d;
  }

  d.behavior = Behavior::kAbort;
  if (exhausted) {
    d.plan_exhausted = true;
    d.command = HesitateAction(ego, planner_command.a_x, in.ctx.limits, dt);
    d.next_ego = StepKinematics(ego, d.command.a_x, d.command.a_y, dt);
    return d;
  }
  d.next_ego = previous_plan.StateAt(elapsed + dt);
  // Period-average accelerations of the exact plan segment.
  d.command = {(d.next_ego.v_x - ego.v_x) / dt, (d.next_ego.v_y - ego.v_y) / dt};
  return d;
}

}  // namespace cvlc
