#pragma once

#include <optional>

#include "cvlc/evasion.hpp"
#include "cvlc/types.hpp"

namespace cvlc {

enum class Behavior { kProceed, kHesitate, kAbort };

/// Masked view of the surroundings used to certify a candidate.
struct CertificationInput {
  VehicleState leader;              ///< L_1
  double leader_decel = 0.0;        ///< worst-case braking of L_1
  std::optional<VehicleState> follower;
  FollowerModel follower_model = FollowerModel::kAbsent;
  EvasionContext ctx;
  double dt = 0.1;
};

/// Evasion check from the state reached after applying `cmd` for one period.
/// Also requires the in-step gaps to hold while the ego is above the retreat
/// target, with the leader on its braking envelope and the follower at its
/// worst-case acceleration.
EvasionCheck CertifyCandidate(const VehicleState& ego, const Command& cmd,
                              const CertificationInput& in);

/// Stops the lateral motion as fast as the limit allows without overshoot;
/// the longitudinal part is supplied by the caller.
Command HesitateAction(const VehicleState& ego, double a_x, const MechanicalLimits& limits,
                       double dt);

/// Command of the stored plan at `elapsed`. Throws Error(kPlanExhausted) once
/// the plan has run out and the ego is back in its lane.
Command AbortAction(const EvasionPlan& plan, double elapsed);

struct Decision {
  Behavior behavior = Behavior::kAbort;
  Command command;
  /// Evasion from the post-step state (Proceed/Hesitate); for Abort the
  /// previous plan keeps running.
  EvasionCheck certified;
  /// Ego state after the step. For Abort this is the stored plan evaluated
  /// exactly, since the plan switches phase inside a period.
  VehicleState next_ego;
  bool proceed_certified = false;
  bool hesitate_certified = false;
  bool plan_exhausted = false;
};

/// Proceed, then Hesitate, then Abort: the first candidate whose post-step
/// evasion exists wins. Abort follows `previous_plan` from `elapsed`; once
/// that plan is exhausted with the ego clear, the planner's longitudinal
/// command is kept with a lateral hold.
Decision DecideStep(const VehicleState& ego, const Command& planner_command,
                    const EvasionPlan& previous_plan, double elapsed,
                    const CertificationInput& in);

}  // namespace cvlc
