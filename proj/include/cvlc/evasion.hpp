#pragma once

#include <optional>
#include <utility>

#include "cvlc/motion.hpp"
#include "cvlc/types.hpp"

namespace cvlc {

/// Fastest lateral retreat: -a_y_m on [0, t_1], +a_y_m on [t_1, t_y_f], ending
/// at the retreat target with zero lateral velocity.
struct LateralPlan {
  double t_1 = 0.0;
  double t_y_f = 0.0;
  double a_y_m = 0.0;
  double y_target = 0.0;
  double y0 = 0.0;
  double vy0 = 0.0;
  bool already_clear = false;

  double Position(double t) const;
  double Velocity(double t) const;
  double Acceleration(double t) const;
  /// Interval of [0, t_y_f] during which the ego overlaps the target lane
  /// (y > y_target). Empty intervals have first >= second.
  std::pair<double, double> OverlapWindow() const;
};

LateralPlan LateralEvasion(double p_y, double v_y, const LaneGeometry& geometry, double a_y_m);

enum class LongitudinalMethod { kTrivial, kKeepAccelerating, kClosedForm, kBisection };

/// Accelerate at a_x_a on [0, t_x_1], brake at a_x_d on [t_x_1, t_x_2], then
/// brake at the leader's worst-case rate until standstill.
struct LongitudinalPlan {
  double t_x_1 = 0.0;
  double t_x_2 = 0.0;
  double tau_1 = kInf;  ///< velocity match with the leader (kInf if none)
  double tau_2 = kInf;  ///< ego standstill (kInf if never)
  int case_id = 1;
  double a_x_1_d = 0.0;
  double t_y_f = 0.0;
  LongitudinalMethod method = LongitudinalMethod::kTrivial;

  double p0 = 0.0;
  double v0 = 0.0;
  double a_x_a = 0.0;
  double a_x_d = 0.0;

  PiecewiseMotion Motion() const;
  double Position(double t) const { return Motion().Position(t); }
  double Velocity(double t) const { return Motion().Velocity(t); }
  double Acceleration(double t) const;
};

/// Builds the three-phase profile for a given t_x_1 (t_x_2, tau, case id are
/// derived from the velocity-match rule).
LongitudinalPlan ThreePhaseProfile(const VehicleState& ego, const VehicleState& leader,
                                   double a_x_1_d, const MechanicalLimits& limits, double t_y_f,
                                   double t_x_1);

/// Maximal t_x_1 keeping the leader gap >= min_gap on [0, t_y_f]. Returns
/// std::nullopt when even braking from t = 0 cannot keep the gap.
std::optional<LongitudinalPlan> TryLongitudinalEvasion(const VehicleState& ego,
                                                       const VehicleState& leader,
                                                       double a_x_1_d,
                                                       const MechanicalLimits& limits,
                                                       double min_gap, double t_y_f);

/// Throwing variant: Error(kEvasionInfeasible).
LongitudinalPlan LongitudinalEvasion(const VehicleState& ego, const VehicleState& leader,
                                     double a_x_1_d, const MechanicalLimits& limits,
                                     double min_gap, double t_y_f);

/// Ego longitudinal position along the plan. Once the ego has matched the
/// leader's speed it rides the leader envelope at a constant offset, which
/// equals min_gap when the margin binds.
inline double EgoPositionAt(const LongitudinalPlan& plan, double t) { return plan.Position(t); }

/// Follower envelope under constant signed acceleration, frozen at standstill.
inline double FollowerPositionAt(const VehicleState& follower, double a_x_f, double t) {
  if (follower.v_x + a_x_f * t >= 0.0) {
    return follower.p_x + follower.v_x * t + 0.5 * a_x_f * t * t;
  }
  return follower.p_x + follower.v_x * follower.v_x / (2.0 * -a_x_f);
}

enum class FollowerModel { kAggressive, kCollaborative, kAbsent };

/// Follower gap window: the full evasion horizon, or only while the ego
/// laterally overlaps the target lane.
enum class FollowerCheckMode { kStrict, kLateralOverlap };

enum class LimitingConstraint { kNone, kLeader, kFollower, kLateralInfeasible };

struct EvasionContext {
  MechanicalLimits limits;
  LaneGeometry geometry;
  double min_gap = 0.0;  ///< required separation of the longitudinal positions
  FollowerCheckMode follower_mode = FollowerCheckMode::kStrict;
};

struct EvasionCheck {
  bool exists = false;
  LateralPlan lateral;
  std::optional<LongitudinalPlan> longitudinal;
  LimitingConstraint limiting_constraint = LimitingConstraint::kNone;
};

inline double FollowerWorstAccel(FollowerModel model, const MechanicalLimits& limits) {
  return model == FollowerModel::kCollaborative ? -limits.a_x_d : limits.a_x_a;
}

EvasionCheck EvasionExists(const VehicleState& ego, const VehicleState& leader,
                           double a_x_1_d, const std::optional<VehicleState>& follower,
                           FollowerModel follower_model, const EvasionContext& ctx);

/// Combined lateral and longitudinal evasion trajectory, evaluable at any
/// offset from the instant the plan was certified.
struct EvasionPlan {
  LateralPlan lateral;
  LongitudinalPlan longitudinal;

  double horizon() const { return lateral.t_y_f; }
  VehicleState StateAt(double t) const;
  Command CommandAt(double t) const;

  static EvasionPlan From(const EvasionCheck& check);
};

}  // namespace cvlc
