#include "cvlc/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "cvlc/kinematics.hpp"
#include "cvlc/worst_case.hpp"

namespace cvlc {

Rng MakeStream(std::uint64_t trial_seed, std::uint64_t stream_id) {
  return Rng(SplitMix64(SplitMix64(trial_seed) ^ SplitMix64(~stream_id)));
}

std::optional<double> SamplePromiseViolation(Rng& rng, double p_v, double lower, double upper) {
  if (UniformUnit(rng) >= p_v) return std::nullopt;
  return lower + (upper - lower) * UniformUnit(rng);
}

double SafeAccel(const VehicleState& self, const VehicleState& front, double front_accel,
                 double desired, double reserve_decel, double min_gap,
                 const MechanicalLimits& limits, double dt, double front_decel_floor) {
  const double front_decel = std::max(front_decel_floor, -front_accel);
  const VehicleState self_next = StepKinematics(self, desired, 0.0, dt);
  const VehicleState front_next = StepKinematics(front, front_accel, 0.0, dt);
  const bool in_step_ok =
      MinGap(PiecewiseMotion::Constant(front.p_x, front.v_x, front_accel),
             PiecewiseMotion::Constant(self.p_x, self.v_x, desired), 0.0, dt)
          .gap >= min_gap;
  if (in_step_ok &&
      TryRequiredDecel(front_next, self_next, front_decel, min_gap, reserve_decel)) {
    return desired;
  }
  const auto now = TryRequiredDecel(front, self, front_decel, min_gap, limits.a_x_d);
  if (!now) return -limits.a_x_d;
  return std::min(desired, -*now);
}

LongitudinalAction LeaderPolicy(const VehicleState& self, const VehicleState& front,
                                double front_accel, const ConnectivityPromise& promise,
                                std::optional<double> violation_decel, double min_gap,
                                const MechanicalLimits& limits, double dt,
                                const CarFollowingParams& params) {
  const double clipped =
      std::clamp(params.relax_gain * (front.v_x - self.v_x), -promise.a_m_d, promise.a_m_a);
  LongitudinalAction out;
  out.a_x = SafeAccel(self, front, front_accel, clipped, promise.a_m_d, min_gap, limits, dt);
  if (out.a_x < clipped && out.a_x < -promise.a_m_d) out.kind = ActionKind::kExpectedViolation;
  if (violation_decel && -*violation_decel < out.a_x) {
    out.a_x = -*violation_decel;
    out.kind = ActionKind::kUnexpectedViolation;
  }
  return out;
}

double IdmAccel(const VehicleState& self, const std::optional<VehicleState>& front,
                double min_gap, const CarFollowingParams& params) {
  double a = 1.0 - std::pow(std::max(0.0, self.v_x) / params.idm_speed, 4);
  if (front) {
    const double slack = std::max(0.1, front->p_x - self.p_x - min_gap);
    const double wanted =
        std::max(0.0, params.idm_headway * self.v_x +
                          self.v_x * (self.v_x - front->v_x) /
                              (2.0 * std::sqrt(params.idm_accel * params.idm_decel)));
    a -= (wanted / slack) * (wanted / slack);
  }
  return params.idm_accel * a;
}

LongitudinalAction FollowerPolicy(FollowerIntent intent, bool connected, bool ego_interacting,
                                  bool ego_alongside, const VehicleState& self,
                                  const VehicleState& ego, double ego_accel,
                                  const std::optional<VehicleState>& lane_front,
                                  double lane_front_accel, double min_gap,
                                  const MechanicalLimits& limits, double dt,
                                  const CarFollowingParams& params) {
  const bool collaborative = connected || intent == FollowerIntent::kCollaborative;
  LongitudinalAction out;
  if (!ego_interacting) {
    out.a_x = std::clamp(IdmAccel(self, lane_front, min_gap, params), -limits.a_x_d, limits.a_x_a);
  } else if (collaborative) {
    out.a_x = -params.yield_decel;
    out.kind = ActionKind::kYield;
  } else {
    // Close the door: pull up toward a short gap behind the ego.
    const double gap = ego.p_x - self.p_x - min_gap;
    out.a_x = std::clamp(params.block_gain * gap + params.relax_gain * (ego.v_x - self.v_x),
                         -limits.a_x_d, limits.a_x_a);
    out.kind = ActionKind::kBlock;
  }
  if (lane_front) {
    out.a_x = SafeAccel(self, *lane_front, lane_front_accel, out.a_x, limits.a_x_d, min_gap,
                        limits, dt, limits.a_x_d);
  }
  if (ego.p_x > self.p_x) {
    if (ego_interacting && collaborative) {
      out.a_x = SafeAccel(self, ego, -limits.a_x_d, out.a_x, limits.a_x_d, min_gap, limits, dt);
    } else if (ego_alongside) {
      out.a_x = SafeAccel(self, ego, ego_accel, out.a_x, limits.a_x_d, min_gap, limits, dt);
    }
  }
  if (self.v_x <= 0.0) out.a_x = std::max(out.a_x, 0.0);
  return out;
}

AggressivenessLabel AssessAggressiveness(std::span<const FollowerSample> history,
                                         const AssessmentParams& params) {
  const auto n = static_cast<std::size_t>(std::max(1L, std::lround(params.window / params.dt)));
  if (history.size() < n) return AggressivenessLabel::kUnknown;
  const auto window = history.subspan(history.size() - n);
  double mean = 0.0;
  for (const auto& s : window) mean += s.a_x;
  mean /= static_cast<double>(n);
  const double gap_change = window.back().gap_to_ego - window.front().gap_to_ego;
  if (mean <= -params.threshold && gap_change > 0.0) return AggressivenessLabel::kCollaborative;
  if (mean >= params.threshold && gap_change < 0.0) return AggressivenessLabel::kAggressive;
  return AggressivenessLabel::kUnknown;
}

}  // namespace cvlc
