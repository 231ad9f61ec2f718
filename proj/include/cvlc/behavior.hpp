#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "cvlc/evasion.hpp"
#include "cvlc/types.hpp"

namespace cvlc {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One round of the splitmix64 finalizer.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for one (trial, vehicle) pair.
Rng MakeStream(std::uint64_t trial_seed, std::uint64_t stream_id);

/// With probability p_v returns a deceleration magnitude uniform in
/// [lower, upper]; otherwise std::nullopt. Consumes exactly one draw when
/// no violation happens and two otherwise.
std::optional<double> SamplePromiseViolation(Rng& rng, double p_v, double lower, double upper);

struct CarFollowingParams {
  double relax_gain = 0.5;        ///< [1/s] speed relaxation toward the reference
  double desired_speed = 30.0;    ///< [m/s] free-flow reference for the follower
  double yield_decel = 1.5;       ///< [m/s^2] gap-creating braking of a collaborative follower
  double idm_speed = 36.0;        ///< [m/s] IDM free-road speed of the follower
  double idm_headway = 1.0;       ///< [s]
  double idm_accel = 1.5;         ///< [m/s^2]
  double idm_decel = 2.0;         ///< [m/s^2] comfortable braking
  double block_gain = 0.3;        ///< [1/s^2] gap-closing gain of an aggressive follower
};

enum class ActionKind {
  kNominal,
  kExpectedViolation,
  kUnexpectedViolation,
  kEvent,
  kYield,
  kBlock,
};

struct LongitudinalAction {
  double a_x = 0.0;
  ActionKind kind = ActionKind::kNominal;
};

/// Largest acceleration not above `desired` for a rear vehicle that must stay
/// `min_gap` behind `front`. The desired value is kept if, after one period,
/// braking no harder than `reserve_decel` still suffices against the front's
/// current braking (at least `front_decel_floor`); otherwise the rear brakes
/// as hard as needed right now.
double SafeAccel(const VehicleState& self, const VehicleState& front, double front_accel,
                 double desired, double reserve_decel, double min_gap,
                 const MechanicalLimits& limits, double dt, double front_decel_floor = 0.0);

/// Connected leader: speed relaxation toward the front vehicle clipped to the
/// promise band, overridden when the band cannot keep the margin (expected
/// violation) and, when `violation_decel` is set, replaced by a stronger
/// unexpected braking.
LongitudinalAction LeaderPolicy(const VehicleState& self, const VehicleState& front,
                                double front_accel, const ConnectivityPromise& promise,
                                std::optional<double> violation_decel, double min_gap,
                                const MechanicalLimits& limits, double dt,
                                const CarFollowingParams& params = {});

/// Follower in the target lane. `ego_interacting` is true while the ego
/// approaches or overlaps the target lane, `ego_alongside` once the ego's
/// footprint reaches into the follower's lane; `lane_front` is the closest
/// leader ahead in the follower's lane. A collaborative follower keeps room
/// to stop behind the ego even under its hardest braking; an aggressive one
/// only avoids running into the ego once it is alongside.
/// Intelligent driver model on the slack beyond `min_gap`; free road when
/// `front` is empty.
double IdmAccel(const VehicleState& self, const std::optional<VehicleState>& front,
                double min_gap, const CarFollowingParams& params = {});

LongitudinalAction FollowerPolicy(FollowerIntent intent, bool connected, bool ego_interacting,
                                  bool ego_alongside, const VehicleState& self,
                                  const VehicleState& ego, double ego_accel,
                                  const std::optional<VehicleState>& lane_front,
                                  double lane_front_accel, double min_gap,
                                  const MechanicalLimits& limits, double dt,
                                  const CarFollowingParams& params = {});

enum class AggressivenessLabel { kAggressive, kCollaborative, kUnknown };

inline FollowerModel ToFollowerModel(AggressivenessLabel label) {
  return label == AggressivenessLabel::kCollaborative ? FollowerModel::kCollaborative
                                                      : FollowerModel::kAggressive;
}

struct FollowerSample {
  double a_x = 0.0;         ///< follower acceleration during the period
  double gap_to_ego = 0.0;  ///< ego.p_x - follower.p_x at the period start
};

struct AssessmentParams {
  double threshold = 0.3;  ///< [m/s^2]
  double window = 1.0;     ///< [s]
  double dt = 0.1;
};

/// Threshold classifier over the most recent `window` of samples. Fewer
/// samples than one full window yields kUnknown.
AggressivenessLabel AssessAggressiveness(std::span<const FollowerSample> history,
                                         const AssessmentParams& params = {});

}  // namespace cvlc
