#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cvlc/types.hpp"

namespace cvlc {

/// How the two closed-form branches of the minimal-deceleration
/// relation are evaluated.
enum class ChainMode {
  /// Velocity-match branch with coefficient 3/2,
  /// no certification against exact kinematics.
  kUncertifiedThreeHalves,
  /// Velocity-match branch with coefficient 1/2, then certified against the
  /// exact minimum-gap function with a bisection fallback.
  kKinematicConsistent,
};

/// Minimum over t >= 0 of leader(t) - follower(t), both braking at constant
/// magnitudes until standstill (zero magnitude means constant speed).
double MinGapUnderBraking(const VehicleState& leader, double leader_decel,
                          const VehicleState& follower, double follower_decel);

/// Minimal constant deceleration magnitude of `follower` keeping the gap to
/// `leader` (braking at `leader_decel` until stop) at or above `min_gap`.
/// Returns std::nullopt when no value in [0, max_decel] works.
std::optional<double> TryRequiredDecel(const VehicleState& leader, const VehicleState& follower,
                                       double leader_decel, double min_gap, double max_decel,
                                       ChainMode mode = ChainMode::kKinematicConsistent);

/// Throwing variant; Error(kInfeasible) when the margin cannot be kept.
double RequiredDecel(const VehicleState& leader, const VehicleState& follower,
                     double leader_decel, double min_gap, double max_decel,
                     ChainMode mode = ChainMode::kKinematicConsistent);

inline double ApplyPromiseFloor(double required, const ConnectivityPromise& promise) {
  return required > promise.a_m_d ? required : promise.a_m_d;
}

struct ChainLink {
  VehicleState state;
  std::optional<ConnectivityPromise> promise;  ///< absent for L_{N+1}
};

/// Worst-case decelerations ordered from L_{N+1} down to L_1.
struct ChainResult {
  std::vector<double> decels;    ///< a_{x,i,d}, index 0 is L_{N+1}
  std::vector<double> required;  ///< z_{x,i,d} before the floor; index 0 mirrors the seed
  /// 1-based leader index where the margin could not be kept, 0 if none.
  int broken_at = 0;

  double leader_decel() const { return decels.back(); }
  /// a_{x,i,d} for leader index i in 1..N+1.
  double decel_of(int i) const { return decels[decels.size() - static_cast<std::size_t>(i)]; }
  double required_of(int i) const {
    return required[required.size() - static_cast<std::size_t>(i)];
  }
};

/// Propagates the seed braking of L_{N+1} down to L_1. `leaders` are ordered
/// L_1..L_{N+1}. Throws Error(kInfeasible) naming the leader index where the
/// chain breaks.
ChainResult PropagateChain(std::span<const ChainLink> leaders, double event_decel,
                           double min_gap, const MechanicalLimits& limits,
                           ChainMode mode = ChainMode::kKinematicConsistent);

/// Non-throwing variant: once the chain breaks at leader i, L_i..L_1 are
/// assumed to brake at a_x_d and `broken_at` is set.
ChainResult PropagateChainSaturating(std::span<const ChainLink> leaders, double event_decel,
                                     double min_gap, const MechanicalLimits& limits,
                                     ChainMode mode = ChainMode::kKinematicConsistent);

/// Braking-to-stop envelope of a leader: never moves back past its stop point.
inline double LeaderPositionAt(const VehicleState& leader, double decel, double t) {
  if (decel <= 0.0 || t <= leader.v_x / decel) {
    return leader.p_x + leader.v_x * t - 0.5 * decel * t * t;
  }
  return leader.p_x + leader.v_x * leader.v_x / (2.0 * decel);
}

inline double LeaderVelocityAt(const VehicleState& leader, double decel, double t) {
  const double v = leader.v_x - decel * t;
  return v > 0.0 ? v : 0.0;
}

}  // namespace cvlc
