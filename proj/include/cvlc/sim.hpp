#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cvlc/behavior.hpp"
#include "cvlc/decision.hpp"
#include "cvlc/planner.hpp"
#include "cvlc/types.hpp"
#include "cvlc/worst_case.hpp"

namespace cvlc {

enum class PlannerMode { kCvAll, kCvFollow, kCvNone, kNoAggAssess };

std::string_view ToString(PlannerMode mode);
/// Accepts "CV_all", "CV_follow", "CV_none", "No_agg_assess". Throws
/// Error(kInvalidConfig) otherwise.
PlannerMode ParsePlannerMode(std::string_view name);

inline constexpr PlannerMode kAllModes[] = {PlannerMode::kCvAll, PlannerMode::kCvFollow,
                                            PlannerMode::kCvNone, PlannerMode::kNoAggAssess};

/// Ground-truth positions of every vehicle at one instant.
struct WorldSnapshot {
  VehicleState ego;
  std::vector<VehicleState> leaders;  ///< L_1..L_{N+1}
  std::vector<std::optional<ConnectivityPromise>> promises;  ///< per leader, absent if not connected
  std::optional<VehicleState> follower;
  bool follower_connected = false;
};

/// State at t = 0. Connected leaders without an explicit promise get the
/// default band.
WorldSnapshot InitialSnapshot(const ScenarioConfig& cfg);

/// Chain over every promise in `world`, seeded with the event deceleration.
ChainResult WorldChain(const WorldSnapshot& world, const ScenarioConfig& cfg,
                       ChainMode mode = ChainMode::kKinematicConsistent);

struct MaskedView {
  Observation observation;
  CertificationInput certification;
  /// Worst-case decelerations as modeled in this mode, index 0 = furthest.
  std::vector<double> assumed_decels;
};

/// Applies the mode's information access. `world_chain` is the chain over
/// all promises seeded with the event deceleration; only CV_all uses it.
MaskedView MaskObservation(PlannerMode mode, const WorldSnapshot& world,
                           const ChainResult& world_chain, AggressivenessLabel assessed,
                           const ScenarioConfig& cfg,
                           FollowerCheckMode follower_mode = FollowerCheckMode::kStrict);

/// Axis-aligned l_v x w_v rectangles centered on each state.
bool Overlaps(const VehicleState& a, const VehicleState& b, const LaneGeometry& geometry);
bool DetectCollision(const std::vector<VehicleState>& states, const LaneGeometry& geometry);

struct SuccessCheck {
  bool success = false;
  std::optional<double> completion_time;
};

/// First crossing of y = w_l / 2 by the ego center, linearly interpolated
/// within the sampling period. `times` and `ego_y` are parallel.
SuccessCheck CheckSuccess(const std::vector<double>& times, const std::vector<double>& ego_y,
                          bool collided, const LaneGeometry& geometry, double horizon);

struct SimOptions {
  bool record_trajectory = false;
  bool allow_reattempt = true;
  ChainMode chain_mode = ChainMode::kKinematicConsistent;
  FollowerCheckMode follower_mode = FollowerCheckMode::kStrict;
  AssessmentParams assessment;
  CarFollowingParams car_following;
};

struct TrajectoryRow {
  double t = 0.0;
  std::string vehicle_id;
  VehicleState state;
  double a_x = 0.0;
  double a_y = 0.0;
  std::string behavior;
};

/// Per-trial decision audit counters.
struct DecisionAudit {
  int steps = 0;
  int proceed = 0;
  int hesitate = 0;
  int aborts = 0;
  /// A lower-preference behavior chosen while a higher one was certified.
  int preference_violations = 0;
  /// Abort requested while the stored plan could not be followed.
  int abort_unexecutable = 0;
  int expected_violations = 0;
  int unexpected_violations = 0;
  /// Connected leader outside its promise band without an override.
  int promise_breaches = 0;
};

struct TrialResult {
  bool success = false;
  bool collision = false;
  std::optional<double> completion_time;
  int abort_count = 0;  ///< number of Abort episodes
  DecisionAudit audit;
  std::vector<TrajectoryRow> trajectory;
};

TrialResult RunTrial(const ScenarioConfig& cfg, PlannerMode mode, const PlannerSpec& spec,
                     std::uint64_t seed, const SimOptions& options = {});

void WriteTrajectoryCsv(const std::vector<TrajectoryRow>& rows, std::ostream& out);

}  // namespace cvlc
