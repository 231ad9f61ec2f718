#pragma once

#include <string>

#include "cvlc/types.hpp"

namespace cvlc {

/// Returns `cfg` unchanged if every invariant holds. Throws
/// Error(kInvalidScenario) or Error(kGapTooSmall) otherwise. Gaps are measured
/// bumper to bumper along x for every adjacent pair L_{i+1}/L_i, L_1/ego and
/// ego/F.
const ScenarioConfig& ValidateScenario(const ScenarioConfig& cfg);

/// Parameters of the standard two-lane layout: ego at the origin, leaders
/// ahead in the target lane, follower behind.
struct LayoutParams {
  int n_connected = 5;
  double ego_speed = 30.0;
  double leader_speed = 30.0;
  double follower_speed = 30.0;
  double gap = 20.0;  ///< bumper gap applied to every adjacent pair
  bool with_follower = true;
  bool follower_connected = false;
  FollowerIntent follower_intent = FollowerIntent::kAggressive;
  bool human_driven_leaders = false;
  double promise_decel = kDefaultPromiseDecel;
  double promise_accel = kDefaultPromiseAccel;
  double event_decel = 6.0;
  double trigger_time = 1.0;
  double p_v = 0.0;
  double dt = 0.1;
  double horizon = 10.0;
  MechanicalLimits limits;
  LaneGeometry geometry;
};

ScenarioConfig MakeScenario(const LayoutParams& params);

std::string ScenarioToJson(const ScenarioConfig& cfg);
ScenarioConfig ScenarioFromJson(const std::string& text);
ScenarioConfig LoadScenario(const std::string& path);

}  // namespace cvlc
