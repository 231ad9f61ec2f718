#pragma once

#include <optional>
#include <vector>

namespace cvlc {

/// Longitudinal/lateral kinematic state of one vehicle. Lateral frame: the
/// original lane center is y = 0, the target lane center is y = lane width.
struct VehicleState {
  double p_x = 0.0;  ///< [m]
  double v_x = 0.0;  ///< [m/s], never negative
  double p_y = 0.0;  ///< [m]
  double v_y = 0.0;  ///< [m/s]

  bool operator==(const VehicleState&) const = default;
};

struct MechanicalLimits {
  double a_x_d = 6.0;  ///< [m/s^2] max longitudinal deceleration (magnitude)
  double a_x_a = 3.0;  ///< [m/s^2] max longitudinal acceleration
  double a_y_m = 2.0;  ///< [m/s^2] max lateral acceleration (magnitude)

  bool operator==(const MechanicalLimits&) const = default;
};

struct LaneGeometry {
  double w_l = 3.5;  ///< [m] lane width
  double w_v = 2.0;  ///< [m] vehicle width
  double l_v = 4.5;  ///< [m] vehicle length
  double p_m = 2.0;  ///< [m] minimum bumper-to-bumper gap

  /// Lateral position at which the ego is fully back inside the original lane.
  double retreat_target() const { return 0.5 * (w_l - w_v); }
  /// Required separation between vehicle centers in the same lane.
  double center_margin() const { return p_m + l_v; }

  bool operator==(const LaneGeometry&) const = default;
};

inline constexpr double kDefaultPromiseDecel = 0.5;
inline constexpr double kDefaultPromiseAccel = 2.0;
inline constexpr double kHumanPromiseWidening = 1.5;

/// Broadcast acceleration band [-a_m_d, a_m_a] of a connected vehicle.
struct ConnectivityPromise {
  double a_m_d = kDefaultPromiseDecel;
  double a_m_a = kDefaultPromiseAccel;

  bool operator==(const ConnectivityPromise&) const = default;
};

/// Default promise band; human-driven vehicles advertise a wider one.
ConnectivityPromise DefaultPromise(bool human_driven);

enum class VehicleRole { kLeader, kFollower };

/// Ground-truth intention of the follower, used by the simulation only.
enum class FollowerIntent { kCollaborative, kAggressive };

struct SurroundingVehicle {
  VehicleState state;
  bool connected = false;
  std::optional<ConnectivityPromise> promise;
  VehicleRole role = VehicleRole::kLeader;
  int leader_index = 0;  ///< 1..N+1 for leaders, 0 for the follower
  bool human_driven = false;
  FollowerIntent intent = FollowerIntent::kAggressive;

  bool operator==(const SurroundingVehicle&) const = default;
};

struct EventSpec {
  double trigger_time = 1.0;  ///< [s]
  double decel = 6.0;         ///< [m/s^2] braking of the non-connected leader

  bool operator==(const EventSpec&) const = default;
};

struct ScenarioConfig {
  VehicleState ego;
  std::vector<SurroundingVehicle> surroundings;
  MechanicalLimits limits;
  LaneGeometry geometry;
  int n_connected_leaders = 0;
  EventSpec event;
  double p_v = 0.0;
  double dt = 0.1;
  double horizon = 10.0;

  bool operator==(const ScenarioConfig&) const = default;

  /// Leaders sorted by index 1..N+1.
  std::vector<const SurroundingVehicle*> leaders() const;
  const SurroundingVehicle* follower() const;
};

/// (a_x, a_y) command for one control period.
struct Command {
  double a_x = 0.0;
  double a_y = 0.0;

  bool operator==(const Command&) const = default;
};

}  // namespace cvlc
