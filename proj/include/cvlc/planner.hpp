#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cvlc/types.hpp"

namespace cvlc {

enum class Activation { kTanh, kReLU, kIdentity };

struct DenseLayer {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;  ///< row-major rows x cols
  std::vector<double> bias;     ///< rows
  Activation activation = Activation::kIdentity;
};

struct NetworkWeights {
  std::vector<DenseLayer> layers;

  int input_size() const { return layers.empty() ? 0 : layers.front().cols; }
  int output_size() const { return layers.empty() ? 0 : layers.back().rows; }
};

/// Throws Error(kShapeMismatch) if layer dimensions do not chain or entries
/// are not finite.
void ValidateNetwork(const NetworkWeights& weights);

/// Sequential affine + activation evaluation. Throws Error(kShapeMismatch)
/// when the input length differs from the first layer's column count.
std::vector<double> MlpForward(const NetworkWeights& weights, const std::vector<double>& input);

/// JSON: {"layers": [{"weights": [[...], ...], "bias": [...],
/// "activation": "tanh" | "relu" | "identity"}, ...]}
NetworkWeights NetworkWeightsFromJson(const std::string& text);
NetworkWeights LoadNetworkWeights(const std::string& path);

/// What the ego's planner sees after information masking.
struct Observation {
  double gap_leader = 1e3;    ///< bumper gap to L_1 [m]
  double dv_leader = 0.0;     ///< v(L_1) - v(ego)
  double gap_follower = 1e3;  ///< bumper gap ego to F [m]
  double dv_follower = 0.0;   ///< v(ego) - v(F)
  double p_y = 0.0;
  double v_y = 0.0;
  double v_x = 0.0;
  double leader_decel = 0.0;  ///< worst-case braking assumed for L_1
  bool follower_aggressive = true;

  static constexpr int kSize = 9;
  std::array<double, kSize> ToVector() const;
};

struct RuleBasedParams {
  double lateral_speed = 0.6;  ///< [m/s] cap on the lateral approach speed
  double gap_gain = 0.2;       ///< [1/s^2]
  double speed_gain = 0.6;     ///< [1/s]
  double time_headway = 0.6;   ///< [s]
};

enum class PlannerKind { kRuleBased, kNetwork };

struct PlannerSpec {
  PlannerKind kind = PlannerKind::kRuleBased;
  std::optional<NetworkWeights> network;
  RuleBasedParams params;
};

/// Throws Error(kShapeMismatch) when a network planner lacks weights, its
/// input does not match the observation, or it has fewer than two outputs.
void ValidatePlanner(const PlannerSpec& spec);

/// Trapezoidal lateral approach to the target lane center and proportional
/// gap/speed tracking behind L_1. Not clamped.
Command BaselineLaneChange(const Observation& obs, const LaneGeometry& geometry,
                           const MechanicalLimits& limits, double dt,
                           const RuleBasedParams& params = {});

/// Planner command clamped to the mechanical limits. Network planners use the
/// first two outputs as (a_x, a_y).
Command Plan(const PlannerSpec& spec, const Observation& obs, const LaneGeometry& geometry,
             const MechanicalLimits& limits, double dt);

Command ClampCommand(const Command& cmd, const MechanicalLimits& limits);

}  // namespace cvlc
