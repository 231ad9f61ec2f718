#include "cvlc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "cvlc/error.hpp"

namespace cvlc {

namespace {

double Activate(Activation act, double x) {
  switch (act) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::kIdentity:
      break;
  }
  return x;
}

Activation ParseActivation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kReLU;
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  throw Error(ErrorCode::kInvalidConfig, "unknown activation '" + std::string(name) + "'");
}

}  // namespace

void ValidateNetwork(const NetworkWeights& w) {
  if (w.layers.empty()) throw Error(ErrorCode::kShapeMismatch, "network has no layers");
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    const DenseLayer& layer = w.layers[i];
    const std::string where = "layer " + std::to_string(i);
    if (layer.rows <= 0 || layer.cols <= 0 ||
        layer.weights.size() != static_cast<std::size_t>(layer.rows * layer.cols) ||
        layer.bias.size() != static_cast<std::size_t>(layer.rows)) {
      throw Error(ErrorCode::kShapeMismatch, where + ": inconsistent matrix/bias sizes");
    }
    if (i > 0 && layer.cols != w.layers[i - 1].rows) {
      throw Error(ErrorCode::kShapeMismatch,
                  where + ": expects " + std::to_string(layer.cols) + " inputs, previous has " +
                      std::to_string(w.layers[i - 1].rows) + " outputs");
    }
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw Error(ErrorCode::kShapeMismatch, where + ": non-finite entry");
    }
  }
}

std::vector<double> MlpForward(const NetworkWeights& w, const std::vector<double>& input) {
  if (w.layers.empty() || static_cast<int>(input.size()) != w.input_size()) {
    throw Error(ErrorCode::kShapeMismatch, "input length " + std::to_string(input.size()) +
                                               " does not match network input " +
                                               std::to_string(w.input_size()));
  }
  std::vector<double> x = input;
  std::vector<double> y;
  for (const DenseLayer& layer : w.layers) {
    if (static_cast<int>(x.size()) != layer.cols) {
      throw Error(ErrorCode::kShapeMismatch, "layer dimensions do not chain");
    }
    y.assign(static_cast<std::size_t>(layer.rows), 0.0);
    for (int r = 0; r < layer.rows; ++r) {
      const double* row = layer.weights.data() + static_cast<std::ptrdiff_t>(r) * layer.cols;
      double acc = layer.bias[static_cast<std::size_t>(r)];
      for (int c = 0; c < layer.cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = Activate(layer.activation, acc);
    }
    x.swap(y);
  }
  return x;
}

NetworkWeights NetworkWeightsFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("weights: ") + e.what());
  }
  NetworkWeights w;
  try {
    for (const auto& jl : j.at("layers")) {
      DenseLayer layer;
      const auto& m = jl.at("weights");
      layer.rows = static_cast<int>(m.size());
      layer.cols = layer.rows > 0 ? static_cast<int>(m.at(0).size()) : 0;
      for (const auto& row : m) {
        if (static_cast<int>(row.size()) != layer.cols) {
          throw Error(ErrorCode::kShapeMismatch, "weights: ragged matrix rows");
        }
        for (const auto& v : row) layer.weights.push_back(v.get<double>());
      }
      layer.bias = jl.at("bias").get<std::vector<double>>();
      layer.activation = ParseActivation(jl.value("activation", std::string("identity")));
      w.layers.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("weights: ") + e.what());
  }
  ValidateNetwork(w);
  return w;
}

NetworkWeights LoadNetworkWeights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open weights file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return NetworkWeightsFromJson(ss.str());
}

std::array<double, Observation::kSize> Observation::ToVector() const {
  return {gap_leader, dv_leader, gap_follower, dv_follower, p_y, v_y, v_x, leader_decel,
          follower_aggressive ? 1.0 : -1.0};
}

void ValidatePlanner(const PlannerSpec& spec) {
  if (spec.kind == PlannerKind::kRuleBased) return;
  if (!spec.network) throw Error(ErrorCode::kShapeMismatch, "network planner without weights");
  ValidateNetwork(*spec.network);
  if (spec.network->input_size() != Observation::kSize) {
    throw Error(ErrorCode::kShapeMismatch,
                "network input must have " + std::to_string(Observation::kSize) + " entries");
  }
  if (spec.network->output_size() < 2) {
    throw Error(ErrorCode::kShapeMismatch, "network must output at least (a_x, a_y)");
  }
}

Command BaselineLaneChange(const Observation& obs, const LaneGeometry& geometry,
                           const MechanicalLimits& limits, double dt,
                           const RuleBasedParams& params) {
  Command cmd;
  const double err = geometry.w_l - obs.p_y;
  const double v_ref = std::copysign(
      std::min(params.lateral_speed, std::sqrt(2.0 * limits.a_y_m * std::abs(err))), err);
  cmd.a_y = std::clamp((v_ref - obs.v_y) / dt, -limits.a_y_m, limits.a_y_m);
  const double desired_gap = geometry.p_m + params.time_headway * obs.v_x;
  cmd.a_x = params.gap_gain * (obs.gap_leader - desired_gap) + params.speed_gain * obs.dv_leader;
  return cmd;
}

Command ClampCommand(const Command& cmd, const MechanicalLimits& limits) {
  return {std::clamp(cmd.a_x, -limits.a_x_d, limits.a_x_a),
          std::clamp(cmd.a_y, -limits.a_y_m, limits.a_y_m)};
}

Command Plan(const PlannerSpec& spec, const Observation& obs, const LaneGeometry& geometry,
             const MechanicalLimits& limits, double dt) {
  Command cmd;
  if (spec.kind == PlannerKind::kNetwork && spec.network) {
    const auto v = obs.ToVector();
    const auto out = MlpForward(*spec.network, std::vector<double>(v.begin(), v.end()));
    cmd = {out.at(0), out.at(1)};
    // NaN would pass through clamp unchanged.
    if (!std::isfinite(cmd.a_x)) cmd.a_x = 0.0;
    if (!std::isfinite(cmd.a_y)) cmd.a_y = 0.0;
  } else {
    cmd = BaselineLaneChange(obs, geometry, limits, dt, spec.params);
  }
  return ClampCommand(cmd, limits);
}

}  // namespace cvlc
