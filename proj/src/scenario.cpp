#include "cvlc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cvlc/error.hpp"
#include "json.hpp"

namespace cvlc {

using nlohmann::json;

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kGapTooSmall: return "GapTooSmall";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kEvasionInfeasible: return "EvasionInfeasible";
    case ErrorCode::kPlanExhausted: return "PlanExhausted";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyResults: return "EmptyResults";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

ConnectivityPromise DefaultPromise(bool human_driven) {
  const double k = human_driven ? kHumanPromiseWidening : 1.0;
  return {kDefaultPromiseDecel * k, kDefaultPromiseAccel * k};
}

std::vector<const SurroundingVehicle*> ScenarioConfig::leaders() const {
  std::vector<const SurroundingVehicle*> out;
  for (const auto& s : surroundings) {
    if (s.role == VehicleRole::kLeader) out.push_back(&s);
  }
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return a->leader_index < b->leader_index;
  });
  return out;
}

const SurroundingVehicle* ScenarioConfig::follower() const {
  for (const auto& s : surroundings) {
    if (s.role == VehicleRole::kFollower) return &s;
  }
  return nullptr;
}

namespace {

[[noreturn]] void Invalid(const std::string& why) {
  throw Error(ErrorCode::kInvalidScenario, why);
}

bool Finite(const VehicleState& s) {
  return std::isfinite(s.p_x) && std::isfinite(s.v_x) && std::isfinite(s.p_y) &&
         std::isfinite(s.v_y);
}

void CheckState(const VehicleState& s, const std::string& who) {
  if (!Finite(s)) Invalid(who + " state is not finite");
  if (s.v_x < 0.0) Invalid(who + " has negative longitudinal velocity");
}

void CheckGap(double rear_x, double front_x, const LaneGeometry& g,
              const std::string& pair) {
  const double gap = front_x - rear_x - g.l_v;
  if (gap < g.p_m) {
    std::ostringstream os;
    os << "gap " << pair << " is " << gap << " m < p_m " << g.p_m;
    throw Error(ErrorCode::kGapTooSmall, os.str());
  }
}

}  // namespace

const ScenarioConfig& ValidateScenario(const ScenarioConfig& cfg) {
  const auto& lim = cfg.limits;
  const auto& g = cfg.geometry;
  if (!(lim.a_x_d > 0.0 && lim.a_x_a > 0.0 && lim.a_y_m > 0.0)) {
    Invalid("mechanical limits must be strictly positive");
  }
  if (!(g.w_v > 0.0 && g.w_v < g.w_l)) Invalid("require 0 < w_v < w_l");
  if (!(g.l_v > 0.0)) Invalid("require l_v > 0");
  if (!(g.p_m > 0.0)) Invalid("require p_m > 0");
  if (!(cfg.dt > 0.0)) Invalid("require dt > 0");
  if (!(cfg.horizon >= cfg.dt)) Invalid("require horizon >= dt");
  if (!(cfg.p_v >= 0.0 && cfg.p_v <= 1.0)) Invalid("require 0 <= p_v <= 1");
  if (!(cfg.event.decel >= 0.0 && cfg.event.decel <= lim.a_x_d)) {
    Invalid("event decel must lie in [0, a_x_d]");
  }
  if (!(cfg.event.trigger_time >= 0.0)) Invalid("trigger_time must be >= 0");
  CheckState(cfg.ego, "ego");

  int n_followers = 0;
  int n_connected_leaders = 0;
  for (const auto& s : cfg.surroundings) {
    CheckState(s.state, "surrounding vehicle");
    if (s.connected != s.promise.has_value()) {
      Invalid("promise must be present iff the vehicle is connected");
    }
    if (s.promise) {
      if (s.promise->a_m_d < 0.0 || s.promise->a_m_a < 0.0) {
        Invalid("promise bounds must be non-negative");
      }
      if (s.promise->a_m_d > lim.a_x_d) Invalid("promise a_m_d exceeds a_x_d");
    }
    if (s.role == VehicleRole::kFollower) {
      ++n_followers;
    } else if (s.connected) {
      ++n_connected_leaders;
    }
  }
  if (n_followers > 1) Invalid("at most one follower is supported");

  const auto leaders = cfg.leaders();
  const int n = cfg.n_connected_leaders;
  if (n < 0) Invalid("n_connected_leaders must be >= 0");
  if (static_cast<int>(leaders.size()) != n + 1) {
    Invalid("expected exactly N+1 leaders");
  }
  if (n_connected_leaders != n) Invalid("N must equal the number of connected leaders");
  for (int i = 0; i <= n; ++i) {
    if (leaders[i]->leader_index != i + 1) Invalid("leader indices must be 1..N+1");
    const bool last = i == n;
    if (last == leaders[i]->connected) {
      Invalid("L_1..L_N must be connected and L_{N+1} non-connected");
    }
  }
  for (int i = 0; i + 1 < static_cast<int>(leaders.size()); ++i) {
    if (!(leaders[i + 1]->state.p_x > leaders[i]->state.p_x)) {
      Invalid("leaders must have strictly increasing p_x");
    }
  }

  for (int i = 0; i + 1 < static_cast<int>(leaders.size()); ++i) {
    CheckGap(leaders[i]->state.p_x, leaders[i + 1]->state.p_x, g,
             "L" + std::to_string(i + 1) + "->L" + std::to_string(i + 2));
  }
  CheckGap(cfg.ego.p_x, leaders[0]->state.p_x, g, "ego->L1");
  if (const auto* f = cfg.follower()) {
    CheckGap(f->state.p_x, cfg.ego.p_x, g, "F->ego");
  }
  return cfg;
}

ScenarioConfig MakeScenario(const LayoutParams& p) {
  ScenarioConfig cfg;
  cfg.limits = p.limits;
  cfg.geometry = p.geometry;
  cfg.n_connected_leaders = p.n_connected;
  cfg.event = {p.trigger_time, p.event_decel};
  cfg.p_v = p.p_v;
  cfg.dt = p.dt;
  cfg.horizon = p.horizon;
  cfg.ego = {0.0, p.ego_speed, 0.0, 0.0};

  const double pitch = p.gap + p.geometry.l_v;
  const double lane_y = p.geometry.w_l;
  for (int i = 1; i <= p.n_connected + 1; ++i) {
    SurroundingVehicle s;
    s.role = VehicleRole::kLeader;
    s.leader_index = i;
    s.state = {pitch * i, p.leader_speed, lane_y, 0.0};
    s.connected = i <= p.n_connected;
    s.human_driven = p.human_driven_leaders;
    if (s.connected) {
      const double k = s.human_driven ? kHumanPromiseWidening : 1.0;
      s.promise = ConnectivityPromise{std::min(p.promise_decel * k, p.limits.a_x_d),
                                      p.promise_accel * k};
    }
    cfg.surroundings.push_back(s);
  }
  if (p.with_follower) {
    SurroundingVehicle f;
    f.role = VehicleRole::kFollower;
    f.state = {-pitch, p.follower_speed, lane_y, 0.0};
    f.connected = p.follower_connected;
    if (f.connected) f.promise = DefaultPromise(false);
    f.intent = f.connected ? FollowerIntent::kCollaborative : p.follower_intent;
    cfg.surroundings.push_back(f);
  }
  return cfg;
}

namespace {

json StateJson(const VehicleState& s) {
  return {{"p_x", s.p_x}, {"v_x", s.v_x}, {"p_y", s.p_y}, {"v_y", s.v_y}};
}

VehicleState StateFrom(const json& j) {
  return {j.at("p_x").get<double>(), j.at("v_x").get<double>(),
          j.value("p_y", 0.0), j.value("v_y", 0.0)};
}

}  // namespace

std::string ScenarioToJson(const ScenarioConfig& cfg) {
  json j;
  j["ego"] = StateJson(cfg.ego);
  json surr = json::array();
  for (const auto& s : cfg.surroundings) {
    json v;
    v["state"] = StateJson(s.state);
    v["connected"] = s.connected;
    if (s.promise) {
      v["promise"] = {{"a_m_d", s.promise->a_m_d}, {"a_m_a", s.promise->a_m_a}};
    }
    if (s.role == VehicleRole::kLeader) {
      v["role"] = {{"leader", s.leader_index}};
    } else {
      v["role"] = "follower";
      v["intent"] = s.intent == FollowerIntent::kAggressive ? "aggressive" : "collaborative";
    }
    v["human_driven"] = s.human_driven;
    surr.push_back(v);
  }
  j["surroundings"] = surr;
  j["limits"] = {{"a_x_d", cfg.limits.a_x_d},
                 {"a_x_a", cfg.limits.a_x_a},
                 {"a_y_m", cfg.limits.a_y_m}};
  j["geometry"] = {{"w_l", cfg.geometry.w_l},
                   {"w_v", cfg.geometry.w_v},
                   {"l_v", cfg.geometry.l_v},
                   {"p_m", cfg.geometry.p_m}};
  j["n_connected_leaders"] = cfg.n_connected_leaders;
  j["event"] = {{"trigger_time", cfg.event.trigger_time}, {"decel", cfg.event.decel}};
  j["p_v"] = cfg.p_v;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  return j.dump(2);
}

ScenarioConfig ScenarioFromJson(const std::string& text) {
  ScenarioConfig cfg;
  try {
    const json j = json::parse(text);
    cfg.ego = StateFrom(j.at("ego"));
    for (const auto& v : j.at("surroundings")) {
      SurroundingVehicle s;
      s.state = StateFrom(v.at("state"));
      s.connected = v.value("connected", false);
      if (v.contains("promise")) {
        s.promise = ConnectivityPromise{v["promise"].at("a_m_d").get<double>(),
                                        v["promise"].at("a_m_a").get<double>()};
      }
      s.human_driven = v.value("human_driven", false);
      if (s.connected && !s.promise) s.promise = DefaultPromise(s.human_driven);
      const auto& role = v.at("role");
      if (role.is_string()) {
        if (role.get<std::string>() != "follower") {
          throw Error(ErrorCode::kInvalidScenario, "unknown role");
        }
        s.role = VehicleRole::kFollower;
        const std::string intent = v.value("intent", std::string("aggressive"));
        if (intent != "aggressive" && intent != "collaborative") {
          throw Error(ErrorCode::kInvalidScenario, "unknown follower intent " + intent);
        }
        s.intent = (s.connected || intent == "collaborative")
                       ? FollowerIntent::kCollaborative
                       : FollowerIntent::kAggressive;
      } else {
        s.role = VehicleRole::kLeader;
        s.leader_index = role.at("leader").get<int>();
      }
      cfg.surroundings.push_back(s);
    }
    if (j.contains("limits")) {
      const auto& l = j["limits"];
      cfg.limits = {l.value("a_x_d", 6.0), l.value("a_x_a", 3.0), l.value("a_y_m", 2.0)};
    }
    if (j.contains("geometry")) {
      const auto& g = j["geometry"];
      cfg.geometry = {g.value("w_l", 3.5), g.value("w_v", 2.0), g.value("l_v", 4.5),
                      g.value("p_m", 2.0)};
    }
    cfg.n_connected_leaders = j.at("n_connected_leaders").get<int>();
    if (j.contains("event")) {
      cfg.event = {j["event"].value("trigger_time", 1.0), j["event"].value("decel", 6.0)};
    }
    cfg.p_v = j.value("p_v", 0.0);
    cfg.dt = j.value("dt", 0.1);
    cfg.horizon = j.value("horizon", 10.0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidScenario, std::string("malformed scenario: ") + e.what());
  }
  return cfg;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ScenarioFromJson(ss.str());
}

}  // namespace cvlc
