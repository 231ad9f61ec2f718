#include "cvlc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cvlc/error.hpp"
#include "cvlc/kinematics.hpp"
#include "cvlc/scenario.hpp"

namespace cvlc {

std::string_view ToString(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kCvAll:
      return "CV_all";
    case PlannerMode::kCvFollow:
      return "CV_follow";
    case PlannerMode::kCvNone:
      return "CV_none";
    case PlannerMode::kNoAggAssess:
      return "No_agg_assess";
  }
  return "?";
}

PlannerMode ParsePlannerMode(std::string_view name) {
  for (PlannerMode m : kAllModes) {
    if (ToString(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown planner mode '" + std::string(name) +
                  "' (expected CV_all, CV_follow, CV_none or No_agg_assess)");
}

MaskedView MaskObservation(PlannerMode mode, const WorldSnapshot& world,
                           const ChainResult& world_chain, AggressivenessLabel assessed,
                           const ScenarioConfig& cfg, FollowerCheckMode follower_mode) {
  MaskedView view;
  // Without leader promises the ego can only bound L_1 by the mechanical limit.
  if (mode == PlannerMode::kCvAll) {
    view.assumed_decels = world_chain.decels;
  } else {
    view.assumed_decels = {cfg.limits.a_x_d};
  }

  FollowerModel model = FollowerModel::kAbsent;
  if (world.follower) {
    switch (mode) {
      case PlannerMode::kCvAll:
      case PlannerMode::kCvFollow:
        model = world.follower_connected ? FollowerModel::kCollaborative
                                         : ToFollowerModel(assessed);
        break;
      case PlannerMode::kCvNone:
        model = ToFollowerModel(assessed);
        break;
      case PlannerMode::kNoAggAssess:
        model = FollowerModel::kAggressive;
        break;
    }
  }

  const double l_v = cfg.geometry.l_v;
  const VehicleState& l1 = world.leaders.front();
  Observation& obs = view.observation;
  obs.gap_leader = l1.p_x - world.ego.p_x - l_v;
  obs.dv_leader = l1.v_x - world.ego.v_x;
  if (world.follower) {
    obs.gap_follower = world.ego.p_x - world.follower->p_x - l_v;
    obs.dv_follower = world.ego.v_x - world.follower->v_x;
  }
  obs.p_y = world.ego.p_y;
  obs.v_y = world.ego.v_y;
  obs.v_x = world.ego.v_x;
  obs.leader_decel = view.assumed_decels.back();
  obs.follower_aggressive = model != FollowerModel::kCollaborative;

  CertificationInput& c = view.certification;
  c.leader = l1;
  c.leader_decel = view.assumed_decels.back();
  c.follower = world.follower;
  c.follower_model = model;
  c.ctx = {cfg.limits, cfg.geometry, cfg.geometry.center_margin(), follower_mode};
  c.dt = cfg.dt;
  return view;
}

bool Overlaps(const VehicleState& a, const VehicleState& b, const LaneGeometry& g) {
  return std::abs(a.p_x - b.p_x) < g.l_v && std::abs(a.p_y - b.p_y) < g.w_v;
}

bool DetectCollision(const std::vector<VehicleState>& states, const LaneGeometry& geometry) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (Overlaps(states[i], states[j], geometry)) return true;
    }
  }
  return false;
}

SuccessCheck CheckSuccess(const std::vector<double>& times, const std::vector<double>& ego_y,
                          bool collided, const LaneGeometry& geometry, double horizon) {
  SuccessCheck out;
  if (collided || times.empty()) return out;
  const double border = 0.5 * geometry.w_l;
  if (ego_y.front() >= border) {
    out.success = true;
    out.completion_time = times.front();
    return out;
  }
  for (std::size_t k = 1; k < times.size() && times[k - 1] < horizon; ++k) {
    if (ego_y[k] >= border) {
      const double frac = (border - ego_y[k - 1]) / (ego_y[k] - ego_y[k - 1]);
      const double t = times[k - 1] + frac * (times[k] - times[k - 1]);
      if (t > horizon) break;
      out.success = true;
      out.completion_time = t;
      return out;
    }
  }
  return out;
}

namespace {

std::string_view BehaviorName(Behavior b) {
  switch (b) {
    case Behavior::kProceed:
      return "proceed";
    case Behavior::kHesitate:
      return "hesitate";
    case Behavior::kAbort:
      return "abort";
  }
  return "?";
}

std::string_view ActionName(ActionKind k) {
  switch (k) {
    case ActionKind::kNominal:
      return "nominal";
    case ActionKind::kExpectedViolation:
      return "expected_violation";
    case ActionKind::kUnexpectedViolation:
      return "unexpected_violation";
    case ActionKind::kEvent:
      return "event";
    case ActionKind::kYield:
      return "yield";
    case ActionKind::kBlock:
      return "block";
  }
  return "?";
}

}  // namespace

WorldSnapshot InitialSnapshot(const ScenarioConfig& cfg) {
  WorldSnapshot world;
  world.ego = cfg.ego;
  for (const auto* l : cfg.leaders()) {
    world.leaders.push_back(l->state);
    world.promises.push_back(l->connected ? std::optional(l->promise.value_or(
                                                DefaultPromise(l->human_driven)))
                                          : std::nullopt);
  }
  if (const SurroundingVehicle* f = cfg.follower()) {
    world.follower = f->state;
    world.follower_connected = f->connected;
  }
  return world;
}

ChainResult WorldChain(const WorldSnapshot& world, const ScenarioConfig& cfg, ChainMode mode) {
  std::vector<ChainLink> links(world.leaders.size());
  for (std::size_t i = 0; i < links.size(); ++i) links[i] = {world.leaders[i], world.promises[i]};
  return PropagateChainSaturating(links, cfg.event.decel, cfg.geometry.center_margin(),
                                  cfg.limits, mode);
}

TrialResult RunTrial(const ScenarioConfig& cfg, PlannerMode mode, const PlannerSpec& spec,
                     std::uint64_t seed, const SimOptions& options) {
  ValidateScenario(cfg);
  ValidatePlanner(spec);
  const double dt = cfg.dt;
  const double min_gap = cfg.geometry.center_margin();
  const double y_target = cfg.geometry.retreat_target();
  const auto leader_cfg = cfg.leaders();
  const SurroundingVehicle* follower_cfg = cfg.follower();
  const std::size_t n_leaders = leader_cfg.size();

  WorldSnapshot world = InitialSnapshot(cfg);

  std::vector<Rng> streams;
  for (std::size_t i = 0; i < n_leaders; ++i) streams.push_back(MakeStream(seed, i + 1));

  TrialResult result;
  DecisionAudit& audit = result.audit;
  std::vector<double> times{0.0};
  std::vector<double> ego_y{world.ego.p_y};
  std::vector<FollowerSample> follower_history;

  // Trivially certified: the ego starts in its own lane.
  EvasionPlan plan;
  plan.lateral = LateralEvasion(world.ego.p_y, world.ego.v_y, cfg.geometry, cfg.limits.a_y_m);
  double elapsed = 0.0;
  bool aborting = false;
  bool abort_completed = false;
  double ego_accel = 0.0;  // last applied ego command, seen by the follower

  std::vector<double> leader_accel(n_leaders, 0.0);
  std::vector<ActionKind> leader_kind(n_leaders, ActionKind::kNominal);
  const int steps = static_cast<int>(std::llround(cfg.horizon / dt));

  auto record = [&](double t, const Command& ego_cmd, std::string_view ego_behavior,
                    double follower_accel, ActionKind follower_kind) {
    if (!options.record_trajectory) return;
    result.trajectory.push_back(
        {t, "ego", world.ego, ego_cmd.a_x, ego_cmd.a_y, std::string(ego_behavior)});
    for (std::size_t i = 0; i < n_leaders; ++i) {
      result.trajectory.push_back({t, "L" + std::to_string(i + 1), world.leaders[i],
                                   leader_accel[i], 0.0, std::string(ActionName(leader_kind[i]))});
    }
    if (world.follower) {
      result.trajectory.push_back({t, "F", *world.follower, follower_accel, 0.0,
                                   std::string(ActionName(follower_kind))});
    }
  };

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const ChainResult chain = WorldChain(world, cfg, options.chain_mode);

    // Surrounding vehicles, front to back.
    const std::size_t last = n_leaders - 1;
    if (t + 1e-9 >= cfg.event.trigger_time) {
      leader_accel[last] = world.leaders[last].v_x > 0.0 ? -cfg.event.decel : 0.0;
      leader_kind[last] = ActionKind::kEvent;
    } else {
      leader_accel[last] = 0.0;
      leader_kind[last] = ActionKind::kNominal;
    }
    for (std::size_t j = last; j-- > 0;) {
      const VehicleState& self = world.leaders[j];
      const VehicleState& front = world.leaders[j + 1];
      const double upper = cfg.event.decel;
      const double lower = std::min(chain.required_of(static_cast<int>(j + 1)), upper);
      const auto violation = SamplePromiseViolation(streams[j], cfg.p_v, lower, upper);
      LongitudinalAction act;
      if (world.promises[j]) {
        act = LeaderPolicy(self, front, leader_accel[j + 1], *world.promises[j], violation,
                           min_gap, cfg.limits, dt, options.car_following);
      } else {
        const double desired =
            std::clamp(IdmAccel(self, front, min_gap, options.car_following), -cfg.limits.a_x_d,
                       cfg.limits.a_x_a);
        act.a_x = SafeAccel(self, front, leader_accel[j + 1], desired, cfg.limits.a_x_d, min_gap,
                            cfg.limits, dt, cfg.limits.a_x_d);
      }
      if (self.v_x <= 0.0) act.a_x = std::max(act.a_x, 0.0);
      leader_accel[j] = act.a_x;
      leader_kind[j] = act.kind;
      if (act.kind == ActionKind::kExpectedViolation) ++audit.expected_violations;
      if (act.kind == ActionKind::kUnexpectedViolation) ++audit.unexpected_violations;
      if (world.promises[j] && act.kind == ActionKind::kNominal &&
          (act.a_x < -world.promises[j]->a_m_d - 1e-9 ||
           act.a_x > world.promises[j]->a_m_a + 1e-9) &&
          self.v_x > 0.0) {
        ++audit.promise_breaches;
      }
    }

    const bool interacting = world.ego.p_y > y_target;
    const bool alongside = world.ego.p_y > cfg.geometry.w_l - cfg.geometry.w_v;
    double follower_accel = 0.0;
    ActionKind follower_kind = ActionKind::kNominal;
    if (world.follower) {
      const LongitudinalAction act = FollowerPolicy(
          follower_cfg->intent, follower_cfg->connected, interacting, alongside, *world.follower,
          world.ego, ego_accel, world.leaders.front(), leader_accel.front(), min_gap, cfg.limits, dt,
          options.car_following);
      follower_accel = act.a_x;
      follower_kind = act.kind;
    }

    // Ego: mask, plan, arbitrate.
    const AggressivenessLabel label = AssessAggressiveness(follower_history, options.assessment);
    const MaskedView view =
        MaskObservation(mode, world, chain, label, cfg, options.follower_mode);
    Command cmd = Plan(spec, view.observation, cfg.geometry, cfg.limits, dt);
    if (abort_completed && !options.allow_reattempt) {
      cmd = HesitateAction(world.ego, cmd.a_x, cfg.limits, dt);
    }
    const Decision d = DecideStep(world.ego, cmd, plan, elapsed, view.certification);

    ++audit.steps;
    const bool first_ok = d.behavior == Behavior::kProceed ||
                          (d.behavior == Behavior::kHesitate && !d.proceed_certified) ||
                          (d.behavior == Behavior::kAbort && !d.proceed_certified &&
                           !d.hesitate_certified);
    if (!first_ok) ++audit.preference_violations;
    switch (d.behavior) {
      case Behavior::kProceed:
        ++audit.proceed;
        break;
      case Behavior::kHesitate:
        ++audit.hesitate;
        break;
      case Behavior::kAbort:
        ++audit.aborts;
        // An exhausted plan is only acceptable once the ego is back in lane.
        if (d.plan_exhausted && !plan.lateral.already_clear &&
            world.ego.p_y > y_target + 1e-9) {
          ++audit.abort_unexecutable;
        }
        break;
    }
    if (d.behavior == Behavior::kAbort && !aborting) ++result.abort_count;
    if (aborting && d.behavior != Behavior::kAbort && world.ego.p_y <= y_target) {
      abort_completed = true;
    }
    aborting = d.behavior == Behavior::kAbort;

    record(t, d.command, BehaviorName(d.behavior), follower_accel, follower_kind);

    if (world.follower) {
      if (interacting) {
        follower_history.push_back({follower_accel, world.ego.p_x - world.follower->p_x});
      }
      *world.follower = StepKinematics(*world.follower, follower_accel, 0.0, dt);
    }
    for (std::size_t i = 0; i < n_leaders; ++i) {
      world.leaders[i] = StepKinematics(world.leaders[i], leader_accel[i], 0.0, dt);
    }
    world.ego = d.next_ego;
    ego_accel = d.command.a_x;

    if (d.behavior == Behavior::kAbort) {
      elapsed += dt;
    } else {
      plan = EvasionPlan::From(d.certified);
      elapsed = 0.0;
    }

    times.push_back(t + dt);
    ego_y.push_back(world.ego.p_y);

    std::vector<VehicleState> all{world.ego};
    all.insert(all.end(), world.leaders.begin(), world.leaders.end());
    if (world.follower) all.push_back(*world.follower);
    if (DetectCollision(all, cfg.geometry)) {
      result.collision = true;
      record(t + dt, {}, "collision", 0.0, ActionKind::kNominal);
      break;
    }
  }

  const SuccessCheck s = CheckSuccess(times, ego_y, result.collision, cfg.geometry, cfg.horizon);
  result.success = s.success;
  result.completion_time = s.completion_time;
  return result;
}

void WriteTrajectoryCsv(const std::vector<TrajectoryRow>& rows, std::ostream& out) {
  out << "t,vehicle_id,p_x,v_x,p_y,v_y,a_x,a_y,behavior\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.2f,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", r.t,
                  r.vehicle_id.c_str(), r.state.p_x, r.state.v_x, r.state.p_y, r.state.v_y,
                  r.a_x, r.a_y, r.behavior.c_str());
    out << buf;
  }
}

}  // namespace cvlc
