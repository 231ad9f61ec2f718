#include "cvlc/evasion.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

#include "cvlc/error.hpp"
#include "cvlc/worst_case.hpp"

namespace cvlc {

// ---------------------------------------------------------------------------
// Lateral retreat

LateralPlan LateralEvasion(double p_y, double v_y, const LaneGeometry& geometry, double a_y_m) {
  LateralPlan plan;
  plan.a_y_m = a_y_m;
  plan.y_target = geometry.retreat_target();
  plan.y0 = p_y;
  plan.vy0 = v_y;
  const double d = p_y - plan.y_target;
  if (d <= 1e-12 && v_y <= 0.0) {
    plan.already_clear = true;
    return plan;
  }
  const double disc = 0.5 * v_y * v_y + a_y_m * d;
  if (disc < 0.0) {
    // Still short of the boundary and able to stop before reaching it.
    assert(d < 0.0 && v_y > 0.0);
    plan.t_1 = v_y / a_y_m;
    plan.t_y_f = plan.t_1;
    return plan;
  }
  const double t_1 = (v_y + std::sqrt(disc)) / a_y_m;
  if (t_1 < 0.0) {
    // Moving back so fast that full counter-acceleration still overshoots
    // into the original lane; brake the lateral motion immediately.
    plan.t_1 = 0.0;
    plan.t_y_f = -v_y / a_y_m;
    return plan;
  }
  plan.t_1 = t_1;
  plan.t_y_f = 2.0 * t_1 - v_y / a_y_m;
  return plan;
}

double LateralPlan::Position(double t) const {
  t = std::clamp(t, 0.0, t_y_f);
  if (t <= t_1) return y0 + vy0 * t - 0.5 * a_y_m * t * t;
  const double y1 = y0 + vy0 * t_1 - 0.5 * a_y_m * t_1 * t_1;
  const double v1 = vy0 - a_y_m * t_1;
  const double s = t - t_1;
  return y1 + v1 * s + 0.5 * a_y_m * s * s;
}

double LateralPlan::Velocity(double t) const {
  if (already_clear) return t <= 0.0 ? vy0 : 0.0;
  if (t >= t_y_f) return 0.0;
  t = std::max(t, 0.0);
  if (t <= t_1) return vy0 - a_y_m * t;
  return vy0 - a_y_m * t_1 + a_y_m * (t - t_1);
}

double LateralPlan::Acceleration(double t) const {
  if (t < 0.0 || t >= t_y_f) return 0.0;
  return t < t_1 ? -a_y_m : a_y_m;
}

namespace {

// Real roots of c0 + c1 s + c2 s^2 / 2 = 0 inside [0, len], offset by t0.
void AppendCrossings(double c0, double c1, double c2, double t0, double len,
                     std::array<double, 8>& out, std::size_t& n) {
  auto push = [&](double s) {
    if (s >= 0.0 && s <= len && n < out.size()) out[n++] = t0 + s;
  };
  if (c2 == 0.0) {
    if (c1 != 0.0) push(-c0 / c1);
    return;
  }
  const double disc = c1 * c1 - 2.0 * c2 * c0;
  if (disc < 0.0) return;
  const double r = std::sqrt(disc);
  push((-c1 - r) / c2);
  push((-c1 + r) / c2);
}

}  // namespace

std::pair<double, double> LateralPlan::OverlapWindow() const {
  if (already_clear || t_y_f <= 0.0) return {0.0, 0.0};
  std::array<double, 8> cuts{};
  std::size_t n = 0;
  cuts[n++] = 0.0;
  AppendCrossings(y0 - y_target, vy0, -a_y_m, 0.0, t_1, cuts, n);
  const double y1 = Position(t_1);
  const double v1 = vy0 - a_y_m * t_1;
  AppendCrossings(y1 - y_target, v1, a_y_m, t_1, t_y_f - t_1, cuts, n);
  cuts[n++] = t_y_f;
  std::sort(cuts.begin(), cuts.begin() + n);
  double first = kInf;
  double last = -kInf;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    if (Position(0.5 * (cuts[k] + cuts[k + 1])) > y_target) {
      first = std::min(first, cuts[k]);
      last = std::max(last, cuts[k + 1]);
    }
  }
  if (first > last) return {0.0, 0.0};
  return {first, last};
}

// ---------------------------------------------------------------------------
// Longitudinal evasion

PiecewiseMotion LongitudinalPlan::Motion() const {
  PiecewiseMotion m(p0, v0);
  m.Then(t_x_1, a_x_a).Then(t_x_2 - t_x_1, -a_x_d).Then(kInf, -a_x_1_d);
  return m;
}

double LongitudinalPlan::Acceleration(double t) const {
  const auto m = Motion();
  return m.Acceleration(t);
}

LongitudinalPlan ThreePhaseProfile(const VehicleState& ego, const VehicleState& leader,
                                   double a_x_1_d, const MechanicalLimits& limits, double t_y_f,
                                   double t_x_1) {
  LongitudinalPlan plan;
  plan.p0 = ego.p_x;
  plan.v0 = ego.v_x;
  plan.a_x_a = limits.a_x_a;
  plan.a_x_d = limits.a_x_d;
  plan.a_x_1_d = a_x_1_d;
  plan.t_y_f = t_y_f;
  plan.t_x_1 = t_x_1;

  const double a_d = limits.a_x_d;
  const double v_ego = ego.v_x + limits.a_x_a * t_x_1;
  const double v_lead = LeaderVelocityAt(leader, a_x_1_d, t_x_1);
  const double lead_stop = a_x_1_d > 0.0 ? leader.v_x / a_x_1_d : kInf;

  bool matched = false;
  if (v_ego <= v_lead) {
    // Already no faster than the leader: follow its worst-case braking.
    plan.t_x_2 = t_x_1;
    plan.tau_1 = t_x_1;
    matched = true;
  } else if (a_d > a_x_1_d) {
    const double t_match = t_x_1 + (v_ego - v_lead) / (a_d - a_x_1_d);
    if (t_match < lead_stop) {
      plan.t_x_2 = t_match;
      plan.tau_1 = t_match;
      matched = true;
    }
  }
  if (matched) {
    const double v_match = std::max(0.0, v_ego - a_d * (plan.t_x_2 - t_x_1));
    plan.tau_2 = a_x_1_d > 0.0 ? plan.t_x_2 + v_match / a_x_1_d : kInf;
    if (v_match <= 0.0) plan.tau_2 = plan.t_x_2;
  } else {
    // The leader is at standstill (or unreachable) before the speeds meet.
    plan.t_x_2 = t_x_1 + v_ego / a_d;
    plan.tau_1 = kInf;
    plan.tau_2 = plan.t_x_2;
  }

  if (t_x_1 >= t_y_f) {
    plan.case_id = 1;
  } else if (!matched) {
    plan.case_id = plan.tau_2 <= t_y_f ? 2 : 1;
  } else if (plan.t_x_2 >= t_y_f) {
    plan.case_id = 1;
  } else {
    plan.case_id = plan.tau_2 <= t_y_f ? 4 : 3;
  }
  return plan;
}

namespace {

struct LongitudinalProblem {
  const VehicleState& ego;
  const VehicleState& leader;
  double a1;
  const MechanicalLimits& limits;
  double min_gap;
  double horizon;

  double MinGapFor(double t_x_1) const {
    const auto plan = ThreePhaseProfile(ego, leader, a1, limits, horizon, t_x_1);
    const auto lead = PiecewiseMotion::Constant(leader.p_x, leader.v_x, -a1);
    return MinGap(lead, plan.Motion(), 0.0, horizon).gap;
  }

  // Branch selection of the closed-form position at t_y_f, evaluated under a
  // candidate value of t_x_1.
  int Branch(double c) const {
    const double aa = limits.a_x_a;
    const double ad = limits.a_x_d;
    const double T = horizon;
    const double v0 = ego.v_x;
    const double v1 = leader.v_x;
    const double lead_stop = a1 > 0.0 ? v1 / a1 : kInf;
    if (v0 + aa * c - ad * (T - c) >= std::max(0.0, v1 - a1 * T)) return 1;
    const double ego_stop = (v0 + aa * c) / ad + c;
    if (lead_stop <= ego_stop && ego_stop <= T) return 2;
    if (lead_stop >= T) return 3;
    return 4;
  }
};

}  // namespace

std::optional<LongitudinalPlan> TryLongitudinalEvasion(const VehicleState& ego,
                                                       const VehicleState& leader,
                                                       double a_x_1_d,
                                                       const MechanicalLimits& limits,
                                                       double min_gap, double t_y_f) {
  constexpr double kCertifyTol = 1e-6;
  if (leader.p_x - ego.p_x < min_gap - 1e-9) return std::nullopt;
  const LongitudinalProblem prob{ego, leader, a_x_1_d, limits, min_gap, t_y_f};
  if (t_y_f <= 0.0) {
    auto plan = ThreePhaseProfile(ego, leader, a_x_1_d, limits, 0.0, 0.0);
    plan.method = LongitudinalMethod::kTrivial;
    return plan;
  }
  if (prob.MinGapFor(t_y_f) >= min_gap) {
    auto plan = ThreePhaseProfile(ego, leader, a_x_1_d, limits, t_y_f, t_y_f);
    plan.method = LongitudinalMethod::kKeepAccelerating;
    return plan;
  }
  if (prob.MinGapFor(0.0) < min_gap - 1e-9) return std::nullopt;

  const double aa = limits.a_x_a;
  const double ad = limits.a_x_d;
  const double T = t_y_f;
  const double p0 = ego.p_x;
  const double v0 = ego.v_x;
  const double pl = leader.p_x;
  const double vl = leader.v_x;
  const double pl_T = LeaderPositionAt(leader, a_x_1_d, T);

  std::array<double, 3> candidate{kInf, kInf, kInf};
  {
    const double r = T * T + (2.0 * v0 * T - ad * T * T + 2.0 * p0 + 2.0 * min_gap - 2.0 * pl_T) /
                                 (aa + ad);
    if (r >= 0.0) candidate[0] = T - std::sqrt(r);
  }
  {
    const double q = v0 / aa;
    const double r = q * q - (2.0 * p0 * ad + v0 * v0 + 2.0 * min_gap * ad - 2.0 * pl_T * ad) /
                                 ((aa + ad) * aa);
    if (r >= 0.0) candidate[1] = -q + std::sqrt(r);
  }
  {
    const double dv = v0 - vl;
    const double c2 = (dv * dv + (2.0 * p0 + 2.0 * min_gap - 2.0 * pl) * (ad - a_x_1_d)) /
                      (2.0 * (aa + ad));
    const double r = dv * dv - 2.0 * (aa + a_x_1_d) * c2;
    if (r >= 0.0) candidate[2] = (-dv + std::sqrt(r)) / (aa + a_x_1_d);
  }

  int n_consistent = 0;
  double chosen = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double c = candidate[static_cast<std::size_t>(k)];
    if (!std::isfinite(c) || c < 0.0 || c > T) continue;
    const int branch = prob.Branch(c);
    const bool ok = k < 2 ? branch == k + 1 : (branch == 3 || branch == 4);
    if (!ok) continue;
    if (std::abs(prob.MinGapFor(c) - min_gap) > kCertifyTol) continue;
    ++n_consistent;
    chosen = c;
  }

  LongitudinalMethod method = LongitudinalMethod::kClosedForm;
  if (n_consistent != 1) {
    method = LongitudinalMethod::kBisection;
    double lo = 0.0;
    double hi = T;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (prob.MinGapFor(mid) >= min_gap) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    chosen = lo;
  }
  auto plan = ThreePhaseProfile(ego, leader, a_x_1_d, limits, T, chosen);
  plan.method = method;
  return plan;
}

LongitudinalPlan LongitudinalEvasion(const VehicleState& ego, const VehicleState& leader,
                                     double a_x_1_d, const MechanicalLimits& limits,
                                     double min_gap, double t_y_f) {
  auto plan = TryLongitudinalEvasion(ego, leader, a_x_1_d, limits, min_gap, t_y_f);
  if (!plan) {
    throw Error(ErrorCode::kEvasionInfeasible,
                "leader gap cannot be kept even with full braking from t = 0");
  }
  return *plan;
}

// ---------------------------------------------------------------------------
// Existence check

EvasionCheck EvasionExists(const VehicleState& ego, const VehicleState& leader,
                           double a_x_1_d, const std::optional<VehicleState>& follower,
                           FollowerModel follower_model, const EvasionContext& ctx) {
  EvasionCheck check;
  check.lateral = LateralEvasion(ego.p_y, ego.v_y, ctx.geometry, ctx.limits.a_y_m);
  if (!std::isfinite(check.lateral.t_y_f) || check.lateral.t_y_f < 0.0) {
    check.limiting_constraint = LimitingConstraint::kLateralInfeasible;
    return check;
  }
  const double horizon = check.lateral.t_y_f;
  if (check.lateral.already_clear) {
    check.longitudinal = ThreePhaseProfile(ego, leader, a_x_1_d, ctx.limits, 0.0, 0.0);
    check.exists = true;
    return check;
  }
  check.longitudinal =
      TryLongitudinalEvasion(ego, leader, a_x_1_d, ctx.limits, ctx.min_gap, horizon);
  if (!check.longitudinal) {
    check.limiting_constraint = LimitingConstraint::kLeader;
    return check;
  }
  if (follower && follower_model != FollowerModel::kAbsent) {
    double begin = 0.0;
    double end = horizon;
    if (ctx.follower_mode == FollowerCheckMode::kLateralOverlap) {
      std::tie(begin, end) = check.lateral.OverlapWindow();
    }
    if (end > begin || (ctx.follower_mode == FollowerCheckMode::kStrict)) {
      const auto rear = PiecewiseMotion::Constant(
          follower->p_x, follower->v_x, FollowerWorstAccel(follower_model, ctx.limits));
      const double gap = MinGap(check.longitudinal->Motion(), rear, begin, end).gap;
      if (gap < ctx.min_gap) {
        check.limiting_constraint = LimitingConstraint::kFollower;
        return check;
      }
    }
  }
  check.exists = true;
  return check;
}

EvasionPlan EvasionPlan::From(const EvasionCheck& check) {
  EvasionPlan plan;
  plan.lateral = check.lateral;
  if (check.longitudinal) plan.longitudinal = *check.longitudinal;
  return plan;
}

VehicleState EvasionPlan::StateAt(double t) const {
  const auto m = longitudinal.Motion();
  return {m.Position(t), m.Velocity(t), lateral.Position(t), lateral.Velocity(t)};
}

Command EvasionPlan::CommandAt(double t) const {
  return {longitudinal.Acceleration(t), lateral.Acceleration(t)};
}

}  // namespace cvlc
