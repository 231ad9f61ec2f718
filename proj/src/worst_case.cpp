#include "cvlc/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvlc/error.hpp"
#include "cvlc/motion.hpp"

namespace cvlc {

namespace {

constexpr double kGapTolerance = 1e-6;

double MinGapOf(const VehicleState& leader, double leader_decel, const VehicleState& follower,
                double follower_decel) {
  const auto front = PiecewiseMotion::Constant(leader.p_x, leader.v_x, -leader_decel);
  const auto rear = PiecewiseMotion::Constant(follower.p_x, follower.v_x, -follower_decel);
  return MinGap(front, rear, 0.0, kInf).gap;
}

// Smallest z in [0, max_decel] with min gap >= min_gap; min gap is
// non-decreasing in z because the rear position is pointwise non-increasing.
std::optional<double> Bisect(const VehicleState& leader, const VehicleState& follower,
                             double leader_decel, double min_gap, double max_decel) {
  if (MinGapOf(leader, leader_decel, follower, max_decel) < min_gap - 1e-9) return std::nullopt;
  double lo = 0.0;
  double hi = max_decel;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = MinGapOf(leader, leader_decel, follower, mid);
    if (g >= min_gap) {
      hi = mid;
      if (g - min_gap <= kGapTolerance * 1e-3) break;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool FirstBranchCondition(double v_lead, double v_rear, double a_lead, double z) {
  if (!(v_lead < v_rear)) return false;
  const double lead_stop = a_lead > 0.0 ? v_lead / a_lead : kInf;
  const double rear_stop = z > 0.0 ? v_rear / z : kInf;
  return lead_stop >= rear_stop;
}

}  // namespace

double MinGapUnderBraking(const VehicleState& leader, double leader_decel,
                          const VehicleState& follower, double follower_decel) {
  return MinGapOf(leader, leader_decel, follower, follower_decel);
}

std::optional<double> TryRequiredDecel(const VehicleState& leader, const VehicleState& follower,
                                       double leader_decel, double min_gap, double max_decel,
                                       ChainMode mode) {
  const double slack = leader.p_x - follower.p_x - min_gap;
  if (slack < -1e-12) return std::nullopt;
  const double v_rear = follower.v_x;
  const double v_lead = leader.v_x;
  const double a_lead = leader_decel;
  if (v_rear <= 0.0) return 0.0;
  if (MinGapOf(leader, a_lead, follower, 0.0) >= min_gap) return 0.0;

  const double coeff = mode == ChainMode::kUncertifiedThreeHalves ? 1.5 : 0.5;
  const double dv = v_rear - v_lead;
  std::optional<double> match;
  if (dv > 0.0 && slack > 0.0) match = coeff * dv * dv / slack + a_lead;
  std::optional<double> stop;
  if (a_lead > 0.0) {
    const double denom = 2.0 * slack + v_lead * v_lead / a_lead;
    if (denom > 0.0) stop = v_rear * v_rear / denom;
  }

  const bool match_ok = match && FirstBranchCondition(v_lead, v_rear, a_lead, *match);
  const bool stop_ok = stop && !FirstBranchCondition(v_lead, v_rear, a_lead, *stop);

  std::optional<double> candidate;
  if (match_ok != stop_ok) candidate = match_ok ? match : stop;

  if (mode == ChainMode::kUncertifiedThreeHalves && candidate) {
    if (*candidate > max_decel) return std::nullopt;
    return *candidate;
  }
  if (candidate && *candidate <= max_decel) {
    const double g = MinGapOf(leader, a_lead, follower, *candidate);
    if (std::abs(g - min_gap) <= kGapTolerance) return *candidate;
  }
  return Bisect(leader, follower, a_lead, min_gap, max_decel);
}

double RequiredDecel(const VehicleState& leader, const VehicleState& follower,
                     double leader_decel, double min_gap, double max_decel, ChainMode mode) {
  const auto z = TryRequiredDecel(leader, follower, leader_decel, min_gap, max_decel, mode);
  if (!z) {
    throw Error(ErrorCode::kInfeasible,
                "rear vehicle cannot keep the minimum gap with deceleration <= max");
  }
  return *z;
}

namespace {

ChainResult Propagate(std::span<const ChainLink> leaders, double event_decel, double min_gap,
                      const MechanicalLimits& limits, ChainMode mode, bool saturate) {
  ChainResult out;
  const int n_plus_one = static_cast<int>(leaders.size());
  out.decels.reserve(leaders.size());
  out.required.reserve(leaders.size());
  out.decels.push_back(event_decel);
  out.required.push_back(event_decel);
  for (int i = n_plus_one - 1; i >= 1; --i) {
    // leaders[i] is L_{i+1}, leaders[i-1] is L_i.
    const ChainLink& front = leaders[static_cast<std::size_t>(i)];
    const ChainLink& rear = leaders[static_cast<std::size_t>(i - 1)];
    if (out.broken_at != 0) {
      out.required.push_back(limits.a_x_d);
      out.decels.push_back(limits.a_x_d);
      continue;
    }
    const auto z = TryRequiredDecel(front.state, rear.state, out.decels.back(), min_gap,
                                    limits.a_x_d, mode);
    if (!z) {
      if (!saturate) {
        throw Error(ErrorCode::kInfeasible, "worst-case chain breaks at L" + std::to_string(i));
      }
      out.broken_at = i;
      out.required.push_back(limits.a_x_d);
      out.decels.push_back(limits.a_x_d);
      continue;
    }
    out.required.push_back(*z);
    const double floored = rear.promise ? ApplyPromiseFloor(*z, *rear.promise) : *z;
    out.decels.push_back(std::min(floored, limits.a_x_d));
  }
  return out;
}

}  // namespace

ChainResult PropagateChain(std::span<const ChainLink> leaders, double event_decel,
                           double min_gap, const MechanicalLimits& limits, ChainMode mode) {
  return Propagate(leaders, event_decel, min_gap, limits, mode, false);
}

ChainResult PropagateChainSaturating(std::span<const ChainLink> leaders, double event_decel,
                                     double min_gap, const MechanicalLimits& limits,
                                     ChainMode mode) {
  return Propagate(leaders, event_decel, min_gap, limits, mode, true);
}

}  // namespace cvlc
