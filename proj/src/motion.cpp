#include "cvlc/motion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cvlc {

void PiecewiseMotion::Push(const Segment& s) {
  if (count_ > 0) {
    const Segment& last = segments_[count_ - 1];
    // Collapse consecutive standstill segments and zero-length phases.
    if (last.v0 == 0.0 && last.a == 0.0 && s.v0 == 0.0 && s.a == 0.0) return;
    if (last.t0 == s.t0) {
      segments_[count_ - 1] = s;
      return;
    }
  }
  assert(count_ < kMaxSegments);
  segments_[count_++] = s;
}

PiecewiseMotion& PiecewiseMotion::Then(double duration, double accel) {
  if (!(duration > 0.0)) return *this;
  double t = open_end_;
  double p;
  double v;
  if (count_ == 0) {
    p = segments_[0].p0;
    v = segments_[0].v0;
  } else {
    p = Position(t);
    v = Velocity(t);
  }
  if (v <= 0.0 && accel <= 0.0) {
    Push({t, p, 0.0, 0.0});
  } else if (accel < 0.0 && v / -accel < duration) {
    const double t_stop = v / -accel;
    Push({t, p, v, accel});
    Push({t + t_stop, p + v * v / (-2.0 * accel), 0.0, 0.0});
  } else {
    Push({t, p, std::max(v, 0.0), accel});
  }
  open_end_ = t + duration;
  return *this;
}

const PiecewiseMotion::Segment& PiecewiseMotion::Locate(double t) const {
  std::size_t i = 0;
  while (i + 1 < count_ && segments_[i + 1].t0 <= t) ++i;
  return segments_[i];
}

double PiecewiseMotion::Position(double t) const {
  if (count_ == 0) return segments_[0].p0;
  const Segment& s = Locate(t);
  const double tau = t - s.t0;
  return s.p0 + s.v0 * tau + 0.5 * s.a * tau * tau;
}

double PiecewiseMotion::Velocity(double t) const {
  if (count_ == 0) return segments_[0].v0;
  const Segment& s = Locate(t);
  return std::max(0.0, s.v0 + s.a * (t - s.t0));
}

double PiecewiseMotion::Acceleration(double t) const {
  if (count_ == 0) return 0.0;
  return Locate(t).a;
}

namespace {

struct RelativeSegment {
  double dp;
  double dv;
  double da;
};

RelativeSegment Relative(const PiecewiseMotion& front, const PiecewiseMotion& rear, double t) {
  // Evaluate accelerations just inside the interval starting at t.
  return {front.Position(t) - rear.Position(t), front.Velocity(t) - rear.Velocity(t),
          front.Acceleration(t) - rear.Acceleration(t)};
}

void Consider(GapExtremum& best, double gap, double t) {
  if (gap < best.gap) {
    best.gap = gap;
    best.time = t;
  }
}

}  // namespace

GapExtremum MinGap(const PiecewiseMotion& front, const PiecewiseMotion& rear, double t_begin,
                   double t_end) {
  std::array<double, 2 * PiecewiseMotion::kMaxSegments + 2> cuts{};
  std::size_t n = 0;
  cuts[n++] = t_begin;
  for (const auto* m : {&front, &rear}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      const double t0 = m->segment(i).t0;
      if (t0 > t_begin && t0 < t_end) cuts[n++] = t0;
    }
  }
  std::sort(cuts.begin(), cuts.begin() + n);
  cuts[n++] = t_end;

  GapExtremum best;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double ta = cuts[k];
    const double tb = cuts[k + 1];
    if (tb < ta) continue;
    const RelativeSegment r = Relative(front, rear, ta);
    Consider(best, r.dp, ta);
    if (std::isinf(tb)) {
      if (r.da < 0.0 || (r.da == 0.0 && r.dv < 0.0)) {
        best = {-kInf, kInf};
        return best;
      }
    } else {
      Consider(best, front.Position(tb) - rear.Position(tb), tb);
    }
    if (r.da > 0.0 && r.dv < 0.0) {
      const double tau = -r.dv / r.da;
      if (ta + tau < tb) Consider(best, r.dp + 0.5 * r.dv * tau, ta + tau);
    }
  }
  return best;
}

}  // namespace cvlc
