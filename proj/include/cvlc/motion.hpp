#pragma once

#include <array>
#include <cstddef>
#include <limits>

namespace cvlc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Longitudinal motion made of constant-acceleration phases. Velocity never
/// drops below zero: a braking phase that reaches standstill holds the stop
/// point until a later phase accelerates again.
class PiecewiseMotion {
 public:
  struct Segment {
    double t0;  ///< start time
    double p0;
    double v0;
    double a;
  };

  static constexpr std::size_t kMaxSegments = 8;

  PiecewiseMotion(double p0, double v0) { segments_[0] = {0.0, p0, v0, 0.0}; }

  /// Appends a phase of the given duration (kInf for the final phase).
  PiecewiseMotion& Then(double duration, double accel);

  /// Motion braking (or accelerating) at a constant rate from t = 0.
  static PiecewiseMotion Constant(double p0, double v0, double accel) {
    return PiecewiseMotion(p0, v0).Then(kInf, accel);
  }

  double Position(double t) const;
  double Velocity(double t) const;
  double Acceleration(double t) const;

  std::size_t size() const { return count_; }
  const Segment& segment(std::size_t i) const { return segments_[i]; }
  /// End time of phase i (kInf for the last).
  double SegmentEnd(std::size_t i) const {
    return i + 1 < count_ ? segments_[i + 1].t0 : kInf;
  }

 private:
  const Segment& Locate(double t) const;
  void Push(const Segment& s);

  std::array<Segment, kMaxSegments> segments_{};
  std::size_t count_ = 0;
  double open_end_ = 0.0;  ///< end time of the phases appended so far
};

struct GapExtremum {
  double gap = kInf;
  double time = 0.0;
};

/// Exact minimum of front.Position(t) - rear.Position(t) over [t_begin, t_end].
/// The gap is piecewise quadratic, so only breakpoints and stationary points
/// are inspected. An unbounded interval whose gap diverges returns -inf.
GapExtremum MinGap(const PiecewiseMotion& front, const PiecewiseMotion& rear, double t_begin,
                   double t_end);

}  // namespace cvlc
