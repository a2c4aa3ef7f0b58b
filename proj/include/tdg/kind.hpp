#pragma once

#include <vector>

#include "tdg/apollonius.hpp"
#include "tdg/geometry.hpp"

namespace tdg {

enum class Space { Capture, Escape };

const char* to_string(Space space);

struct Classification {
  Space space;
  double barrier_value;
  ApolloniusDisk disk;
  /// Projection of the Apollonius center onto the target.
  Point2 projection;
  /// The pursuer starts inside the target; classification is still reported
  /// but the game setup is unusual.
  bool pursuer_in_target;
};

/// dist(C, target) - R for the Apollonius disk (C, R) of the state.
double barrier_value(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// Capture iff the barrier value is strictly positive.
Classification classify(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// Zero level set of the barrier function for a fixed pursuer, as a closed
/// polyline (points.front() == points.back()).
struct BarrierCurve {
  Point2 pursuer;
  double gamma;
  int ray_count;
  std::vector<double> angles;   // one per ray
  std::vector<Point2> points;   // ray_count + 1, closed
};

inline constexpr int kMinRayCount = 16;
inline constexpr double kBarrierTolerance = 1e-8;

/// Casts rays from the target anchor and bisects the barrier sign change on
/// each. Throws BracketingFailure when a ray shows no sign change.
BarrierCurve trace_barrier_curve(const Point2& pursuer, const ConvexTarget& target,
                                 const SpeedRatio& ratio, int ray_count);

/// Circular-target barrier quartic in the form printed in the original
/// derivation, for a disk of radius r centered at the origin. This form does
/// not vanish on the true barrier; kept for the cross-check only.
double circular_barrier_quartic(const Point2& z, const Point2& pursuer, const SpeedRatio& ratio, double r);

/// Quartic obtained by squaring |a,b| - r(1 - g^2) = g |c,d| twice. Vanishes on
/// the barrier curve (and on the spurious branches introduced by squaring).
double circular_barrier_quartic_derived(const Point2& z, const Point2& pursuer, const SpeedRatio& ratio,
                                        double r);

}  // namespace tdg
