#include "tdg/kind.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tdg {

const char* to_string(Space space) { return space == Space::Capture ? "capture" : "escape"; }

double barrier_value(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const ApolloniusDisk disk = apollonius_disk(state, ratio);
  return distance(target, disk.center) - disk.radius;
}

Classification classify(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const ApolloniusDisk disk = apollonius_disk(state, ratio);
  const Point2 proj = project(target, disk.center);
  const double value = (proj - disk.center).norm() - disk.radius;
  return {value > 0.0 ? Space::Capture : Space::Escape, value, disk, proj,
          contains(target, state.pursuer())};
}

BarrierCurve trace_barrier_curve(const Point2& pursuer, const ConvexTarget& target,
                                 const SpeedRatio& ratio, int ray_count) {
  require_finite(pursuer, "trace_barrier_curve pursuer");
  if (ray_count < kMinRayCount) {
    throw InvalidArgument("ray_count must be at least " + std::to_string(kMinRayCount));
  }
  const Point2 anchor = target.anchor();
  const double search_radius = 10.0 * (target.bounding_radius() + (pursuer - anchor).norm());
  // Rays start slightly off the anchor when the pursuer sits on it.
  const double s0 = (pursuer - anchor).norm() < 1e-9 ? 1e-9 * search_radius : 0.0;

  auto barrier_at = [&](const Point2& z) {
    // Limit of the barrier as the evader approaches the pursuer.
    if ((z - pursuer).norm() < kDegenerateSeparation) return distance(target, pursuer);
    return barrier_value(GameState(pursuer, z), target, ratio);
  };

  BarrierCurve curve{pursuer, ratio.gamma(), ray_count, {}, {}};
  curve.angles.reserve(ray_count);
  curve.points.reserve(ray_count + 1);

  constexpr int kMarchSteps = 1024;
  for (int i = 0; i < ray_count; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / ray_count;
    const Vec2 u(std::cos(angle), std::sin(angle));

    double lo = s0;
    if (barrier_at(anchor + lo * u) > 0.0) {
      throw BracketingFailure("barrier is positive at the ray origin on ray " + std::to_string(i), i);
    }
    double hi = -1.0;
    const double ds = (search_radius - s0) / kMarchSteps;
    for (int k = 1; k <= kMarchSteps; ++k) {
      const double s = s0 + k * ds;
      if (barrier_at(anchor + s * u) > 0.0) {
        hi = s;
        break;
      }
      lo = s;
    }
    if (hi < 0.0) {
      throw BracketingFailure("no barrier sign change within the search radius on ray " + std::to_string(i), i);
    }

    Point2 z = anchor + lo * u;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      z = anchor + mid * u;
      const double b = barrier_at(z);
      if (std::abs(b) <= kBarrierTolerance) break;
      (b > 0.0 ? hi : lo) = mid;
      if (hi - lo <= 1e-15 * search_radius) {
        throw BracketingFailure("barrier bisection stalled on ray " + std::to_string(i), i);
      }
    }
    curve.angles.push_back(angle);
    curve.points.push_back(z);
  }
  curve.points.push_back(curve.points.front());
  return curve;
}

double circular_barrier_quartic(const Point2& z, const Point2& pursuer, const SpeedRatio& ratio, double r) {
  const double g2 = ratio.gamma() * ratio.gamma();
  const double a = z.x() - g2 * pursuer.x();
  const double b = z.y() - g2 * pursuer.y();
  const double c = z.x() - pursuer.x();
  const double d = z.y() - pursuer.y();
  const double ab = a * a + b * b;
  const double cd = c * c + d * d;
  const double k2 = r * r * (1.0 - g2) * (1.0 - g2);
  return ab * ab - k2 * (2.0 * ab - r * r) - g2 * cd * (2.0 * ab + 4.0 * k2 + 2.0 * k2 * g2 + g2);
}

double circular_barrier_quartic_derived(const Point2& z, const Point2& pursuer, const SpeedRatio& ratio,
                                        double r) {
  const double g2 = ratio.gamma() * ratio.gamma();
  const double a = z.x() - g2 * pursuer.x();
  const double b = z.y() - g2 * pursuer.y();
  const double c = z.x() - pursuer.x();
  const double d = z.y() - pursuer.y();
  const double ab = a * a + b * b;
  const double cd = c * c + d * d;
  const double k2 = r * r * (1.0 - g2) * (1.0 - g2);
  return ab * ab - k2 * (2.0 * ab - k2) - g2 * cd * (2.0 * ab + 2.0 * k2 - g2 * cd);
}

}  // namespace tdg
