#pragma once

#include <functional>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tdg {

using Vec2 = Eigen::Vector2d;
using Point2 = Eigen::Vector2d;

/// Throws InvalidArgument unless both coordinates are finite.
void require_finite(const Point2& z, const char* what);

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Disk of the given radius; h(z) = |z - c|^2 - r^2.
struct Circle {
  Point2 center;
  double radius;
};

/// Filled ellipse; h(z) = (x'/a)^2 + (y'/b)^2 - 1 in the frame rotated by `rotation`.
struct Ellipse {
  Point2 center;
  Vec2 semi_axes;
  double rotation = 0.0;
  /// Rotation matrix of `rotation`, cached by ConvexTarget::ellipse.
  Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
};

/// Sublevel set {h <= 0} of a caller-supplied smooth convex function.
///
/// The set must lie inside the disk of `bounding_radius` about `anchor`, and
/// h(anchor) < 0. Convexity is the caller's contract; construction only
/// spot-checks it by midpoint sampling.
struct ImplicitSmooth {
  std::function<double(const Point2&)> h;
  std::function<Vec2(const Point2&)> grad_h;
  double bounding_radius;
  Point2 anchor;
};

class ConvexTarget {
 public:
  using Shape = std::variant<Circle, Ellipse, ImplicitSmooth>;

  static ConvexTarget circle(const Point2& center, double radius);
  static ConvexTarget ellipse(const Point2& center, const Vec2& semi_axes, double rotation = 0.0);
  static ConvexTarget implicit(std::function<double(const Point2&)> h,
                               std::function<Vec2(const Point2&)> grad_h, double bounding_radius,
                               const Point2& anchor);

  const Shape& shape() const { return shape_; }
  bool is_circle() const { return std::holds_alternative<Circle>(shape_); }

  double h(const Point2& z) const;
  Vec2 grad_h(const Point2& z) const;
  Eigen::Matrix2d hessian_h(const Point2& z) const;

  /// Interior anchor: the center for circles and ellipses.
  Point2 anchor() const;
  /// Radius of a disk about anchor() that contains the set.
  double bounding_radius() const;
  Eigen::AlignedBox2d bounding_box() const;

  /// Boundary point hit by the ray from anchor() along `direction`.
  Point2 boundary_point(const Vec2& direction) const;

 private:
  explicit ConvexTarget(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

bool contains(const ConvexTarget& target, const Point2& z);

/// Euclidean projection onto the target. Throws NonConvergence if the
/// iterative projector (ellipse, implicit) cannot meet its tolerance.
Point2 project(const ConvexTarget& target, const Point2& z);

double distance(const ConvexTarget& target, const Point2& z);

/// Stationarity residual of p as the projection of z: the normalized cross
/// product of (z - p) with grad h(p), plus |h(p)| / |grad h(p)|.
double projection_kkt_residual(const ConvexTarget& target, const Point2& z, const Point2& p);

}  // namespace tdg
