#include "tdg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "tdg/errors.hpp"

namespace tdg {

namespace {

constexpr double kKktTolerance = 1e-10;
constexpr int kNewtonBudget = 200;

Eigen::Matrix2d rotation_matrix(double angle) {
  return Eigen::Rotation2Dd(angle).toRotationMatrix();
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double fd_step(const Point2& p) { return 1e-6 * (1.0 + p.norm()); }

// Damped Newton on  p - z + mu * grad h(p) = 0,  h(p) = 0.
struct NewtonResult {
  Point2 point;
  bool converged;
};

NewtonResult newton_projection(const ConvexTarget& target, const Point2& z, Point2 p, int budget) {
  // Far points lose absolute precision in the tangency residual.
  const double scale = std::max({1.0, target.bounding_radius(), (z - target.anchor()).norm()});
  Vec2 g = target.grad_h(p);
  double mu = std::max((z - p).dot(g) / g.squaredNorm(), 0.0);

  auto residual = [&](const Point2& q, double m) {
    Eigen::Vector3d f;
    f.head<2>() = q - z + m * target.grad_h(q);
    f(2) = target.h(q);
    return f;
  };

  Eigen::Vector3d f = residual(p, mu);
  // Past the tolerance a few more steps cost little and reach full precision.
  int extra = 3;
  for (int it = 0; it < budget; ++it) {
    g = target.grad_h(p);
    if ((z - p).dot(g) >= -kKktTolerance * scale * g.norm() && projection_kkt_residual(target, z, p) <= kKktTolerance * scale && extra-- == 0) {
      return {p, true};
    }
    Eigen::Matrix3d jac;
    jac.topLeftCorner<2, 2>() = Eigen::Matrix2d::Identity() + mu * target.hessian_h(p);
    jac.topRightCorner<2, 1>() = g;
    jac.bottomLeftCorner<1, 2>() = g.transpose();
    jac(2, 2) = 0.0;
    const Eigen::Vector3d delta = jac.fullPivLu().solve(-f);
    if (!delta.allFinite()) break;

    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      const Point2 cand = p + alpha * delta.head<2>();
      const double cand_mu = mu + alpha * delta(2);
      const Eigen::Vector3d cand_f = residual(cand, cand_mu);
      if (cand_f.norm() < f.norm() || cand_f.norm() < 1e-15) {
        p = cand;
        mu = cand_mu;
        f = cand_f;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  g = target.grad_h(p);
  const bool ok =
      (z - p).dot(g) >= -kKktTolerance * scale * g.norm() && projection_kkt_residual(target, z, p) <= kKktTolerance * scale;
  return {p, ok};
}

// Outside point z: the projection is a^2 y / (a^2 + t) in the ellipse frame,
// with t >= 0 the root of the convex decreasing secular function, which
// Newton from t = 0 approaches monotonically.
Point2 project_ellipse(const Ellipse& e, const Point2& z) {
  const Vec2 y = e.frame.transpose() * (z - e.center);
  const Vec2 a2 = e.semi_axes.cwiseProduct(e.semi_axes);
  const Vec2 ay = e.semi_axes.cwiseProduct(y);
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Vec2 d = a2.array() + t;
    const Vec2 r = ay.cwiseQuotient(d);
    const double f = r.squaredNorm() - 1.0;
    const double df = -2.0 * (r.array().square() / d.array()).sum();
    if (!(df < 0.0)) break;
    const double step = -f / df;
    t += step;
    if (std::abs(step) <= 1e-16 * (t + a2.maxCoeff())) break;
  }
  const Vec2 local = a2.cwiseProduct(y).cwiseQuotient(Vec2(a2.array() + t));
  return e.center + e.frame * local;
}

// Golden-section search of |z - b(alpha)| over boundary points parametrized
// by the polar angle about the anchor.
Point2 angular_projection(const ConvexTarget& target, const Point2& z) {
  const Point2 anchor = target.anchor();
  auto boundary_at = [&](double a) { return target.boundary_point(Vec2(std::cos(a), std::sin(a))); };
  auto dist_at = [&](double a) { return (boundary_at(a) - z).norm(); };

  constexpr int kSamples = 720;
  const double step = 2.0 * std::numbers::pi / kSamples;
  const double start = std::atan2(z.y() - anchor.y(), z.x() - anchor.x());
  int best = 0;
  double best_d = dist_at(start);
  for (int i = 1; i < kSamples; ++i) {
    const double d = dist_at(start + i * step);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double lo = start + (best - 1) * step;
  double hi = start + (best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = dist_at(a);
  double fb = dist_at(b);
  for (int it = 0; it < 120 && hi - lo > 1e-15; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = dist_at(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = dist_at(b);
    }
  }
  return boundary_at(0.5 * (lo + hi));
}

void check_implicit(const ImplicitSmooth& s) {
  if (!s.h || !s.grad_h) throw InvalidArgument("implicit target: h and grad_h are required");
  if (!(s.bounding_radius > 0.0) || !std::isfinite(s.bounding_radius)) {
    throw InvalidArgument("implicit target: bounding_radius must be positive");
  }
  require_finite(s.anchor, "implicit target anchor");
  if (!(s.h(s.anchor) < 0.0)) throw InvalidArgument("implicit target: h(anchor) must be negative");

  // Midpoint convexity spot check on points of the sublevel set.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point2> inside;
  for (int i = 0; i < 4000 && inside.size() < 64; ++i) {
    const Point2 z = s.anchor + s.bounding_radius * Vec2(unit(rng), unit(rng));
    if (s.h(z) <= 0.0) inside.push_back(z);
  }
  for (std::size_t i = 0; i < inside.size(); ++i) {
    for (std::size_t j = i + 1; j < inside.size(); ++j) {
      if (s.h(0.5 * (inside[i] + inside[j])) > 1e-9) {
        throw InvalidArgument("implicit target: sublevel set failed the midpoint convexity check");
      }
    }
  }
}

}  // namespace

void require_finite(const Point2& z, const char* what) {
  if (!z.allFinite()) throw InvalidArgument(std::string(what) + ": coordinates must be finite");
}

ConvexTarget ConvexTarget::circle(const Point2& center, double radius) {
  require_finite(center, "circle center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("circle radius must be positive");
  }
  return ConvexTarget(Circle{center, radius});
}

ConvexTarget ConvexTarget::ellipse(const Point2& center, const Vec2& semi_axes, double rotation) {
  require_finite(center, "ellipse center");
  if (!(semi_axes.x() > 0.0 && semi_axes.y() > 0.0) || !semi_axes.allFinite()) {
    throw InvalidArgument("ellipse semi-axes must be positive");
  }
  if (!std::isfinite(rotation)) throw InvalidArgument("ellipse rotation must be finite");
  return ConvexTarget(Ellipse{center, semi_axes, rotation, rotation_matrix(rotation)});
}

ConvexTarget ConvexTarget::implicit(std::function<double(const Point2&)> h,
                                    std::function<Vec2(const Point2&)> grad_h,
                                    double bounding_radius, const Point2& anchor) {
  ImplicitSmooth s{std::move(h), std::move(grad_h), bounding_radius, anchor};
  check_implicit(s);
  return ConvexTarget(std::move(s));
}

double ConvexTarget::h(const Point2& z) const {
  return std::visit(overloaded{
                        [&](const Circle& c) { return (z - c.center).squaredNorm() - c.radius * c.radius; },
                        [&](const Ellipse& e) {
                          const Vec2 l = e.frame.transpose() * (z - e.center);
                          return l.cwiseQuotient(e.semi_axes).squaredNorm() - 1.0;
                        },
                        [&](const ImplicitSmooth& s) { return s.h(z); },
                    },
                    shape_);
}

Vec2 ConvexTarget::grad_h(const Point2& z) const {
  return std::visit(overloaded{
                        [&](const Circle& c) -> Vec2 { return 2.0 * (z - c.center); },
                        [&](const Ellipse& e) -> Vec2 {
                          const Eigen::Matrix2d rot = e.frame;
                          const Vec2 l = rot.transpose() * (z - e.center);
                          const Vec2 gl(2.0 * l.x() / (e.semi_axes.x() * e.semi_axes.x()),
                                        2.0 * l.y() / (e.semi_axes.y() * e.semi_axes.y()));
                          return rot * gl;
                        },
                        [&](const ImplicitSmooth& s) -> Vec2 { return s.grad_h(z); },
                    },
                    shape_);
}

Eigen::Matrix2d ConvexTarget::hessian_h(const Point2& z) const {
  return std::visit(
      overloaded{
          [&](const Circle&) -> Eigen::Matrix2d { return 2.0 * Eigen::Matrix2d::Identity(); },
          [&](const Ellipse& e) -> Eigen::Matrix2d {
            const Eigen::Matrix2d rot = e.frame;
            const Vec2 d(2.0 / (e.semi_axes.x() * e.semi_axes.x()),
                         2.0 / (e.semi_axes.y() * e.semi_axes.y()));
            return rot * d.asDiagonal() * rot.transpose();
          },
          [&](const ImplicitSmooth& s) -> Eigen::Matrix2d {
            const double eps = fd_step(z);
            Eigen::Matrix2d hess;
            hess.col(0) = (s.grad_h(z + Vec2(eps, 0.0)) - s.grad_h(z - Vec2(eps, 0.0))) / (2.0 * eps);
            hess.col(1) = (s.grad_h(z + Vec2(0.0, eps)) - s.grad_h(z - Vec2(0.0, eps))) / (2.0 * eps);
            return 0.5 * (hess + hess.transpose());
          },
      },
      shape_);
}

Point2 ConvexTarget::anchor() const {
  return std::visit(overloaded{
                        [](const Circle& c) { return c.center; },
                        [](const Ellipse& e) { return e.center; },
                        [](const ImplicitSmooth& s) { return s.anchor; },
                    },
                    shape_);
}

double ConvexTarget::bounding_radius() const {
  return std::visit(overloaded{
                        [](const Circle& c) { return c.radius; },
                        [](const Ellipse& e) { return e.semi_axes.maxCoeff(); },
                        [](const ImplicitSmooth& s) { return s.bounding_radius; },
                    },
                    shape_);
}

Eigen::AlignedBox2d ConvexTarget::bounding_box() const {
  return std::visit(
      overloaded{
          [](const Circle& c) {
            const Vec2 r = Vec2::Constant(c.radius);
            return Eigen::AlignedBox2d(c.center - r, c.center + r);
          },
          [](const Ellipse& e) {
            const double cs = std::cos(e.rotation);
            const double sn = std::sin(e.rotation);
            const double a = e.semi_axes.x();
            const double b = e.semi_axes.y();
            const Vec2 half(std::sqrt(a * a * cs * cs + b * b * sn * sn),
                            std::sqrt(a * a * sn * sn + b * b * cs * cs));
            return Eigen::AlignedBox2d(e.center - half, e.center + half);
          },
          [](const ImplicitSmooth& s) {
            const Vec2 r = Vec2::Constant(s.bounding_radius);
            return Eigen::AlignedBox2d(s.anchor - r, s.anchor + r);
          },
      },
      shape_);
}

Point2 ConvexTarget::boundary_point(const Vec2& direction) const {
  const Vec2 u = direction.normalized();
  return std::visit(overloaded{
                        [&](const Circle& c) -> Point2 { return c.center + c.radius * u; },
                        [&](const Ellipse& e) -> Point2 {
                          const Vec2 l = e.frame.transpose() * u;
                          const double t = 1.0 / l.cwiseQuotient(e.semi_axes).norm();
                          return e.center + t * u;
                        },
                        [&](const ImplicitSmooth& s) -> Point2 {
                          double lo = 0.0;
                          double hi = 1.01 * s.bounding_radius;
                          if (!(s.h(s.anchor + hi * u) > 0.0)) {
                            throw InvalidArgument("implicit target extends past its bounding radius");
                          }
                          for (int i = 0; i < 200 && hi - lo > 1e-16 * s.bounding_radius; ++i) {
                            const double mid = 0.5 * (lo + hi);
                            (s.h(s.anchor + mid * u) <= 0.0 ? lo : hi) = mid;
                          }
                          return s.anchor + lo * u;
                        },
                    },
                    shape_);
}

bool contains(const ConvexTarget& target, const Point2& z) {
  require_finite(z, "contains");
  if (const auto* c = std::get_if<Circle>(&target.shape())) {
    return (z - c->center).norm() <= c->radius;
  }
  return target.h(z) <= 0.0;
}

Point2 project(const ConvexTarget& target, const Point2& z) {
  require_finite(z, "project");
  if (contains(target, z)) return z;
  if (const auto* c = std::get_if<Circle>(&target.shape())) {
    return c->center + c->radius * (z - c->center).normalized();
  }

  if (const auto* e = std::get_if<Ellipse>(&target.shape())) {
    const Point2 p = project_ellipse(*e, z);
    const double scale = std::max({1.0, e->semi_axes.maxCoeff(), (z - e->center).norm()});
    if (projection_kkt_residual(target, z, p) <= kKktTolerance * scale) return p;
  }

  const Point2 start = target.boundary_point(z - target.anchor());
  if (auto r = newton_projection(target, z, start, kNewtonBudget); r.converged) return r.point;

  // Newton stalled: locate the basin by angular search, then polish.
  const Point2 coarse = angular_projection(target, z);
  if (auto r = newton_projection(target, z, coarse, kNewtonBudget); r.converged) return r.point;
  std::ostringstream msg;
  msg.precision(17);
  msg << "projection of (" << z.x() << ", " << z.y() << ") onto target did not reach the KKT tolerance";
  throw NonConvergence(msg.str());
}

double distance(const ConvexTarget& target, const Point2& z) {
  if (const auto* c = std::get_if<Circle>(&target.shape())) {
    require_finite(z, "distance");
    return std::max((z - c->center).norm() - c->radius, 0.0);
  }
  return (z - project(target, z)).norm();
}

double projection_kkt_residual(const ConvexTarget& target, const Point2& z, const Point2& p) {
  if ((z - p).norm() == 0.0) return std::max(target.h(p), 0.0);
  const Vec2 g = target.grad_h(p);
  const double gn = g.norm();
  return std::abs(cross(z - p, g)) / gn + std::abs(target.h(p)) / gn;
}

}  // namespace tdg
