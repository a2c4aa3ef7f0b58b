#pragma once

// Reference computations for the tests. Nothing here calls the solvers under
// test; shapes are described by explicit boundary parametrizations.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "tdg/apollonius.hpp"
#include "tdg/geometry.hpp"

namespace tdg::testing {

inline constexpr double kPi = std::numbers::pi;

/// A target together with an explicit boundary parametrization over [0, 2pi).
struct TestTarget {
  ConvexTarget target;
  std::function<Point2(double)> boundary;
  std::function<bool(const Point2&)> inside;
  const char* kind;
};

inline TestTarget circle_target(const Point2& c, double r) {
  return {ConvexTarget::circle(c, r), [=](double t) { return Point2(c + r * Vec2(std::cos(t), std::sin(t))); },
          [=](const Point2& z) { return (z - c).norm() <= r; }, "circle"};
}

inline TestTarget ellipse_target(const Point2& c, double a, double b, double rot) {
  const double cs = std::cos(rot), sn = std::sin(rot);
  auto to_world = [=](double x, double y) { return Point2(c.x() + cs * x - sn * y, c.y() + sn * x + cs * y); };
  return {ConvexTarget::ellipse(c, Vec2(a, b), rot),
          [=](double t) { return to_world(a * std::cos(t), b * std::sin(t)); },
          [=](const Point2& z) {
            const Vec2 d = z - c;
            const double x = cs * d.x() + sn * d.y();
            const double y = -sn * d.x() + cs * d.y();
            return (x / a) * (x / a) + (y / b) * (y / b) <= 1.0;
          },
          "ellipse"};
}

/// |x/a|^4 + |y/b|^4 <= 1, given to the library as an implicit function.
inline TestTarget superellipse_target(const Point2& c, double a, double b) {
  auto h = [=](const Point2& z) {
    const double x = (z.x() - c.x()) / a, y = (z.y() - c.y()) / b;
    return x * x * x * x + y * y * y * y - 1.0;
  };
  auto g = [=](const Point2& z) {
    const double x = (z.x() - c.x()) / a, y = (z.y() - c.y()) / b;
    return Vec2(4.0 * x * x * x / a, 4.0 * y * y * y / b);
  };
  auto root = [](double v) { return std::copysign(std::sqrt(std::abs(v)), v); };
  return {ConvexTarget::implicit(h, g, std::max(a, b) * 1.2, c),
          [=](double t) { return Point2(c.x() + a * root(std::cos(t)), c.y() + b * root(std::sin(t))); },
          [=](const Point2& z) { return h(z) <= 0.0; }, "superellipse"};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

 private:
  std::mt19937_64 gen_;
};

/// kind: 0 circle, 1 ellipse, 2 superellipse; -1 picks at random.
inline TestTarget random_target(Rng& rng, int kind = -1) {
  if (kind < 0) kind = rng.index(3);
  const Point2 c = rng.point(-0.5, 0.5);
  switch (kind) {
    case 0:
      return circle_target(c, rng.uniform(0.1, 0.6));
    case 1:
      return ellipse_target(c, rng.uniform(0.15, 0.7), rng.uniform(0.08, 0.4), rng.uniform(-kPi, kPi));
    default:
      return superellipse_target(c, rng.uniform(0.15, 0.6), rng.uniform(0.1, 0.5));
  }
}

/// Apollonius circle from the two division points of PE.
inline std::pair<Point2, double> apollonius_by_division(const Point2& p, const Point2& e, double g) {
  const Point2 inner = (e + g * p) / (1.0 + g);
  const Point2 outer = (e - g * p) / (1.0 - g);
  return {Point2(0.5 * (inner + outer)), 0.5 * (outer - inner).norm()};
}

/// Distance to the target by dense boundary sampling plus golden-section refinement.
inline double boundary_distance(const TestTarget& t, const Point2& z, int samples = 4000) {
  if (t.inside(z)) return 0.0;
  auto d = [&](double a) { return (t.boundary(a) - z).norm(); };
  const double step = 2.0 * kPi / samples;
  int best = 0;
  double best_d = d(0.0);
  for (int i = 1; i < samples; ++i) {
    const double v = d(i * step);
    if (v < best_d) {
      best_d = v;
      best = i;
    }
  }
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    if (d(a) < d(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best_d, d(0.5 * (lo + hi)));
}

inline double escape_objective_ref(const Point2& p, const Point2& e, double g, const Point2& z) {
  return -(z - p).norm() + (z - e).norm() / g;
}

/// Escape point by scanning the target boundary inside the Apollonius disk.
/// Valid for strict escape states with the evader outside the target, where
/// the minimizer lies on the boundary of the target.
inline Point2 boundary_escape_oracle(const TestTarget& t, const Point2& p, const Point2& e, double g,
                                     int samples = 20000) {
  const auto [c, r] = apollonius_by_division(p, e, g);
  auto f = [&](double a) {
    const Point2 z = t.boundary(a);
    if ((z - c).norm() > r) return std::numeric_limits<double>::infinity();
    return escape_objective_ref(p, e, g, z);
  };
  const double step = 2.0 * kPi / samples;
  int best = -1;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double v = f(i * step);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  if (best < 0) return Point2::Constant(std::numeric_limits<double>::quiet_NaN());
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double k = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double a = hi - k * (hi - lo), b = lo + k * (hi - lo);
    if (f(a) < f(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double mid = 0.5 * (lo + hi);
  return f(mid) <= best_f ? t.boundary(mid) : t.boundary(best * step);
}

/// Capture point by sampling the Apollonius circle.
inline Point2 sampled_capture_point(const TestTarget& t, const Point2& p, const Point2& e, double g,
                                    int samples = 3600) {
  const auto [c, r] = apollonius_by_division(p, e, g);
  auto at = [&](double a) { return Point2(c + r * Vec2(std::cos(a), std::sin(a))); };
  auto d = [&](double a) { return boundary_distance(t, at(a), 720); };
  const double step = 2.0 * kPi / samples;
  int best = 0;
  double best_d = d(0.0);
  for (int i = 1; i < samples; ++i) {
    const double v = d(i * step);
    if (v < best_d) {
      best_d = v;
      best = i;
    }
  }
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double k = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double a = hi - k * (hi - lo), b = lo + k * (hi - lo);
    if (d(a) < d(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return at(0.5 * (lo + hi));
}

/// Central differences with step h on each of the four state coordinates.
template <class F>
Eigen::Vector4d fd_gradient(const GameState& x, F value, double h = 1e-6) {
  Eigen::Vector4d g;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d plus = x.as_vector(), minus = x.as_vector();
    plus[i] += h;
    minus[i] -= h;
    g[i] = (value(GameState::from_vector(plus)) - value(GameState::from_vector(minus))) / (2.0 * h);
  }
  return g;
}

/// Barrier value computed from the division-point circle and a sampled distance.
inline double barrier_ref(const TestTarget& t, const Point2& p, const Point2& e, double g) {
  const auto [c, r] = apollonius_by_division(p, e, g);
  return boundary_distance(t, c) - r;
}

}  // namespace tdg::testing
