#include "tdg/escape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "tdg/kind.hpp"

namespace tdg {

namespace {

constexpr double kSlack = 1e-12;

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

double polar_angle(const Point2& z, const Point2& about) {
  const double a = std::atan2(z.y() - about.y(), z.x() - about.x());
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

Point2 project_disk(const ApolloniusDisk& disk, const Point2& z) {
  const Vec2 d = z - disk.center;
  const double n = d.norm();
  if (n <= disk.radius) return z;
  return disk.center + disk.radius * d / n;
}

std::vector<Point2> circle_corners(const Circle& c, const ApolloniusDisk& disk) {
  const Vec2 delta = disk.center - c.center;
  const double d = delta.norm();
  const double r1 = c.radius;
  const double r2 = disk.radius;
  if (d == 0.0 || d > r1 + r2 || d < std::abs(r1 - r2)) return {};
  const Vec2 e = delta / d;
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(r1 * r1 - a * a, 0.0));
  const Point2 base = c.center + a * e;
  if (h == 0.0) return {base};
  return {base + h * perp(e), base - h * perp(e)};
}

// Crossings of the target boundary along the Apollonius circle. Sampling is
// restricted to the arc inside the target's bounding disk, and shallow dips
// between samples are found by refining each sampled local minimum of h.
std::vector<Point2> generic_corners(const ConvexTarget& target, const ApolloniusDisk& disk) {
  constexpr int kSamples = 512;
  const double two_pi = 2.0 * std::numbers::pi;
  auto at = [&](double t) { return Point2(disk.center + disk.radius * Vec2(std::cos(t), std::sin(t))); };
  auto h = [&](double t) { return target.h(at(t)); };

  double t0 = 0.0, span = two_pi;
  const Vec2 delta = target.anchor() - disk.center;
  const double d = delta.norm();
  const double rb = target.bounding_radius();
  if (d > disk.radius + rb) return {};
  if (d > 0.0 && d > std::abs(disk.radius - rb)) {
    const double c = (disk.radius * disk.radius + d * d - rb * rb) / (2.0 * disk.radius * d);
    const double half = std::acos(std::clamp(c, -1.0, 1.0));
    t0 = std::atan2(delta.y(), delta.x()) - half;
    span = 2.0 * half;
  } else if (disk.radius > d + rb) {
    return {};
  }

  auto bisect = [&](double lo, double hi) {
    const bool lo_inside = h(lo) <= 0.0;
    for (int k = 0; k < 100; ++k) {
      const double mid = 0.5 * (lo + hi);
      ((h(mid) <= 0.0) == lo_inside ? lo : hi) = mid;
    }
    return at(lo_inside ? lo : hi);
  };

  const double step = span / kSamples;
  std::vector<double> ts(kSamples + 1), hs(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) {
    ts[i] = t0 + i * step;
    hs[i] = h(ts[i]);
  }
  std::vector<Point2> out;
  for (int i = 1; i <= kSamples; ++i) {
    if ((hs[i - 1] <= 0.0) != (hs[i] <= 0.0)) out.push_back(bisect(ts[i - 1], ts[i]));
  }
  for (int i = 1; i < kSamples; ++i) {
    if (hs[i] <= 0.0 || hs[i] > hs[i - 1] || hs[i] > hs[i + 1]) continue;
    double lo = ts[i - 1], hi = ts[i + 1];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double ha = h(a), hb = h(b);
    for (int k = 0; k < 200 && ha > 0.0 && hb > 0.0; ++k) {
      if (ha < hb) {
        hi = b; b = a; hb = ha;
        a = hi - g * (hi - lo); ha = h(a);
      } else {
        lo = a; a = b; ha = hb;
        b = lo + g * (hi - lo); hb = h(b);
      }
    }
    const double tm = ha <= 0.0 ? a : b;
    if (h(tm) > 0.0) continue;
    out.push_back(bisect(ts[i - 1], tm));
    out.push_back(bisect(tm, ts[i + 1]));
  }
  return out;
}

struct SubproblemResult {
  Point2 point;
  int iterations;
};

// Newton on the KKT system of  min f  s.t.  c(z) = 0  with c one of the two
// constraint functions. Succeeds only at a point with a nonnegative
// multiplier, so the result is a KKT point of the inequality problem.
struct Constraint {
  std::function<double(const Point2&)> value;
  std::function<Vec2(const Point2&)> grad;
  std::function<Eigen::Matrix2d(const Point2&)> hessian;
};

struct Smooth {
  std::function<Vec2(const Point2&)> grad;
  std::function<Eigen::Matrix2d(const Point2&)> hessian;
};

// Hessian of |z - a| is (I - u u^T) / |z - a|.
Eigen::Matrix2d norm_hessian(const Point2& z, const Point2& a) {
  const Vec2 d = z - a;
  const double n = d.norm();
  const Vec2 u = d / n;
  return (Eigen::Matrix2d::Identity() - u * u.transpose()) / n;
}

std::optional<Point2> newton_on_boundary(const Constraint& c, const Smooth& f_, Point2 z) {
  auto residual = [&](const Point2& y, double lam) {
    Eigen::Vector3d f;
    f.head<2>() = f_.grad(y) + lam * c.grad(y);
    f(2) = c.value(y);
    return f;
  };
  Vec2 gc = c.grad(z);
  if (gc.squaredNorm() == 0.0) return std::nullopt;
  double lam = -f_.grad(z).dot(gc) / gc.squaredNorm();
  Eigen::Vector3d f = residual(z, lam);
  for (int it = 0; it < 30; ++it) {
    gc = c.grad(z);
    Eigen::Matrix3d jac;
    jac.topLeftCorner<2, 2>() = f_.hessian(z) + lam * c.hessian(z);
    jac.topRightCorner<2, 1>() = gc;
    jac.bottomLeftCorner<1, 2>() = gc.transpose();
    jac(2, 2) = 0.0;
    const Eigen::Vector3d delta = jac.fullPivLu().solve(-f);
    if (!delta.allFinite()) return std::nullopt;
    z += delta.head<2>();
    lam += delta(2);
    const double before = f.norm();
    f = residual(z, lam);
    if (!f.allFinite()) return std::nullopt;
    if (f.norm() < 1e-14 * (1.0 + std::abs(lam))) break;
    if (it > 5 && f.norm() > before) return std::nullopt;
  }
  if (!(f.norm() < 1e-12 * (1.0 + std::abs(lam))) || lam < 0.0) return std::nullopt;
  return z;
}

Constraint target_constraint(const ConvexTarget& target) {
  return {[&target](const Point2& z) { return target.h(z); },
          [&target](const Point2& z) { return target.grad_h(z); },
          [&target](const Point2& z) { return target.hessian_h(z); }};
}

Constraint disk_constraint(const ApolloniusDisk& disk) {
  return {[disk](const Point2& z) { return (z - disk.center).squaredNorm() - disk.radius * disk.radius; },
          [disk](const Point2& z) -> Vec2 { return 2.0 * (z - disk.center); },
          [](const Point2&) -> Eigen::Matrix2d { return 2.0 * Eigen::Matrix2d::Identity(); }};
}

// Which constraint is (closer to) active at a boundary point of the region.
bool disk_is_active(const EscapeRegion& region, const Point2& z) {
  const ConvexTarget& target = region.target();
  const ApolloniusDisk& disk = region.disk();
  if (!region.in_target(z)) return false;
  if (!region.in_disk(z)) return true;
  return std::abs((z - disk.center).norm() - disk.radius) < std::abs(target.h(z)) / target.grad_h(z).norm();
}

// Minimizes |z - evader| / gamma - slope . z over the region by projected
// gradient with Barzilai-Borwein steps and Armijo backtracking, from a
// feasible start. Once the iterates settle, a Newton step on the active
// boundary finishes the solve. The returned point never has a larger
// objective than start.
SubproblemResult solve_subproblem(const EscapeRegion& region, const Point2& evader, double gamma,
                                  const Vec2& slope, const Point2& start, const DcSolverConfig& config) {
  auto q = [&](const Point2& z) { return (z - evader).norm() / gamma - slope.dot(z); };
  auto grad = [&](const Point2& z) -> Vec2 { return (z - evader).normalized() / gamma - slope; };

  const ApolloniusDisk& disk = region.disk();
  const Smooth smooth{grad, [&](const Point2& z) -> Eigen::Matrix2d { return norm_hessian(z, evader) / gamma; }};
  const double settle = 1e-6 * std::max(disk.radius, 1e-12);

  Point2 z = start;
  double qz = q(z);
  Vec2 gz = grad(z);
  double step = gamma * std::max((z - evader).norm(), 1e-12);
  bool tried_newton = false;
  int it = 0;
  for (; it < config.max_inner_iterations; ++it) {
    Point2 cand = z;
    double qc = qz;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      cand = region.project(z - step * gz);
      qc = q(cand);
      if (qc <= qz - 1e-4 / step * (cand - z).squaredNorm()) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Vec2 s = cand - z;
    const Vec2 gc = grad(cand);
    const Vec2 y = gc - gz;
    const double moved = s.norm();
    z = cand;
    qz = qc;
    gz = gc;
    if (moved < config.subproblem_tolerance) break;
    if (!tried_newton && moved < settle) {
      tried_newton = true;
      const std::optional<Point2> polished = newton_on_boundary(
          disk_is_active(region, z) ? disk_constraint(disk) : target_constraint(region.target()), smooth, z);
      if (polished && region.contains(*polished) && q(*polished) <= qz + 1e-15 * (1.0 + std::abs(qz)) &&
          ((*polished) - z).norm() < 100.0 * settle) {
        return {*polished, it + 1};
      }
    }
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-14, 1e6) : 2.0 * step;
  }
  return {z, it};
}

EscapeCandidate run_ccp(const GameState& state, const SpeedRatio& ratio, const EscapeRegion& region,
                        const Point2& start, const DcSolverConfig& config) {
  EscapeCandidate c{start, start, escape_objective(state, ratio, start), 0, false, {}};
  c.objective_history.push_back(c.objective);
  Point2 z = start;
  for (int it = 1; it <= config.max_outer_iterations; ++it) {
    const Vec2 slope = (z - state.pursuer()).normalized();
    const SubproblemResult sub = solve_subproblem(region, state.evader(), ratio.gamma(), slope, z, config);
    const double obj = escape_objective(state, ratio, sub.point);
    c.iterations = it;
    if (obj > c.objective) {
      // Majorization guarantees descent for exact subproblem solves; a rise
      // means the subproblem is at its resolution limit.
      c.converged = true;
      break;
    }
    const double decrease = c.objective - obj;
    z = sub.point;
    c.point = z;
    c.objective = obj;
    c.objective_history.push_back(obj);
    if (decrease < config.objective_tolerance) {
      c.converged = true;
      break;
    }
  }
  // CCP converges linearly along a curved boundary; Newton on the KKT system
  // of the original program finishes the job when the iterate is close.
  const Point2 p = state.pursuer();
  const Point2 e = state.evader();
  const double g = ratio.gamma();
  const Smooth objective{
      [&](const Point2& y) -> Vec2 { return (y - e).normalized() / g - (y - p).normalized(); },
      [&](const Point2& y) -> Eigen::Matrix2d { return norm_hessian(y, e) / g - norm_hessian(y, p); }};
  const Constraint active =
      disk_is_active(region, c.point) ? disk_constraint(region.disk()) : target_constraint(region.target());
  if (const auto polished = newton_on_boundary(active, objective, c.point)) {
    const double obj = escape_objective(state, ratio, *polished);
    if (region.contains(*polished) && obj <= c.objective + 1e-15 * (1.0 + std::abs(c.objective)) &&
        (*polished - c.point).norm() < 1e-3 * region.disk().radius) {
      c.point = *polished;
      c.objective = obj;
      c.objective_history.push_back(obj);
    }
  }
  return c;
}

EscapeSolution make_solution(const GameState& state, const SpeedRatio& ratio, const Point2& x) {
  EscapeSolution s{};
  s.escape_point = x;
  s.u_pursuer = (x - state.pursuer()).normalized();
  s.degenerate = (x - state.evader()).norm() < kDegenerateSeparation;
  s.u_evader = s.degenerate ? s.u_pursuer : Vec2((x - state.evader()).normalized());
  s.value = -escape_objective(state, ratio, x);
  s.psi = std::atan2(s.u_pursuer.y(), s.u_pursuer.x());
  s.varphi = std::atan2(s.u_evader.y(), s.u_evader.x());
  s.converged = true;
  s.certified_by_oracle = false;
  s.solver_iterations = 0;
  return s;
}

void require_feasible(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  if (!escape_feasible(state, target, ratio)) {
    throw Infeasible("escape game requested for a state in the capture space");
  }
}

}  // namespace

void validate(const DcSolverConfig& config) {
  if (config.max_outer_iterations <= 0 || config.max_inner_iterations <= 0) {
    throw InvalidArgument("solver iteration limits must be positive");
  }
  if (!(config.objective_tolerance > 0.0) || !(config.subproblem_tolerance > 0.0)) {
    throw InvalidArgument("solver tolerances must be positive");
  }
  if (config.multi_start_count < 0) throw InvalidArgument("multi_start_count must be nonnegative");
}

EscapeRegion::EscapeRegion(ConvexTarget target, const ApolloniusDisk& disk)
    : target_(std::move(target)), disk_(disk) {
  if (const auto* c = std::get_if<Circle>(&target_.shape())) {
    corners_ = circle_corners(*c, disk_);
  } else {
    corners_ = generic_corners(target_, disk_);
  }
}

bool EscapeRegion::in_disk(const Point2& z) const {
  return (z - disk_.center).norm() <= disk_.radius * (1.0 + kSlack) + kSlack;
}

bool EscapeRegion::in_target(const Point2& z) const {
  const double hz = target_.h(z);
  if (hz <= 0.0) return true;
  return hz / target_.grad_h(z).norm() <= kSlack * (1.0 + target_.bounding_radius());
}

bool EscapeRegion::contains(const Point2& z) const { return in_disk(z) && in_target(z); }

Point2 EscapeRegion::project(const Point2& z) const {
  const Point2 onto_target = tdg::project(target_, z);
  if (in_disk(onto_target)) return onto_target;
  const Point2 onto_disk = project_disk(disk_, z);
  if (in_target(onto_disk)) return onto_disk;
  if (corners_.empty()) {
    // Tangent intersection: the region is the single point nearest the center.
    return tdg::project(target_, disk_.center);
  }
  return *std::min_element(corners_.begin(), corners_.end(), [&](const Point2& a, const Point2& b) {
    return (a - z).squaredNorm() < (b - z).squaredNorm();
  });
}

Eigen::AlignedBox2d EscapeRegion::bounding_box() const {
  const Vec2 r = Vec2::Constant(disk_.radius);
  const Eigen::AlignedBox2d disk_box(disk_.center - r, disk_.center + r);
  return disk_box.intersection(target_.bounding_box());
}

Point2 dykstra_project(const ConvexTarget& target, const ApolloniusDisk& disk, const Point2& z,
                       int max_iterations, double tolerance) {
  Point2 x = z;
  Vec2 p = Vec2::Zero();
  Vec2 q = Vec2::Zero();
  for (int it = 0; it < max_iterations; ++it) {
    const Point2 y = tdg::project(target, x + p);
    p = x + p - y;
    const Point2 next = project_disk(disk, y + q);
    q = y + q - next;
    const double change = (next - x).norm();
    x = next;
    if (change <= tolerance && (x - y).norm() <= 1e-13) break;
  }
  return x;
}

double escape_objective(const GameState& state, const SpeedRatio& ratio, const Point2& z) {
  return -(z - state.pursuer()).norm() + (z - state.evader()).norm() / ratio.gamma();
}

bool escape_feasible(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  return barrier_value(state, target, ratio) <= 0.0;
}

EscapeSolution solve_escape_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                  const DcSolverConfig& config, const std::optional<Point2>& hint) {
  validate(config);
  const ApolloniusDisk disk = apollonius_disk(state, ratio);
  const Point2 anchor_point = tdg::project(target, disk.center);
  if ((anchor_point - disk.center).norm() - disk.radius > 0.0) {
    throw Infeasible("escape game requested for a state in the capture space");
  }

  if (contains(target, state.evader())) {
    // Already in the target: the game ends where the evader stands.
    EscapeSolution s = make_solution(state, ratio, state.evader());
    s.candidates.push_back({state.evader(), state.evader(), -s.value, 0, true, {-s.value}});
    return s;
  }

  const EscapeRegion region(target, disk);
  std::vector<Point2> starts{anchor_point};
  const Vec2 base = anchor_point - disk.center;
  const double base_angle = base.norm() > 0.0 ? std::atan2(base.y(), base.x()) : 0.0;
  for (int k = 0; k < config.multi_start_count; ++k) {
    const double a = base_angle + 2.0 * std::numbers::pi * (k + 0.5) / config.multi_start_count;
    starts.push_back(region.project(disk.center + disk.radius * Vec2(std::cos(a), std::sin(a))));
  }
  if (hint && hint->allFinite()) starts.push_back(region.project(*hint));

  std::vector<EscapeCandidate> candidates;
  candidates.reserve(starts.size());
  for (const Point2& start : starts) candidates.push_back(run_ccp(state, ratio, region, start, config));

  // Best objective wins; near-ties go to the smallest polar angle about the target anchor.
  const Point2 anchor = target.anchor();
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double tie = 1e-10 * (1.0 + std::abs(candidates[best].objective));
    const double diff = candidates[i].objective - candidates[best].objective;
    if (diff < -tie ||
        (std::abs(diff) <= tie && polar_angle(candidates[i].point, anchor) < polar_angle(candidates[best].point, anchor) &&
         (candidates[i].point - candidates[best].point).norm() > 1e-7)) {
      best = i;
    }
  }

  EscapeSolution s = make_solution(state, ratio, candidates[best].point);
  s.solver_iterations = candidates[best].iterations;
  s.converged = candidates[best].converged;
  s.candidates = std::move(candidates);
  return s;
}

Point2 brute_force_escape_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                int grid_resolution) {
  if (grid_resolution < 2) throw InvalidArgument("grid_resolution must be at least 2");
  require_feasible(state, target, ratio);
  const ApolloniusDisk disk = apollonius_disk(state, ratio);
  if (contains(target, state.evader())) return state.evader();

  const Vec2 r = Vec2::Constant(disk.radius);
  const Eigen::AlignedBox2d box = Eigen::AlignedBox2d(disk.center - r, disk.center + r).intersection(target.bounding_box());
  const Vec2 span = box.sizes();
  const double diameter = span.norm();

  auto feasible = [&](const Point2& z) { return (z - disk.center).norm() <= disk.radius && target.h(z) <= 0.0; };

  // The projection of the Apollonius center always lies in the region.
  Point2 best = tdg::project(target, disk.center);
  double best_obj = escape_objective(state, ratio, best);
  const double inv = 1.0 / (grid_resolution - 1);
  for (int i = 0; i < grid_resolution; ++i) {
    for (int j = 0; j < grid_resolution; ++j) {
      const Point2 z = box.min() + Vec2(span.x() * i * inv, span.y() * j * inv);
      if (!feasible(z)) continue;
      const double obj = escape_objective(state, ratio, z);
      if (obj < best_obj) {
        best_obj = obj;
        best = z;
      }
    }
  }

  // Projected compass search: 16 directions, halving the step per level.
  constexpr int kDirections = 16;
  std::array<Vec2, kDirections> dirs;
  for (int k = 0; k < kDirections; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kDirections;
    dirs[k] = Vec2(std::cos(a), std::sin(a));
  }
  double step = diameter / grid_resolution;
  for (int level = 0; level < 20; ++level) {
    for (int poll = 0; poll < 200; ++poll) {
      Point2 poll_best = best;
      double poll_obj = best_obj;
      for (const Vec2& d : dirs) {
        const Point2 cand = dykstra_project(target, disk, best + step * d);
        const double obj = escape_objective(state, ratio, cand);
        if (obj < poll_obj) {
          poll_obj = obj;
          poll_best = cand;
        }
      }
      if (!(poll_obj < best_obj)) break;
      best = poll_best;
      best_obj = poll_obj;
    }
    step *= 0.5;
  }
  return best;
}

double value_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                    const DcSolverConfig& config) {
  return solve_escape_point(state, target, ratio, config).value;
}

Eigen::Vector4d grad_value_escape(const EscapeSolution& solution, const SpeedRatio& ratio) {
  if (solution.degenerate) throw DegeneratePoint("escape point coincides with the evader");
  const double k = 1.0 / ratio.gamma();
  return {-std::cos(solution.psi), -std::sin(solution.psi), k * std::cos(solution.varphi),
          k * std::sin(solution.varphi)};
}

Eigen::Vector4d grad_value_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                  const DcSolverConfig& config) {
  if (!(barrier_value(state, target, ratio) < 0.0)) {
    throw Infeasible("escape gradient requires a strict escape state");
  }
  return grad_value_escape(solve_escape_point(state, target, ratio, config), ratio);
}

double hji_residual_escape(const EscapeSolution& solution, const SpeedRatio& ratio, const Vec2& u_pursuer,
                           const Vec2& u_evader) {
  return grad_value_escape(solution, ratio).dot(velocity_field(ratio, u_pursuer, u_evader));
}

double hji_residual_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                           const DcSolverConfig& config) {
  if (!(barrier_value(state, target, ratio) < 0.0)) {
    throw Infeasible("escape HJI residual requires a strict escape state");
  }
  const EscapeSolution s = solve_escape_point(state, target, ratio, config);
  return hji_residual_escape(s, ratio, s.u_pursuer, s.u_evader);
}

}  // namespace tdg
