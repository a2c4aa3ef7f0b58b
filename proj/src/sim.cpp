#include "tdg/sim.hpp"

#include <cmath>
#include <optional>

#include "tdg/game.hpp"

namespace tdg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool needs_solution(const StrategyMode& m) { return std::holds_alternative<Optimal>(m); }

Vec2 heading_of(const StrategyMode& mode, const GameState& state, const Vec2& optimal) {
  return std::visit(overloaded{
                        [&](const Optimal&) -> Vec2 { return optimal; },
                        [&](const FixedHeading& f) -> Vec2 { return {std::cos(f.heading), std::sin(f.heading)}; },
                        [&](const Custom& c) -> Vec2 {
                          const Vec2 u = c.rule(state);
                          if (!u.allFinite() || std::abs(u.norm() - 1.0) > 1e-9) {
                            throw InvalidArgument("custom strategy must return a unit vector");
                          }
                          return u;
                        },
                    },
                    mode);
}

// First s in [0, end] at which the evader's straight path is inside the
// target, if any. h is convex along a segment, so a ternary search finds its
// minimum and bisection then finds the first crossing.
std::optional<double> first_entry(const ConvexTarget& target, const Point2& start, const Vec2& velocity,
                                  double end) {
  auto at = [&](double s) { return Point2(start + s * velocity); };
  if (distance(target, start) > velocity.norm() * end + 1e-12) return std::nullopt;

  double inside_at = -1.0;
  if (contains(target, at(end))) {
    inside_at = end;
  } else {
    double lo = 0.0, hi = end;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (target.h(at(m1)) < target.h(at(m2))) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    const double m = 0.5 * (lo + hi);
    if (contains(target, at(m))) inside_at = m;
  }
  if (inside_at < 0.0) return std::nullopt;

  double lo = 0.0, hi = inside_at;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + end); ++it) {
    const double mid = 0.5 * (lo + hi);
    (contains(target, at(mid)) ? hi : lo) = mid;
  }
  return hi;
}

void push_sample(TrajectoryRecord& rec, double t, const Point2& p, const Point2& e) {
  rec.times.push_back(t);
  rec.pursuer_path.push_back(p);
  rec.evader_path.push_back(e);
}

}  // namespace

void validate(const SimConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw InvalidArgument("dt must be positive");
  if (!(config.capture_radius > 0.0)) throw InvalidArgument("capture_radius must be positive");
  if (!(config.max_time > 0.0) || !std::isfinite(config.max_time)) {
    throw InvalidArgument("max_time must be positive");
  }
  validate(config.solver);
}

const char* outcome_name(const Outcome& outcome) {
  return std::visit(overloaded{
                        [](const Captured&) { return "captured"; },
                        [](const Escaped&) { return "escaped"; },
                        [](const Timeout&) { return "timeout"; },
                    },
                    outcome);
}

GameState step(const GameState& state, const Vec2& u_pursuer, const Vec2& u_evader, double dt,
               const SpeedRatio& ratio) {
  return GameState(state.pursuer() + ratio.v_pursuer() * dt * u_pursuer,
                   state.evader() + ratio.v_evader() * dt * u_evader);
}

TrajectoryRecord run(const GameState& initial, const ConvexTarget& target, const SpeedRatio& ratio,
                     const SimConfig& config) {
  validate(config);
  TrajectoryRecord rec;
  if (config.dt >= config.capture_radius / (ratio.v_pursuer() + ratio.v_evader())) {
    rec.warnings.push_back("dt exceeds capture_radius / (v_P + v_E); capture is detected by closest approach");
  }

  const GameOutcome first = solve_game(initial, target, ratio, config.solver);
  rec.initial = first.classification;
  rec.predicted_value = first.value;
  push_sample(rec, 0.0, initial.pursuer(), initial.evader());

  if (contains(target, initial.evader())) {
    rec.outcome = Escaped{0.0, initial.evader(), initial.separation()};
    return rec;
  }
  if (initial.separation() <= config.capture_radius) {
    rec.outcome = Captured{0.0, initial.evader()};
    return rec;
  }

  const bool solve_each_step = needs_solution(config.pursuer_strategy) || needs_solution(config.evader_strategy);
  std::optional<GameOutcome> current = first;
  std::optional<Point2> hint;
  if (first.escape) hint = first.escape->escape_point;
  bool warned_convergence = false;

  GameState x = initial;
  double t = 0.0;
  while (t < config.max_time) {
    const double h = std::min(config.dt, config.max_time - t);
    if (solve_each_step && !current) {
      try {
        current = solve_game(x, target, ratio, config.solver, hint);
      } catch (const Error& e) {
        throw SolverFailure(std::string("solver failed at t = ") + std::to_string(t) + ": " + e.what(), rec);
      }
    }
    Vec2 opt_p = Vec2::Zero(), opt_e = Vec2::Zero();
    if (current) {
      opt_p = current->u_pursuer;
      opt_e = current->u_evader;
      hint = current->escape ? std::optional<Point2>(current->escape->escape_point) : std::nullopt;
      if (current->escape && !current->escape->converged && !warned_convergence) {
        rec.warnings.push_back("escape solver hit its iteration limit; best iterate used");
        warned_convergence = true;
      }
    }
    const Vec2 up = heading_of(config.pursuer_strategy, x, opt_p);
    const Vec2 ue = heading_of(config.evader_strategy, x, opt_e);
    current.reset();

    const Vec2 vp = ratio.v_pursuer() * up;
    const Vec2 ve = ratio.v_evader() * ue;
    const Vec2 r0 = x.evader() - x.pursuer();
    const Vec2 w = ve - vp;
    const double closest = w.squaredNorm() > 0.0 ? std::max(0.0, -r0.dot(w) / w.squaredNorm()) : 0.0;
    const bool captured = (r0 + std::min(closest, h) * w).norm() <= config.capture_radius;
    const double horizon = captured ? closest : h;

    const std::optional<double> entry = first_entry(target, x.evader(), ve, horizon);
    if (entry || captured) {
      const double s = entry ? *entry : closest;
      const Point2 p = x.pursuer() + s * vp;
      const Point2 e = x.evader() + s * ve;
      rec.pursuer_controls.push_back(up);
      rec.evader_controls.push_back(ue);
      push_sample(rec, t + s, p, e);
      if (entry) {
        rec.outcome = Escaped{t + s, e, (e - p).norm()};
      } else {
        rec.outcome = Captured{t + s, e};
      }
      return rec;
    }

    x = step(x, up, ue, h, ratio);
    t += h;
    rec.pursuer_controls.push_back(up);
    rec.evader_controls.push_back(ue);
    push_sample(rec, t, x.pursuer(), x.evader());
  }
  rec.outcome = Timeout{};
  return rec;
}

}  // namespace tdg
