#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tdg/escape.hpp"
#include "tdg/kind.hpp"

namespace tdg {

/// Feedback saddle-point strategy, replanned from the current state every step.
struct Optimal {};
/// Constant heading angle in radians.
struct FixedHeading {
  double heading;
};
/// Arbitrary feedback rule; must return a unit vector.
struct Custom {
  std::function<Vec2(const GameState&)> rule;
};
using StrategyMode = std::variant<Optimal, FixedHeading, Custom>;

struct SimConfig {
  double dt = 1e-3;
  /// Numerical stand-in for point capture.
  double capture_radius = 1e-3;
  double max_time = 100.0;
  StrategyMode pursuer_strategy = Optimal{};
  StrategyMode evader_strategy = Optimal{};
  DcSolverConfig solver{};
};

void validate(const SimConfig& config);

struct Captured {
  double time;
  Point2 point;
};
struct Escaped {
  double time;
  Point2 point;
  double separation;
};
struct Timeout {};
using Outcome = std::variant<Captured, Escaped, Timeout>;

const char* outcome_name(const Outcome& outcome);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Point2> pursuer_path;
  std::vector<Point2> evader_path;
  /// Control k is held on [times[k], times[k + 1]].
  std::vector<Vec2> pursuer_controls;
  std::vector<Vec2> evader_controls;
  Outcome outcome = Timeout{};
  Classification initial{};
  double predicted_value = 0.0;
  std::vector<std::string> warnings;
};

/// A degree-module failure during a run, with the trajectory up to that point.
struct SolverFailure : Error {
  SolverFailure(const std::string& what, TrajectoryRecord partial)
      : Error(what), trajectory(std::make_shared<const TrajectoryRecord>(std::move(partial))) {}
  std::shared_ptr<const TrajectoryRecord> trajectory;
};

/// Euler update; exact for headings held over the step.
GameState step(const GameState& state, const Vec2& u_pursuer, const Vec2& u_evader, double dt,
               const SpeedRatio& ratio);

/// Closed-loop run until the evader enters the target, capture, or max_time.
/// Entry into the target is checked before capture within each step, and is
/// located by bisection. Capture is declared once the separation drops to the
/// capture radius, at the closest approach under the held headings.
TrajectoryRecord run(const GameState& initial, const ConvexTarget& target, const SpeedRatio& ratio,
                     const SimConfig& config);

}  // namespace tdg
