#include "tdg/capture.hpp"

#include <cmath>

#include "tdg/kind.hpp"

namespace tdg {

namespace {

Classification require_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  Classification c = classify(state, target, ratio);
  if (c.space != Space::Capture) {
    throw WrongSubspace("capture game requested for a state in the escape space");
  }
  return c;
}

}  // namespace

Point2 capture_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const Classification c = require_capture(state, target, ratio);
  const Vec2 toward = (c.projection - c.disk.center).normalized();
  return c.disk.center + c.disk.radius * toward;
}

CaptureSolution capture_strategies(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const Classification c = require_capture(state, target, ratio);
  const Vec2 toward = (c.projection - c.disk.center).normalized();
  const Point2 x = c.disk.center + c.disk.radius * toward;
  const Vec2 pe = state.evader() - state.pursuer();
  return {x,
          (x - state.pursuer()).normalized(),
          (x - state.evader()).normalized(),
          c.barrier_value,
          std::atan2(toward.y(), toward.x()),
          std::atan2(pe.y(), pe.x())};
}

double value_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  return require_capture(state, target, ratio).barrier_value;
}

Eigen::Vector4d grad_value_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const CaptureSolution s = capture_strategies(state, target, ratio);
  const double g = ratio.gamma();
  const double k = 1.0 / (1.0 - g * g);
  const double ct = std::cos(s.theta), st = std::sin(s.theta);
  const double cp = std::cos(s.phi), sp = std::sin(s.phi);
  return {k * (g * g * ct + g * cp), k * (g * g * st + g * sp), -k * (ct + g * cp), -k * (st + g * sp)};
}

double hji_residual_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio) {
  const CaptureSolution s = capture_strategies(state, target, ratio);
  return hji_residual_capture(state, target, ratio, s.u_pursuer, s.u_evader);
}

double hji_residual_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                            const Vec2& u_pursuer, const Vec2& u_evader) {
  return grad_value_capture(state, target, ratio).dot(velocity_field(ratio, u_pursuer, u_evader));
}

}  // namespace tdg
