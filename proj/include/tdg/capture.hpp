#pragma once

#include <Eigen/Core>

#include "tdg/apollonius.hpp"
#include "tdg/geometry.hpp"

namespace tdg {

/// Saddle-point solution of the capture game.
struct CaptureSolution {
  Point2 capture_point;
  Vec2 u_pursuer;
  Vec2 u_evader;
  double value;
  /// Direction from the Apollonius center to the capture point.
  double theta;
  /// Direction from the pursuer to the evader.
  double phi;
};

/// Point of the Apollonius circle closest to the target. Throws WrongSubspace
/// unless the state is in the capture space (barrier value > 0).
Point2 capture_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

CaptureSolution capture_strategies(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

double value_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// Closed-form gradient ordered pursuer-x, pursuer-y, evader-x, evader-y.
Eigen::Vector4d grad_value_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// grad V_c . f(X, u_P*, u_E*).
double hji_residual_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// grad V_c . f(X, u_pursuer, u_evader) for arbitrary unit controls.
double hji_residual_capture(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                            const Vec2& u_pursuer, const Vec2& u_evader);

}  // namespace tdg
