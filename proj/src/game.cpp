#include "tdg/game.hpp"

namespace tdg {

GameOutcome solve_game(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                       const DcSolverConfig& config, const std::optional<Point2>& escape_hint) {
  const Classification c = classify(state, target, ratio);
  if (c.space == Space::Capture) {
    const CaptureSolution s = capture_strategies(state, target, ratio);
    return {c, s.value, s.u_pursuer, s.u_evader, s.capture_point, s, std::nullopt};
  }
  EscapeSolution s = solve_escape_point(state, target, ratio, config, escape_hint);
  const Vec2 up = s.u_pursuer;
  const Vec2 ue = s.u_evader;
  const Point2 x = s.escape_point;
  const double v = s.value;
  return {c, v, up, ue, x, std::nullopt, std::move(s)};
}

}  // namespace tdg
