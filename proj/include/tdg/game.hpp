#pragma once

#include <optional>

#include "tdg/capture.hpp"
#include "tdg/escape.hpp"
#include "tdg/kind.hpp"

namespace tdg {

/// Full solution at one state: who wins, the value, the saddle-point
/// headings, and where the game ends under optimal play.
struct GameOutcome {
  Classification classification;
  double value;
  Vec2 u_pursuer;
  Vec2 u_evader;
  Point2 terminal_point;
  std::optional<CaptureSolution> capture;
  std::optional<EscapeSolution> escape;
};

GameOutcome solve_game(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                       const DcSolverConfig& config = {}, const std::optional<Point2>& escape_hint = {});

}  // namespace tdg
