#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tdg/apollonius.hpp"
#include "tdg/geometry.hpp"

namespace tdg {

/// Convex-concave procedure settings for the escape-point program.
struct DcSolverConfig {
  int max_outer_iterations = 100;
  double objective_tolerance = 1e-10;
  double subproblem_tolerance = 1e-11;
  int multi_start_count = 8;
  int max_inner_iterations = 5000;
};

/// Throws InvalidArgument on non-positive tolerances or iteration counts.
void validate(const DcSolverConfig& config);

/// Intersection of the target with the evader's dominant disk.
class EscapeRegion {
 public:
  EscapeRegion(ConvexTarget target, const ApolloniusDisk& disk);

  const ConvexTarget& target() const { return target_; }
  const ApolloniusDisk& disk() const { return disk_; }

  /// Membership with a relative slack of 1e-12 on both constraints.
  bool contains(const Point2& z) const;
  bool in_disk(const Point2& z) const;
  bool in_target(const Point2& z) const;

  /// Exact Euclidean projection. When neither single-set projection is
  /// feasible, the projection is the nearest boundary intersection point.
  Point2 project(const Point2& z) const;

  /// Points where the target boundary meets the Apollonius circle.
  const std::vector<Point2>& corners() const { return corners_; }

  Eigen::AlignedBox2d bounding_box() const;

 private:
  ConvexTarget target_;
  ApolloniusDisk disk_;
  std::vector<Point2> corners_;
};

/// Dykstra's alternating projections onto target and disk.
Point2 dykstra_project(const ConvexTarget& target, const ApolloniusDisk& disk, const Point2& z,
                       int max_iterations = 20000, double tolerance = 1e-15);

/// Objective of the escape program: -|z - pursuer| + |z - evader| / gamma.
double escape_objective(const GameState& state, const SpeedRatio& ratio, const Point2& z);

struct EscapeCandidate {
  Point2 start;
  Point2 point;
  double objective;
  int iterations;
  bool converged;
  std::vector<double> objective_history;
};

struct EscapeSolution {
  Point2 escape_point;
  Vec2 u_pursuer;
  Vec2 u_evader;
  double value;
  /// Direction from the pursuer to the escape point.
  double psi;
  /// Direction from the evader to the escape point.
  double varphi;
  int solver_iterations;
  bool converged;
  /// Escape point coincides with the evader (evader already in the target);
  /// u_evader then copies u_pursuer.
  bool degenerate;
  bool certified_by_oracle;
  std::vector<EscapeCandidate> candidates;
};

/// True iff the barrier value is <= 0.
bool escape_feasible(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio);

/// Solves the escape-point program by the convex-concave procedure from
/// multiple starts. `hint` adds one more start. Throws Infeasible outside the
/// escape space; a run that exhausts its outer budget returns its best
/// feasible iterate with converged = false.
EscapeSolution solve_escape_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                  const DcSolverConfig& config = {}, const std::optional<Point2>& hint = {});

/// Grid search over the bounding box of the feasible region, then a
/// projected pattern search polish.
Point2 brute_force_escape_point(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                int grid_resolution);

double value_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                    const DcSolverConfig& config = {});

/// Closed-form gradient ordered pursuer-x, pursuer-y, evader-x, evader-y.
/// Requires a strict escape state with a nondegenerate escape point.
Eigen::Vector4d grad_value_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                                  const DcSolverConfig& config = {});
Eigen::Vector4d grad_value_escape(const EscapeSolution& solution, const SpeedRatio& ratio);

double hji_residual_escape(const GameState& state, const ConvexTarget& target, const SpeedRatio& ratio,
                           const DcSolverConfig& config = {});
double hji_residual_escape(const EscapeSolution& solution, const SpeedRatio& ratio, const Vec2& u_pursuer,
                           const Vec2& u_evader);

}  // namespace tdg
