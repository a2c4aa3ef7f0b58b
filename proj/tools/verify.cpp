#include <algorithm>
#include <cmath>
#include <random>

#include "cli.hpp"
#include "tdg/game.hpp"

namespace tdg::cli {

using nlohmann::json;

namespace {

constexpr double kFdStep = 1e-6;
constexpr int kOracleSamples = 100;
constexpr int kOracleGrid = 801;

struct Stats {
  int count = 0;
  double max = 0.0;
  double sum = 0.0;
  void add(double v) {
    ++count;
    max = std::max(max, v);
    sum += v;
  }
  json to_json() const { return {{"count", count}, {"max", max}, {"mean", count ? sum / count : 0.0}}; }
};

template <class F>
double fd_gradient_error(const GameState& x, const Eigen::Vector4d& grad, F value) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d plus = x.as_vector(), minus = x.as_vector();
    plus[i] += kFdStep;
    minus[i] -= kFdStep;
    const double fd = (value(GameState::from_vector(plus)) - value(GameState::from_vector(minus))) / (2.0 * kFdStep);
    worst = std::max(worst, std::abs(fd - grad[i]));
  }
  return worst;
}

SweepBox default_box(const Scenario& s) {
  const double half = 2.0 * (s.target.bounding_radius() + (s.pursuer - s.target.anchor()).norm());
  const Point2 c = s.target.anchor();
  return {Point2(c.array() - half), Point2(c.array() + half), false};
}

}  // namespace

json verify_report(const Scenario& s, int samples, std::uint64_t seed, const VerifyThresholds& limits) {
  if (samples <= 0) throw InvalidArgument("sample count must be positive");
  const SweepBox box = s.sweep.value_or(default_box(s));
  const SpeedRatio ratio = s.ratio();
  const double scale = (box.max - box.min).norm();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.min.x(), box.max.x());
  std::uniform_real_distribution<double> uy(box.min.y(), box.max.y());

  Stats hji_c, hji_e, grad_c, grad_e;
  int degenerate_escape = 0;
  int oracle_count = 0, oracle_position_failures = 0;
  double oracle_worst_gap = -INFINITY, oracle_max_abs_gap = 0.0, oracle_max_position_gap = 0.0;
  int sim_compared = 0, sim_agree = 0, sim_exempt = 0;
  std::vector<int> disagreements;

  for (int i = 0; i < samples; ++i) {
    Point2 p = s.pursuer, e;
    int attempts = 0;
    while (true) {
      if (++attempts > 10000) throw InvalidArgument("sweep box yields no admissible states");
      if (box.vary_pursuer) p = Point2(ux(rng), uy(rng));
      e = Point2(ux(rng), uy(rng));
      if (contains(s.target, e) || contains(s.target, p)) continue;
      if ((e - p).norm() < 1e-6 * scale) continue;
      break;
    }
    const GameState x(p, e);
    const Classification c = classify(x, s.target, ratio);
    const double b = c.barrier_value;

    if (c.space == Space::Capture) {
      hji_c.add(std::abs(hji_residual_capture(x, s.target, ratio)));
      if (b > limits.barrier_margin) {
        const Eigen::Vector4d g = grad_value_capture(x, s.target, ratio);
        grad_c.add(fd_gradient_error(x, g, [&](const GameState& y) { return value_capture(y, s.target, ratio); }));
      }
    } else {
      const EscapeSolution sol = solve_escape_point(x, s.target, ratio, s.solver);
      if (sol.degenerate) {
        ++degenerate_escape;
      } else {
        hji_e.add(std::abs(hji_residual_escape(sol, ratio, sol.u_pursuer, sol.u_evader)));
        if (b < -limits.barrier_margin) {
          const Eigen::Vector4d g = grad_value_escape(sol, ratio);
          grad_e.add(fd_gradient_error(
              x, g, [&](const GameState& y) { return value_escape(y, s.target, ratio, s.solver); }));
        }
      }
      if (oracle_count < kOracleSamples) {
        ++oracle_count;
        const Point2 z = brute_force_escape_point(x, s.target, ratio, kOracleGrid);
        const double gap = escape_objective(x, ratio, sol.escape_point) - escape_objective(x, ratio, z);
        oracle_worst_gap = std::max(oracle_worst_gap, gap);
        oracle_max_abs_gap = std::max(oracle_max_abs_gap, std::abs(gap));
        const ApolloniusDisk disk = c.disk;
        const Vec2 r = Vec2::Constant(disk.radius);
        const double diam = Eigen::AlignedBox2d(disk.center - r, disk.center + r)
                                .intersection(s.target.bounding_box())
                                .diagonal()
                                .norm();
        const double pos = (z - sol.escape_point).norm();
        oracle_max_position_gap = std::max(oracle_max_position_gap, pos);
        if (pos > 2.0 * diam / (kOracleGrid - 1)) ++oracle_position_failures;
      }
    }

    if (std::abs(b) < limits.barrier_margin) {
      ++sim_exempt;
      continue;
    }
    SimConfig cfg = s.sim;
    cfg.pursuer_strategy = Optimal{};
    cfg.evader_strategy = Optimal{};
    const TrajectoryRecord rec = run(x, s.target, ratio, cfg);
    ++sim_compared;
    const bool agree = (c.space == Space::Capture && std::holds_alternative<Captured>(rec.outcome)) ||
                       (c.space == Space::Escape && std::holds_alternative<Escaped>(rec.outcome));
    if (agree) {
      ++sim_agree;
    } else {
      disagreements.push_back(i);
    }
  }

  std::vector<std::string> violations;
  const double vp = ratio.v_pursuer();
  if (hji_c.max > limits.hji_capture * vp) violations.push_back("capture HJI residual above threshold");
  if (hji_e.max > limits.hji_escape * vp) violations.push_back("escape HJI residual above threshold");
  if (grad_c.max > limits.grad_capture) violations.push_back("capture gradient finite-difference error above threshold");
  if (grad_e.max > limits.grad_escape) violations.push_back("escape gradient finite-difference error above threshold");
  if (oracle_count > 0 && oracle_worst_gap > limits.oracle_objective) {
    violations.push_back("escape solver objective worse than the oracle");
  }
  if (oracle_position_failures > 0) violations.push_back("escape point differs from the oracle point");
  if (sim_agree != sim_compared) violations.push_back("simulation outcome disagrees with classification");

  json r;
  r["command"] = "verify";
  r["samples"] = samples;
  r["seed"] = seed;
  r["box"] = {{"min", to_json(box.min)}, {"max", to_json(box.max)}, {"vary_pursuer", box.vary_pursuer}};
  r["capture"] = {{"hji_residual", hji_c.to_json()}, {"gradient_fd_error", grad_c.to_json()}};
  r["escape"] = {{"hji_residual", hji_e.to_json()},
                 {"gradient_fd_error", grad_e.to_json()},
                 {"degenerate", degenerate_escape},
                 {"oracle",
                  {{"count", oracle_count},
                   {"worst_objective_gap", oracle_count ? oracle_worst_gap : 0.0},
                   {"max_abs_objective_gap", oracle_max_abs_gap},
                   {"max_position_gap", oracle_max_position_gap},
                   {"position_failures", oracle_position_failures}}}};
  r["simulation"] = {{"compared", sim_compared},
                     {"agree", sim_agree},
                     {"exempt_near_barrier", sim_exempt},
                     {"disagreeing_samples", disagreements}};
  r["thresholds"] = {{"hji_capture", limits.hji_capture * vp},  {"hji_escape", limits.hji_escape * vp},
                     {"grad_capture", limits.grad_capture},     {"grad_escape", limits.grad_escape},
                     {"oracle_objective", limits.oracle_objective}, {"barrier_margin", limits.barrier_margin}};
  r["violations"] = violations;
  r["passed"] = violations.empty();
  return r;
}

}  // namespace tdg::cli
