#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "svg.hpp"
#include "tdg/game.hpp"

namespace tdg::cli {

using nlohmann::json;

namespace {

json vec_json(const Vec2& v) { return to_json(Point2(v)); }

GameState initial_state(const Scenario& s) { return GameState(s.pursuer, s.evader); }

// Closest point of the Apollonius circle to the target by dense sampling.
std::pair<Point2, double> sampled_capture_point(const ApolloniusDisk& disk, const ConvexTarget& target) {
  constexpr int kSamples = 7200;
  Point2 best = disk.center;
  double best_d = INFINITY;
  for (int k = 0; k < kSamples; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kSamples;
    const Point2 z = disk.center + disk.radius * Vec2(std::cos(a), std::sin(a));
    const double d = distance(target, z);
    if (d < best_d) {
      best_d = d;
      best = z;
    }
  }
  return {best, best_d};
}

void emit(const json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (!out_path.empty()) write_file(out_path, text);
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_barrier(const Scenario& s, int rays, const std::string& out_path, const std::string& svg_path,
                std::ostream& out, std::ostream& err) {
  if (rays < kMinRayCount) {
    err << "error: --rays must be at least " << kMinRayCount << '\n';
    return kSchema;
  }
  const SpeedRatio ratio = s.ratio();
  BarrierCurve curve;
  try {
    curve = trace_barrier_curve(s.pursuer, s.target, ratio, rays);
  } catch (const BracketingFailure& e) {
    err << "error: " << e.what() << '\n';
    err << "rays 0.." << e.ray_index - 1 << " of " << rays << " were bracketed; ray " << e.ray_index
        << " (theta_rad = " << csv_number(2.0 * std::numbers::pi * e.ray_index / rays) << ") failed\n";
    return kTracing;
  }

  std::ostringstream csv;
  csv << "theta_rad,x,y,barrier_residual\n";
  for (int i = 0; i < curve.ray_count; ++i) {
    const Point2& z = curve.points[i];
    const double b = barrier_value(GameState(s.pursuer, z), s.target, ratio);
    csv << csv_number(curve.angles[i]) << ',' << csv_number(z.x()) << ',' << csv_number(z.y()) << ','
        << csv_number(b) << '\n';
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file(out_path, csv.str());
  }

  if (!svg_path.empty()) {
    SvgCanvas svg;
    svg.path(boundary_polyline(s.target), true, "black", "target");
    svg.path(curve.points, true, "red", "barrier");
    svg.marker(s.pursuer, "blue");
    write_file(svg_path, svg.str());
  }
  return kOk;
}

int cmd_simulate(const Scenario& s, const std::string& out_path, const std::string& svg_path, std::ostream& out) {
  const SpeedRatio ratio = s.ratio();
  const GameState x0 = initial_state(s);
  const TrajectoryRecord rec = run(x0, s.target, ratio, s.sim);

  if (!out_path.empty()) {
    std::ostringstream csv;
    csv << "t,xP,yP,xE,yE,uPx,uPy,uEx,uEy\n";
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      // The last sample has no control of its own; repeat the previous one.
      const std::size_t c = std::min(k, rec.pursuer_controls.empty() ? 0 : rec.pursuer_controls.size() - 1);
      const Vec2 up = rec.pursuer_controls.empty() ? Vec2::Zero() : rec.pursuer_controls[c];
      const Vec2 ue = rec.evader_controls.empty() ? Vec2::Zero() : rec.evader_controls[c];
      csv << csv_number(rec.times[k]) << ',' << csv_number(rec.pursuer_path[k].x()) << ','
          << csv_number(rec.pursuer_path[k].y()) << ',' << csv_number(rec.evader_path[k].x()) << ','
          << csv_number(rec.evader_path[k].y()) << ',' << csv_number(up.x()) << ',' << csv_number(up.y()) << ','
          << csv_number(ue.x()) << ',' << csv_number(ue.y()) << '\n';
    }
    write_file(out_path, csv.str());
  }

  json report;
  report["command"] = "simulate";
  report["outcome"] = outcome_name(rec.outcome);
  report["initial_space"] = to_string(rec.initial.space);
  report["barrier_value"] = rec.initial.barrier_value;
  report["predicted_value"] = rec.predicted_value;
  report["steps"] = rec.times.size() - 1;
  if (const auto* c = std::get_if<Captured>(&rec.outcome)) {
    report["time"] = c->time;
    report["point"] = to_json(c->point);
    report["value"] = distance(s.target, c->point);
  } else if (const auto* e = std::get_if<Escaped>(&rec.outcome)) {
    report["time"] = e->time;
    report["point"] = to_json(e->point);
    report["separation"] = e->separation;
    report["value"] = e->separation;
  } else {
    report["time"] = rec.times.back();
    report["separation"] = (rec.evader_path.back() - rec.pursuer_path.back()).norm();
    report["distance"] = distance(s.target, rec.evader_path.back());
  }
  report["warnings"] = rec.warnings;
  out << report.dump(2) << '\n';

  if (!svg_path.empty()) {
    SvgCanvas svg;
    svg.path(boundary_polyline(s.target), true, "black", "target");
    try {
      svg.path(trace_barrier_curve(s.pursuer, s.target, ratio, 256).points, true, "red", "barrier");
    } catch (const BracketingFailure&) {
      // The overlay is optional; the trajectory is still drawn.
    }
    const ApolloniusDisk disk = rec.initial.disk;
    svg.circle(disk.center, disk.radius, "green");
    svg.path(rec.pursuer_path, false, "blue", "pursuer");
    svg.path(rec.evader_path, false, "magenta", "evader");
    svg.marker(s.pursuer, "blue");
    svg.marker(s.evader, "magenta");
    svg.cross(rec.pursuer_path.back(), "blue");
    write_file(svg_path, svg.str());
  }
  return kOk;
}

}  // namespace

json classify_report(const Scenario& s) {
  const Classification c = classify(initial_state(s), s.target, s.ratio());
  json r;
  r["command"] = "classify";
  r["space"] = to_string(c.space);
  r["barrier_value"] = c.barrier_value;
  r["apollonius"] = {{"center", to_json(c.disk.center)}, {"radius", c.disk.radius}};
  r["projection"] = to_json(c.projection);
  r["pursuer_in_target"] = c.pursuer_in_target;
  r["evader_in_target"] = contains(s.target, s.evader);
  return r;
}

json solve_report(const Scenario& s, bool verify) {
  const GameState x0 = initial_state(s);
  const SpeedRatio ratio = s.ratio();
  const GameOutcome g = solve_game(x0, s.target, ratio, s.solver);
  json r;
  r["command"] = "solve";
  r["space"] = to_string(g.classification.space);
  r["barrier_value"] = g.classification.barrier_value;
  r["value"] = g.value;
  r["u_pursuer"] = vec_json(g.u_pursuer);
  r["u_evader"] = vec_json(g.u_evader);
  if (g.capture) {
    const CaptureSolution& c = *g.capture;
    r["capture_point"] = to_json(c.capture_point);
    r["theta"] = c.theta;
    r["phi"] = c.phi;
    r["hji_residual"] = hji_residual_capture(x0, s.target, ratio);
    if (verify) {
      const auto [z, d] = sampled_capture_point(g.classification.disk, s.target);
      r["oracle"] = {{"method", "apollonius_circle_sampling"},
                     {"point", to_json(z)},
                     {"value", d},
                     {"value_gap", c.value - d},
                     {"passed", c.value <= d + 1e-9}};
    }
    return r;
  }
  const EscapeSolution& e = *g.escape;
  r["escape_point"] = to_json(e.escape_point);
  r["psi"] = e.psi;
  r["varphi"] = e.varphi;
  r["degenerate"] = e.degenerate;
  r["solver"] = {{"iterations", e.solver_iterations},
                 {"converged", e.converged},
                 {"starts", e.candidates.size()},
                 {"objective", escape_objective(x0, ratio, e.escape_point)}};
  if (!e.degenerate) r["hji_residual"] = hji_residual_escape(e, ratio, e.u_pursuer, e.u_evader);
  if (verify) {
    const Point2 z = brute_force_escape_point(x0, s.target, ratio, 801);
    const double obj_ccp = escape_objective(x0, ratio, e.escape_point);
    const double obj_oracle = escape_objective(x0, ratio, z);
    r["oracle"] = {{"method", "grid_801_pattern_search"},
                   {"point", to_json(z)},
                   {"objective", obj_oracle},
                   {"objective_gap", obj_ccp - obj_oracle},
                   {"position_gap", (z - e.escape_point).norm()},
                   {"passed", obj_ccp <= obj_oracle + 1e-6}};
  }
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar target-defense differential game", "tdg"};
  app.require_subcommand(1, 1);

  std::string scenario_path, out_path, svg_path;
  int rays = 256;
  int samples = 1000;
  std::uint64_t seed = 0;
  bool verify = false;
  bool best_effort = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", out_path, "Output file");
  };
  CLI::App* classify_cmd = app.add_subcommand("classify", "Barrier value and winning side");
  add_common(classify_cmd);
  CLI::App* barrier_cmd = app.add_subcommand("barrier", "Trace the barrier curve for the scenario's pursuer");
  add_common(barrier_cmd);
  barrier_cmd->add_option("--rays", rays, "Number of rays (>= 16)");
  barrier_cmd->add_option("--svg", svg_path, "SVG overlay");
  CLI::App* solve_cmd = app.add_subcommand("solve", "Saddle-point strategies and value");
  add_common(solve_cmd);
  solve_cmd->add_flag("--verify", verify, "Check against a brute-force oracle");
  solve_cmd->add_flag("--allow-best-effort", best_effort, "Accept an unconverged escape solve");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Closed-loop simulation");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--svg", svg_path, "SVG of paths, barrier and initial Apollonius disk");
  CLI::App* verify_cmd = app.add_subcommand("verify", "Randomized verification sweep");
  add_common(verify_cmd);
  verify_cmd->add_option("--samples", samples, "Number of random states");
  CLI::Option* seed_opt = verify_cmd->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kSchema;
  }

  try {
    const Scenario s = load_scenario(scenario_path);
    validate(s.sim);

    if (*classify_cmd) {
      emit(classify_report(s), out_path, out);
      return kOk;
    }
    if (*barrier_cmd) return cmd_barrier(s, rays, out_path, svg_path, out, err);
    if (*solve_cmd) {
      const json r = solve_report(s, verify);
      emit(r, out_path, out);
      if (r.contains("solver") && !r["solver"]["converged"].get<bool>() && !best_effort) {
        err << "error: escape solver did not converge (use --allow-best-effort to accept)\n";
        return kSolver;
      }
      return kOk;
    }
    if (*simulate_cmd) return cmd_simulate(s, out_path, svg_path, out);
    if (*verify_cmd) {
      if (samples <= 0) {
        err << "error: --samples must be positive\n";
        return kSchema;
      }
      const std::uint64_t used_seed = seed_opt->count() > 0 ? seed : s.seed.value_or(0);
      const json r = verify_report(s, samples, used_seed);
      emit(r, out_path, out);
      if (!r["passed"].get<bool>()) {
        for (const auto& v : r["violations"]) err << "violation: " << v.get<std::string>() << '\n';
        return kVerification;
      }
      return kOk;
    }
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kSchema;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kSchema;
  } catch (const DegenerateState& e) {
    err << "degenerate state: " << e.what() << '\n';
    return kDegenerate;
  } catch (const BracketingFailure& e) {
    err << "tracing failure: " << e.what() << '\n';
    return kTracing;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << " (" << e.trajectory->times.size() << " samples recorded)\n";
    return kSolver;
  } catch (const NonConvergence& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}

}  // namespace tdg::cli
