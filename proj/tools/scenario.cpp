#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace tdg::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "must be an object");
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(join(path, key), "unknown field");
  }
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
  return v;
}

double required_number(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(join(path, key), "required field is missing");
  return number_at(obj.at(std::string(key)), join(path, key));
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw SchemaError(path, "must be positive");
  return v;
}

int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) throw SchemaError(path, "must be a positive integer");
  return static_cast<int>(j.get<long long>());
}

Point2 point_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path, "must be an array of two numbers");
  return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

Point2 required_point(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(join(path, key), "required field is missing");
  return point_at(obj.at(std::string(key)), join(path, key));
}

ConvexTarget parse_target(const json& j) {
  const std::string path = "target";
  require_object(j, path);
  if (!j.contains("type") || !j.at("type").is_string()) throw SchemaError("target.type", "must be a string");
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    reject_unknown(j, {"type", "center", "radius"}, path);
    const Point2 c = required_point(j, "center", path);
    return ConvexTarget::circle(c, positive(required_number(j, "radius", path), "target.radius"));
  }
  if (type == "ellipse") {
    reject_unknown(j, {"type", "center", "semi_axes", "rotation"}, path);
    const Point2 c = required_point(j, "center", path);
    const Vec2 axes = required_point(j, "semi_axes", path);
    if (!(axes.x() > 0.0 && axes.y() > 0.0)) throw SchemaError("target.semi_axes", "must be positive");
    const double rot = j.contains("rotation") ? number_at(j.at("rotation"), "target.rotation") : 0.0;
    return ConvexTarget::ellipse(c, axes, rot);
  }
  throw SchemaError("target.type", "must be \"circle\" or \"ellipse\"");
}

StrategyMode parse_strategy(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "optimal") return Optimal{};
  if (j.is_object()) {
    reject_unknown(j, {"fixed_heading"}, path);
    if (j.contains("fixed_heading")) return FixedHeading{number_at(j.at("fixed_heading"), join(path, "fixed_heading"))};
  }
  throw SchemaError(path, "must be \"optimal\" or {\"fixed_heading\": radians}");
}

SimConfig parse_sim(const json& j) {
  const std::string path = "sim";
  require_object(j, path);
  reject_unknown(j, {"dt", "capture_radius", "max_time", "pursuer_strategy", "evader_strategy"}, path);
  SimConfig c;
  if (j.contains("dt")) c.dt = positive(number_at(j.at("dt"), "sim.dt"), "sim.dt");
  if (j.contains("capture_radius")) {
    c.capture_radius = positive(number_at(j.at("capture_radius"), "sim.capture_radius"), "sim.capture_radius");
  }
  if (j.contains("max_time")) c.max_time = positive(number_at(j.at("max_time"), "sim.max_time"), "sim.max_time");
  if (j.contains("pursuer_strategy")) c.pursuer_strategy = parse_strategy(j.at("pursuer_strategy"), "sim.pursuer_strategy");
  if (j.contains("evader_strategy")) c.evader_strategy = parse_strategy(j.at("evader_strategy"), "sim.evader_strategy");
  return c;
}

DcSolverConfig parse_solver(const json& j) {
  const std::string path = "solver";
  require_object(j, path);
  reject_unknown(j, {"max_outer_iterations", "objective_tolerance", "subproblem_tolerance", "multi_start_count",
                     "max_inner_iterations"},
                 path);
  DcSolverConfig c;
  if (j.contains("max_outer_iterations")) {
    c.max_outer_iterations = positive_int(j.at("max_outer_iterations"), "solver.max_outer_iterations");
  }
  if (j.contains("max_inner_iterations")) {
    c.max_inner_iterations = positive_int(j.at("max_inner_iterations"), "solver.max_inner_iterations");
  }
  if (j.contains("objective_tolerance")) {
    c.objective_tolerance =
        positive(number_at(j.at("objective_tolerance"), "solver.objective_tolerance"), "solver.objective_tolerance");
  }
  if (j.contains("subproblem_tolerance")) {
    c.subproblem_tolerance = positive(number_at(j.at("subproblem_tolerance"), "solver.subproblem_tolerance"),
                                      "solver.subproblem_tolerance");
  }
  if (j.contains("multi_start_count")) {
    const json& m = j.at("multi_start_count");
    if (!m.is_number_integer() || m.get<long long>() < 0) {
      throw SchemaError("solver.multi_start_count", "must be a nonnegative integer");
    }
    c.multi_start_count = static_cast<int>(m.get<long long>());
  }
  return c;
}

SweepBox parse_sweep(const json& j) {
  const std::string path = "sweep";
  require_object(j, path);
  reject_unknown(j, {"box_min", "box_max", "vary_pursuer"}, path);
  SweepBox box{required_point(j, "box_min", path), required_point(j, "box_max", path), false};
  if (!(box.min.array() < box.max.array()).all()) throw SchemaError("sweep.box_max", "must exceed box_min");
  if (j.contains("vary_pursuer")) {
    if (!j.at("vary_pursuer").is_boolean()) throw SchemaError("sweep.vary_pursuer", "must be a boolean");
    box.vary_pursuer = j.at("vary_pursuer").get<bool>();
  }
  return box;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, {"target", "gamma", "v_pursuer", "pursuer", "evader", "sim", "solver", "seed", "sweep"}, "");
  if (!doc.contains("target")) throw SchemaError("target", "required field is missing");
  ConvexTarget target = parse_target(doc.at("target"));

  const double gamma = required_number(doc, "gamma", "");
  if (!(gamma > 0.0 && gamma < 1.0)) throw SchemaError("gamma", "must lie in the open interval (0, 1)");
  const double vp = positive(required_number(doc, "v_pursuer", ""), "v_pursuer");
  const Point2 pursuer = required_point(doc, "pursuer", "");
  const Point2 evader = required_point(doc, "evader", "");

  Scenario s{std::move(target), gamma, vp, pursuer, evader, {}, {}, std::nullopt, std::nullopt, doc.at("target")};
  if (doc.contains("sim")) s.sim = parse_sim(doc.at("sim"));
  if (doc.contains("solver")) s.solver = parse_solver(doc.at("solver"));
  s.sim.solver = s.solver;
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_unsigned()) throw SchemaError("seed", "must be a nonnegative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("sweep")) s.sweep = parse_sweep(doc.at("sweep"));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("<file>", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Point2& p) { return json::array({p.x(), p.y()}); }

}  // namespace tdg::cli
