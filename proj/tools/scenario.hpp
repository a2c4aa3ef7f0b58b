#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tdg/escape.hpp"
#include "tdg/geometry.hpp"
#include "tdg/sim.hpp"

namespace tdg::cli {

/// Scenario file violation; `field` is the dotted path of the offending key.
struct SchemaError : std::runtime_error {
  SchemaError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field(field) {}
  std::string field;
};

struct SweepBox {
  Point2 min;
  Point2 max;
  bool vary_pursuer = false;
};

struct Scenario {
  ConvexTarget target;
  double gamma;
  double v_pursuer;
  Point2 pursuer;
  Point2 evader;
  SimConfig sim;
  DcSolverConfig solver;
  std::optional<std::uint64_t> seed;
  std::optional<SweepBox> sweep;
  nlohmann::json target_json;

  SpeedRatio ratio() const { return SpeedRatio(gamma, v_pursuer); }
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

nlohmann::json to_json(const Point2& p);

}  // namespace tdg::cli
