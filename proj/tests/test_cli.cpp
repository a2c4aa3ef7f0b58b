#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result tdg_run(std::vector<std::string> args) {
  args.insert(args.begin(), "tdg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tdg::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "tdg_cli_test";
  fs::create_directories(d);
  return d;
}

std::string write_scenario(const std::string& name, const json& doc) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << doc.dump();
  return p.string();
}

json base_scenario(double ex, double ey) {
  return {{"target", {{"type", "circle"}, {"center", {0.0, 0.0}}, {"radius", 0.2}}},
          {"gamma", 0.4},
          {"v_pursuer", 1.0},
          {"pursuer", {0.5, 0.4}},
          {"evader", {ex, ey}}};
}

std::string read(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header) {
  std::ifstream f(p);
  std::getline(f, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

json schema_at(const json& root, const json& node) {
  if (!node.contains("$ref")) return node;
  const std::string ref = node["$ref"];
  return root.at(json::json_pointer(ref.substr(1)));
}

// Structural subset of JSON Schema: type, const, enum, required, properties,
// items, oneOf and local $ref.
bool conforms(const json& root, const json& node, const json& v) {
  const json sch = schema_at(root, node);
  if (sch.contains("const") && v != sch["const"]) return false;
  if (sch.contains("enum") && std::find(sch["enum"].begin(), sch["enum"].end(), v) == sch["enum"].end()) return false;
  if (sch.contains("type")) {
    const std::string t = sch["type"];
    const bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
                    (t == "number" && v.is_number()) || (t == "integer" && v.is_number_integer()) ||
                    (t == "boolean" && v.is_boolean()) || (t == "string" && v.is_string());
    if (!ok) return false;
  }
  if (sch.contains("oneOf")) {
    int hits = 0;
    for (const json& alt : sch["oneOf"]) hits += conforms(root, alt, v);
    if (hits != 1) return false;
  }
  if (v.is_object()) {
    for (const auto& key : sch.value("required", json::array())) {
      if (!v.contains(key.get<std::string>())) return false;
    }
    const json props = sch.value("properties", json::object());
    for (const auto& [key, sub] : props.items()) {
      if (v.contains(key) && !conforms(root, sub, v[key])) return false;
    }
  }
  if (v.is_array() && sch.contains("items")) {
    for (const json& item : v) {
      if (!conforms(root, sch["items"], item)) return false;
    }
  }
  return true;
}

json load_json(const fs::path& p) { return json::parse(read(p)); }

const std::string kCapture = write_scenario("capture.json", base_scenario(1.2, 1.0));
const std::string kEscape = write_scenario("escape.json", base_scenario(-0.1, -0.3));

}  // namespace

TEST_CASE("classify") {
  Result r = tdg_run({"classify", "--scenario", kCapture});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["space"] == "capture");
  CHECK(j["barrier_value"].get<double>() == doctest::Approx(1.0986191554162663));
  CHECK(j["apollonius"]["radius"].get<double>() == doctest::Approx(0.4390259265377565));

  r = tdg_run({"classify", "--scenario", kEscape});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["space"] == "escape");
}

TEST_CASE("schema violations exit 2 naming the field") {
  json doc = base_scenario(1.2, 1.0);
  doc["gamma"] = 1.2;
  Result r = tdg_run({"classify", "--scenario", write_scenario("gamma.json", doc)});
  CHECK(r.code == 2);
  CHECK(r.err.find("gamma") != std::string::npos);

  doc = base_scenario(1.2, 1.0);
  doc["target"]["colour"] = "red";
  r = tdg_run({"classify", "--scenario", write_scenario("unknown.json", doc)});
  CHECK(r.code == 2);
  CHECK(r.err.find("target.colour") != std::string::npos);

  doc = base_scenario(1.2, 1.0);
  doc.erase("v_pursuer");
  r = tdg_run({"classify", "--scenario", write_scenario("missing.json", doc)});
  CHECK(r.code == 2);
  CHECK(r.err.find("v_pursuer") != std::string::npos);

  doc = base_scenario(1.2, 1.0);
  doc["sim"] = {{"dt", -1.0}};
  r = tdg_run({"classify", "--scenario", write_scenario("dt.json", doc)});
  CHECK(r.code == 2);
  CHECK(r.err.find("sim.dt") != std::string::npos);

  CHECK(tdg_run({"classify", "--scenario", "/nonexistent/file.json"}).code == 2);
  CHECK(tdg_run({"frobnicate"}).code == 2);
}

TEST_CASE("degenerate state exits 3") {
  const Result r = tdg_run({"classify", "--scenario", write_scenario("same.json", base_scenario(0.5, 0.4))});
  CHECK(r.code == 3);
}

TEST_CASE("barrier csv and svg") {
  const fs::path csv = scratch_dir() / "barrier.csv";
  const fs::path svg = scratch_dir() / "barrier.svg";
  const Result r = tdg_run({"barrier", "--scenario", kCapture, "--rays", "256", "--out", csv.string(), "--svg",
                            svg.string()});
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = read_csv(csv, header);
  CHECK(header == "theta_rad,x,y,barrier_residual");
  REQUIRE(rows.size() == 256);
  for (const auto& row : rows) CHECK(std::abs(row[3]) <= 1e-8);
  const std::string text = read(svg);
  CHECK(count(text, "<path") == 2);
  CHECK(count(text, " Z\"") == 2);

  CHECK(tdg_run({"barrier", "--scenario", kCapture, "--rays", "8"}).code == 2);
}

TEST_CASE("solve") {
  Result r = tdg_run({"solve", "--scenario", kCapture});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["space"] == "capture");
  CHECK(j["value"].get<double>() == doctest::Approx(1.0986191554162663));
  CHECK(j["capture_point"][0].get<double>() == doctest::Approx(0.99645907));

  r = tdg_run({"solve", "--scenario", kEscape, "--verify"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["space"] == "escape");
  CHECK(j["value"].get<double>() == doctest::Approx(0.527359085544));
  CHECK(j["oracle"]["passed"].get<bool>());
  CHECK(j["solver"]["converged"].get<bool>());
}

TEST_CASE("unconverged solve exits 5 unless best effort is allowed") {
  json doc = {{"target", {{"type", "ellipse"}, {"center", {0.1, -0.2}}, {"semi_axes", {0.5, 0.25}}, {"rotation", 0.6}}},
              {"gamma", 0.6},
              {"v_pursuer", 1.0},
              {"pursuer", {1.0, 0.8}},
              {"evader", {-0.6, -0.9}},
              {"solver", {{"max_outer_iterations", 1}, {"objective_tolerance", 1e-300}, {"multi_start_count", 0}}}};
  const std::string path = write_scenario("budget.json", doc);
  CHECK(tdg_run({"solve", "--scenario", path}).code == 5);
  CHECK(tdg_run({"solve", "--scenario", path, "--allow-best-effort"}).code == 0);
}

TEST_CASE("simulate") {
  const fs::path csv = scratch_dir() / "traj.csv";
  const fs::path svg = scratch_dir() / "traj.svg";
  Result r = tdg_run({"simulate", "--scenario", kCapture, "--out", csv.string(), "--svg", svg.string()});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["outcome"] == "captured");
  CHECK(j["value"].get<double>() == doctest::Approx(1.0986191554162663).epsilon(1e-4));
  std::string header;
  const auto rows = read_csv(csv, header);
  CHECK(header == "t,xP,yP,xE,yE,uPx,uPy,uEx,uEy");
  CHECK(rows.size() > 100);
  CHECK(rows.front().size() == 9);
  CHECK(read(svg).find("<circle") != std::string::npos);

  r = tdg_run({"simulate", "--scenario", kEscape});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["outcome"] == "escaped");
  CHECK(j["separation"].get<double>() == doctest::Approx(0.527359085544).epsilon(1e-3));

  json doc = base_scenario(1.2, 1.0);
  doc["sim"] = {{"max_time", 0.001}};
  r = tdg_run({"simulate", "--scenario", write_scenario("short.json", doc)});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["outcome"] == "timeout");
}

TEST_CASE("verify") {
  CHECK(tdg_run({"verify", "--scenario", kCapture, "--samples", "0"}).code == 2);

  const Result a = tdg_run({"verify", "--scenario", kCapture, "--samples", "1000", "--seed", "42"});
  CHECK(a.code == 0);
  const json j = json::parse(a.out);
  CHECK(j["passed"].get<bool>());
  CHECK(j["simulation"]["agree"] == j["simulation"]["compared"]);

  const fs::path out = scratch_dir() / "report.json";
  const Result b = tdg_run({"verify", "--scenario", kCapture, "--samples", "1000", "--seed", "42", "--out", out.string()});
  CHECK(a.out == b.out);
  CHECK(read(out) == a.out);

  const Result c = tdg_run({"verify", "--scenario", kCapture, "--samples", "50", "--seed", "7"});
  CHECK(c.out != a.out);
}

TEST_CASE("threshold violations exit 6 with the report written") {
  tdg::cli::VerifyThresholds strict;
  strict.hji_capture = 0.0;
  strict.grad_capture = 0.0;
  const tdg::cli::Scenario s = tdg::cli::load_scenario(kCapture);
  const json j = tdg::cli::verify_report(s, 20, 1, strict);
  CHECK_FALSE(j["passed"].get<bool>());
  CHECK(!j["violations"].empty());
}

TEST_CASE("reports and scenarios conform to the shipped schemas") {
  const json report = load_json(fs::path(TDG_SOURCE_DIR) / "docs/report.schema.json");
  const json scenario = load_json(fs::path(TDG_SOURCE_DIR) / "docs/scenario.schema.json");
  const fs::path dir = fs::path(TDG_SOURCE_DIR) / "scenarios";
  for (const auto& entry : fs::directory_iterator(dir)) {
    CAPTURE(entry.path().string());
    CHECK(conforms(scenario, scenario, load_json(entry.path())));
  }
  json bad = base_scenario(1.2, 1.0);
  bad["gamma"] = "fast";
  CHECK_FALSE(conforms(scenario, scenario, bad));

  const std::string ellipse = (dir / "ellipse.json").string();
  const std::vector<std::vector<std::string>> runs = {
      {"classify", "--scenario", kCapture},
      {"solve", "--scenario", kCapture, "--verify"},
      {"solve", "--scenario", ellipse, "--verify"},
      {"simulate", "--scenario", kEscape},
      {"verify", "--scenario", kEscape, "--samples", "30"},
  };
  for (const auto& args : runs) {
    const Result r = tdg_run(args);
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CAPTURE(r.out);
    CHECK(conforms(report, report, j));
    json broken = j;
    broken.erase("command");
    CHECK_FALSE(conforms(report, report, broken));
  }
}
