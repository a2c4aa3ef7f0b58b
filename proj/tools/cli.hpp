#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "scenario.hpp"

namespace tdg::cli {

enum ExitCode : int {
  kOk = 0,
  kSchema = 2,
  kDegenerate = 3,
  kTracing = 4,
  kSolver = 5,
  kVerification = 6,
};

/// Entry point of the `tdg` executable, with the streams injected for tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

nlohmann::json classify_report(const Scenario& s);
nlohmann::json solve_report(const Scenario& s, bool verify);

struct VerifyThresholds {
  double hji_capture = 1e-9;
  double hji_escape = 1e-6;
  double grad_capture = 1e-5;
  double grad_escape = 1e-4;
  double oracle_objective = 1e-6;
  double barrier_margin = 1e-4;
};

/// Randomized sweep over the scenario's sweep box. Pure function of
/// (scenario, samples, seed).
nlohmann::json verify_report(const Scenario& s, int samples, std::uint64_t seed, const VerifyThresholds& limits = {});

}  // namespace tdg::cli
