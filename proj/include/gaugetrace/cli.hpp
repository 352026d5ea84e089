#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugetrace/grid.hpp"
#include "gaugetrace/report.hpp"

namespace gaugetrace::cli {

/// Random-draw counts per check family.
struct Draws {
  int transport = 20;
  int triangles = 100;
  int homotopies = 20;
  int diamagnetic = 2000;
  int pullback = 50;
  int commutator = 50;
};

/// A validated scenario. Unknown families and malformed values raise
/// ConfigError naming the offending field.
struct Scenario {
  nlohmann::json raw;
  int n = 1;
  int m = 2;
  nlohmann::json connection;
  nlohmann::json field;
  nlohmann::json gauge;  // null when absent
  std::vector<double> p_values{2.0};
  std::optional<double> s;     // default: 1 - 1/p
  std::optional<double> beta;  // default: measured curvature sup x 1.05
  QuadratureSpec quadrature;
  int steps = 128;
  std::optional<std::uint64_t> seed;
  int refine = 1;
  double region_half_width = 1.0;
  double region_height = 1.0;
  Draws draws;

  double s_for(double p) const { return s ? *s : 1.0 - 1.0 / p; }
  /// Lateral cell counts N0, 1.5 N0, 2 N0, ... for `refine` levels.
  std::vector<int> lateral_levels() const;
};

/// Built-in scenario defaults selected by a "preset" key.
nlohmann::json preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses JSON text; syntax errors report the line number.
Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

/// Subcommands append rows to `report`.
void run_transport(const Scenario& sc, VerificationReport& report);
void run_curvature(const Scenario& sc, VerificationReport& report);
void run_holonomy(const Scenario& sc, VerificationReport& report);
void run_seminorm(const Scenario& sc, VerificationReport& report);
void run_trace_check(const Scenario& sc, VerificationReport& report);
void run_extend_check(const Scenario& sc, VerificationReport& report);
void run_pullback_check(const Scenario& sc, VerificationReport& report);
void run_suite(const Scenario& sc, VerificationReport& report);

/// Entry point: returns 0 when every check passes, 1 on a property
/// violation or module error, 2 on usage or configuration errors.
int run(int argc, char** argv);

}  // namespace gaugetrace::cli
