#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gatesim/envelope.hpp"
#include "gatesim/optimizer.hpp"
#include "gatesim/throughput.hpp"

namespace gatesim {

// Scenario fields that are not gate or drone.
struct ScenarioSection {
  double approach_speed = 1.0;
  double approach_angle = 0.0;
  double lateral_offset = 0.0;
  GateMode gate_mode = GateMode::Passive;
  double time_step = 1e-4;
  double timeout = 5.0;
  int record_stride = 1;

  bool operator==(const ScenarioSection&) const = default;
};

struct OptimizeSection {
  Objective objective = Objective::EnvelopeArea;
  double straight_min = 0.0;
  double straight_max = 0.3;
  double taper_min = deg_to_rad(20.0);
  double taper_max = deg_to_rad(60.0);
  GateMode gate_mode = GateMode::Passive;
  SweepPlan plan = OptimizationProblem::default_plan();
  double reference_speed = 1.0;
  int grid_straight = 5;
  int grid_taper = 5;
  int budget = 40;

  bool operator==(const OptimizeSection&) const = default;
};

struct PortSection {
  PortConfig config;
  int drones = 100;

  bool operator==(const PortSection&) const = default;
};

struct RunConfig {
  GateSpec gate;
  DroneSpec drone;
  std::optional<ScenarioSection> scenario;
  std::optional<SweepPlan> sweep;
  std::optional<OptimizeSection> optimize;
  std::optional<PortSection> port;
  std::string output_dir = "out";
  bool svg = true;
  FormulaMode formula = FormulaMode::Consistent;

  bool operator==(const RunConfig&) const = default;
};

// INI text: [gate] [drone] [scenario] [sweep] [optimize] [port] [output].
// Angles are radians; a key ending in "_deg" gives the same angle in degrees.
// Throws Error{ConfigParse} naming the section and key at fault.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Overrides every seed in the config.
void apply_seed(RunConfig& config, std::uint64_t seed);
void apply_formula(RunConfig& config, FormulaMode mode);

// Effective configuration; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);
std::string emit_gate_config(const GateSpec& gate);

Scenario make_scenario(const RunConfig& config);
OptimizationProblem make_problem(const RunConfig& config);

}  // namespace gatesim
