#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gatesim/envelope.hpp"

namespace gatesim {

struct GeometryParams {
  double straight_length = 0.05;
  double taper_angle = deg_to_rad(45.0);

  bool operator==(const GeometryParams&) const = default;
};

enum class Objective {
  EnvelopeArea,        // fraction of (speed, angle) cells with >= 95% success
  MaxToleratedAngle,   // at reference_speed, rad
  CenteringError,      // minus RMS tip offset at rail capture, m
  GeometricMargin,     // pi/2 - taper - max swept angle, floored at 0 (no simulation)
};

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

struct OptimizationProblem {
  GateSpec base;
  DroneSpec drone;
  double straight_min = 0.0;
  double straight_max = 0.3;
  double taper_min = deg_to_rad(20.0);
  double taper_max = deg_to_rad(60.0);
  Objective objective = Objective::EnvelopeArea;
  GateMode gate_mode = GateMode::Passive;
  SweepPlan plan = default_plan();
  double reference_speed = 1.0;
  int grid_straight = 5;
  int grid_taper = 5;
  int budget = 40;
  // Replaces the sweep-based objective (tests, synthetic landscapes).
  std::function<double(const GeometryParams&)> objective_override;

  static SweepPlan default_plan() {
    SweepPlan p;
    p.speed = {0.5, 1.9, 3};
    p.angle = {0.0, deg_to_rad(45.0), 10};
    p.trials_per_cell = 2;
    return p;
  }
};

void validate(const OptimizationProblem& problem);

GateSpec apply_params(const GateSpec& base, const GeometryParams& params);

// Throws InfeasibleGeometry if the gate cannot be built inside the rail.
double evaluate_geometry(const GeometryParams& params, const OptimizationProblem& problem);

struct TraceEntry {
  GeometryParams params;
  std::optional<double> objective;  // none: infeasible geometry
  std::string phase;                // "grid" or "golden"
};

struct OptimizationResult {
  GeometryParams best;
  double best_objective = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
};

// Grid over both parameters, then golden-section on straight_length around
// the best grid point at its taper. Stops early when the budget runs out.
OptimizationResult optimize(const OptimizationProblem& problem);

std::string trace_csv(const OptimizationResult& result, Objective objective);

}  // namespace gatesim
