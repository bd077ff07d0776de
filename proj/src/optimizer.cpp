#include "gatesim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "gatesim/collision.hpp"
#include "gatesim/error.hpp"

namespace gatesim {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio

double envelope_area(const EnvelopeMap& map) {
  const int n_speed = map.plan.speed.steps;
  const int n_angle = map.plan.angle.steps;
  std::vector<int> success(static_cast<std::size_t>(n_speed) * n_angle, 0);
  std::vector<int> total(success.size(), 0);
  const std::size_t n_off = static_cast<std::size_t>(map.plan.offset.steps);
  for (const auto& c : map.cells) {
    const std::size_t key = c.index / n_off;  // speed * n_angle + angle
    success[key] += c.counts[0];
    total[key] += c.trials;
  }
  int good = 0;
  for (std::size_t i = 0; i < success.size(); ++i)
    if (total[i] > 0 && double(success[i]) >= kToleranceThreshold * total[i]) ++good;
  return double(good) / static_cast<double>(success.size());
}

}  // namespace

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::EnvelopeArea: return "envelope-area";
    case Objective::MaxToleratedAngle: return "max-tolerated-angle";
    case Objective::CenteringError: return "centering-error";
    case Objective::GeometricMargin: return "geometric-margin";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  for (Objective o : {Objective::EnvelopeArea, Objective::MaxToleratedAngle,
                      Objective::CenteringError, Objective::GeometricMargin})
    if (name == to_string(o)) return o;
  throw Error(ErrorKind::InvalidInput, "unknown objective '" + std::string(name) + "'");
}

void validate(const OptimizationProblem& p) {
  const auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSpec, what); };
  if (!(p.straight_min >= 0.0) || !(p.straight_max >= p.straight_min))
    fail("straight_length bounds must satisfy 0 <= min <= max");
  if (!(p.taper_min > 0.0) || !(p.taper_max >= p.taper_min) ||
      !(p.taper_max < 0.5 * std::numbers::pi))
    fail("taper_angle bounds must lie in (0, pi/2) with min <= max");
  if (p.budget < 3) fail("budget must be >= 3");
  if (p.grid_straight < 1 || p.grid_taper < 1) fail("grid sizes must be >= 1");
  if (!(p.reference_speed > 0.0)) fail("reference_speed must be > 0");
  validate(p.plan);
}

GateSpec apply_params(const GateSpec& base, const GeometryParams& params) {
  GateSpec g = base;
  g.straight_length = params.straight_length;
  g.taper_angle = params.taper_angle;
  return g;
}

double evaluate_geometry(const GeometryParams& params, const OptimizationProblem& problem) {
  const double eps = 1e-12;
  if (params.straight_length < problem.straight_min - eps ||
      params.straight_length > problem.straight_max + eps ||
      params.taper_angle < problem.taper_min - eps || params.taper_angle > problem.taper_max + eps)
    throw Error(ErrorKind::InvalidInput, "parameters outside the problem bounds");

  const GateSpec gate = apply_params(problem.base, params);
  try {
    validate(gate);
  } catch (const Error& e) {
    throw Error(ErrorKind::InfeasibleGeometry, e.what());
  }
  if (link_end_x(gate) >= kRailCaptureX)
    throw Error(ErrorKind::InfeasibleGeometry, "link extends past the rail start");

  if (problem.objective_override) return problem.objective_override(params);

  const SweepPlan& plan = problem.plan;
  switch (problem.objective) {
    case Objective::GeometricMargin: {
      const double max_angle = std::max(std::abs(plan.angle.min), std::abs(plan.angle.max));
      return std::max(0.0, 0.5 * std::numbers::pi - params.taper_angle - max_angle);
    }
    case Objective::EnvelopeArea:
      return envelope_area(run_sweep(plan, gate, problem.drone, problem.gate_mode));
    case Objective::MaxToleratedAngle: {
      SweepPlan at_ref = plan;
      at_ref.speed = {problem.reference_speed, problem.reference_speed, 1};
      const EnvelopeMap map = run_sweep(at_ref, gate, problem.drone, problem.gate_mode);
      return max_tolerated_angle(map).value_or(plan.angle.min - plan.angle.spacing());
    }
    case Objective::CenteringError: {
      const EnvelopeMap map = run_sweep(plan, gate, problem.drone, problem.gate_mode);
      double sum = 0.0;
      int n = 0;
      for (const auto& t : map.trials)
        if (t.capture_offset) {
          sum += *t.capture_offset * *t.capture_offset;
          ++n;
        }
      // No successful entry: as bad as the channel allows.
      if (n == 0) return -0.5 * gate.end_width;
      return -std::sqrt(sum / n);
    }
  }
  return 0.0;
}

OptimizationResult optimize(const OptimizationProblem& problem) {
  validate(problem);
  OptimizationResult result;
  int used = 0;
  std::optional<std::size_t> best_idx;

  const auto evaluate = [&](const GeometryParams& params, const char* phase) {
    TraceEntry entry{params, std::nullopt, phase};
    try {
      entry.objective = evaluate_geometry(params, problem);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleGeometry) throw;
    }
    ++used;
    result.trace.push_back(entry);
    if (entry.objective &&
        (!best_idx || *entry.objective > *result.trace[*best_idx].objective))
      best_idx = result.trace.size() - 1;
    return entry.objective;
  };

  const auto node = [](double lo, double hi, int n, int i) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };

  std::vector<GeometryParams> grid;
  for (int i = 0; i < problem.grid_straight; ++i)
    for (int j = 0; j < problem.grid_taper; ++j)
      grid.push_back({node(problem.straight_min, problem.straight_max, problem.grid_straight, i),
                      node(problem.taper_min, problem.taper_max, problem.grid_taper, j)});

  bool exhausted = false;
  for (const auto& g : grid) {
    if (used >= problem.budget) {
      exhausted = true;
      break;
    }
    evaluate(g, "grid");
  }

  if (!best_idx) {
    result.converged = false;
    if (!result.trace.empty()) result.best = result.trace.front().params;
    result.best_objective = -std::numeric_limits<double>::infinity();
    return result;
  }

  const double span = problem.straight_max - problem.straight_min;
  const double tol = std::max(span * 1e-3, 1e-12);
  bool refined = span <= tol;
  if (!exhausted && !refined) {
    const GeometryParams seed = result.trace[*best_idx].params;
    const double step = problem.grid_straight > 1 ? span / (problem.grid_straight - 1) : span;
    double a = std::max(problem.straight_min, seed.straight_length - step);
    double b = std::min(problem.straight_max, seed.straight_length + step);
    const auto f = [&](double s) {
      return evaluate({s, seed.taper_angle}, "golden")
          .value_or(-std::numeric_limits<double>::infinity());
    };
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    if (used + 2 <= problem.budget) {
      double fc = f(c), fd = f(d);
      while (b - a > tol && used < problem.budget) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = f(d);
        }
      }
      refined = b - a <= tol;
    }
  }

  result.converged = refined;
  result.best = result.trace[*best_idx].params;
  result.best_objective = *result.trace[*best_idx].objective;
  return result;
}

std::string trace_csv(const OptimizationResult& result, Objective objective) {
  const bool angle = objective == Objective::MaxToleratedAngle ||
                     objective == Objective::GeometricMargin;
  std::string s = "eval,phase,straight_length_m,taper_angle_deg,feasible,objective_";
  s += angle ? "rad" : (objective == Objective::CenteringError ? "m" : "fraction");
  s += "\n";
  char buf[160];
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& e = result.trace[i];
    char obj[32] = "";
    if (e.objective) std::snprintf(obj, sizeof obj, "%.9g", *e.objective);
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6f,%.6f,%d,%s\n", i, e.phase.c_str(),
                  e.params.straight_length, rad_to_deg(e.params.taper_angle),
                  e.objective ? 1 : 0, obj);
    s += buf;
  }
  return s;
}

}  // namespace gatesim
