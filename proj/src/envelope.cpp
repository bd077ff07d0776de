#include "gatesim/envelope.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <string_view>
#include <tuple>
#include <random>

#include "gatesim/error.hpp"

namespace gatesim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, int trial) {
  return splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(cell) << 20) ^
                                      static_cast<std::uint64_t>(trial)));
}

double unit_uniform(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct CellCoords {
  int speed = 0;
  int angle = 0;
  int offset = 0;
};

CellCoords coords_of(const SweepPlan& plan, std::size_t cell) {
  const auto n_off = static_cast<std::size_t>(plan.offset.steps);
  const auto n_ang = static_cast<std::size_t>(plan.angle.steps);
  CellCoords c;
  c.offset = static_cast<int>(cell % n_off);
  c.angle = static_cast<int>((cell / n_off) % n_ang);
  c.speed = static_cast<int>(cell / (n_off * n_ang));
  return c;
}

std::pair<double, double> offset_bin(const Range& r, int i) {
  const double w = (r.max - r.min) / r.steps;
  return {r.min + w * i, i + 1 == r.steps ? r.max : r.min + w * (i + 1)};
}

CellResult empty_cell(const SweepPlan& plan, std::size_t index) {
  const CellCoords c = coords_of(plan, index);
  CellResult cell;
  cell.index = index;
  cell.speed = plan.speed.node(c.speed);
  cell.angle = plan.angle.node(c.angle);
  std::tie(cell.offset_lo, cell.offset_hi) = offset_bin(plan.offset, c.offset);
  return cell;
}

TrialOutcome to_trial_outcome(EntryResult r) {
  switch (r) {
    case EntryResult::Success: return TrialOutcome::Success;
    case EntryResult::BounceBack: return TrialOutcome::BounceBack;
    case EntryResult::Stall: return TrialOutcome::Stall;
    case EntryResult::Timeout: return TrialOutcome::Timeout;
  }
  return TrialOutcome::Diverged;
}

EnvelopeMap tally(const SweepPlan& plan, const GateSpec& gate, GateMode mode, std::size_t first,
                  std::size_t last, std::vector<TrialRecord> trials) {
  EnvelopeMap map;
  map.plan = plan;
  map.mode = mode;
  map.gate_hash = gate_spec_hash(gate);
  map.cells.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) map.cells.push_back(empty_cell(plan, i));
  for (const auto& t : trials) {
    auto& cell = map.cells[t.cell - first];
    ++cell.counts[static_cast<std::size_t>(t.outcome)];
    ++cell.trials;
  }
  map.trials = std::move(trials);
  return map;
}

void check_inputs(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                  GateMode mode) {
  validate(plan);
  Scenario probe;
  probe.gate = gate;
  probe.drone = drone;
  probe.gate_mode = mode;
  probe.approach_speed = std::min(plan.speed.min, plan.speed.max);
  probe.time_step = plan.time_step;
  probe.timeout = plan.timeout;
  validate(probe);
  if (std::max(plan.speed.min, plan.speed.max) > drone.max_speed + 1e-6)
    throw Error(ErrorKind::InvalidSpec, "sweep speed exceeds drone max_speed");
}

}  // namespace

std::string_view to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::Success: return "Success";
    case TrialOutcome::BounceBack: return "BounceBack";
    case TrialOutcome::Stall: return "Stall";
    case TrialOutcome::Timeout: return "Timeout";
    case TrialOutcome::Diverged: return "Diverged";
  }
  return "?";
}

void validate(const SweepPlan& plan) {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidSpec, what); };
  const auto check_range = [&](const Range& r, const char* name) {
    if (!std::isfinite(r.min) || !std::isfinite(r.max)) fail(std::string(name) + " range not finite");
    if (r.steps < 1) fail(std::string(name) + " range needs steps >= 1");
    if (r.max < r.min) fail(std::string(name) + " range has max < min");
    if (r.steps > 1 && r.max == r.min) fail(std::string(name) + " range is degenerate");
  };
  check_range(plan.speed, "speed");
  check_range(plan.angle, "angle");
  check_range(plan.offset, "offset");
  if (plan.speed.min < 0.0) fail("speed range must be >= 0");
  if (std::max(std::abs(plan.angle.min), std::abs(plan.angle.max)) >= 0.5 * std::numbers::pi)
    fail("angle range must stay inside (-pi/2, pi/2)");
  if (plan.trials_per_cell < 1) fail("trials_per_cell must be >= 1");
}

std::size_t cell_count(const SweepPlan& plan) {
  return static_cast<std::size_t>(plan.speed.steps) * plan.angle.steps * plan.offset.steps;
}

std::uint64_t gate_spec_hash(const GateSpec& g) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|"
                "%.17g|%.17g|%d|%.17g",
                g.entrance_width, g.end_width, g.depth, g.taper_angle, g.straight_length,
                g.link_mass, g.restitution, g.restoring_torque_coeff, g.damping_coeff,
                g.coupler_mass, g.joint_radius, g.pivot_left.x, g.pivot_left.y, g.pivot_right.x,
                g.pivot_right.y, g.inertia_override.value_or(-1.0), g.polyline_resolution,
                g.inertia_override ? 1.0 : 0.0);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  return h;
}

TrialRecord run_trial(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                      GateMode mode, std::size_t cell, int trial) {
  const CellCoords c = coords_of(plan, cell);
  std::mt19937_64 rng(trial_seed(plan.seed, cell, trial));
  const auto [lo, hi] = offset_bin(plan.offset, c.offset);

  TrialRecord rec;
  rec.cell = cell;
  rec.trial = trial;
  rec.speed = plan.speed.node(c.speed);
  rec.angle = plan.angle.node(c.angle);
  rec.offset = lo + (hi - lo) * unit_uniform(rng);

  Scenario sc;
  sc.gate = gate;
  sc.drone = drone;
  sc.approach_speed = rec.speed;
  sc.approach_angle = rec.angle;
  sc.lateral_offset = rec.offset;
  sc.gate_mode = mode;
  sc.time_step = plan.time_step;
  sc.timeout = plan.timeout;
  sc.formula = plan.formula;
  sc.record_trajectory = false;
  try {
    const EntryOutcome out = run_entry(sc);
    rec.outcome = to_trial_outcome(out.result);
    rec.collision_count = out.collisions.size();
    rec.landing_time = out.landing_time;
    if (out.result == EntryResult::Success) rec.capture_offset = out.final_state.tip_position.y;
    for (const auto& col : out.collisions) {
      if (col.surface != Surface::Frame) {
        rec.first_collision = col.link_position;
        break;
      }
    }
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::NumericalDivergence) throw;
    rec.outcome = TrialOutcome::Diverged;
  }
  return rec;
}

EnvelopeMap run_sweep_serial(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                             GateMode mode) {
  check_inputs(plan, gate, drone, mode);
  const std::size_t cells = cell_count(plan);
  std::vector<TrialRecord> trials;
  trials.reserve(cells * plan.trials_per_cell);
  for (std::size_t cell = 0; cell < cells; ++cell)
    for (int t = 0; t < plan.trials_per_cell; ++t)
      trials.push_back(run_trial(plan, gate, drone, mode, cell, t));
  return tally(plan, gate, mode, 0, cells, std::move(trials));
}

EnvelopeMap run_sweep_cells(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                            GateMode mode, std::size_t first, std::size_t last) {
  check_inputs(plan, gate, drone, mode);
  last = std::min(last, cell_count(plan));
  first = std::min(first, last);
  const std::size_t per_cell = static_cast<std::size_t>(plan.trials_per_cell);
  const auto n = static_cast<long long>((last - first) * per_cell);
  std::vector<TrialRecord> trials(static_cast<std::size_t>(n));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    const std::size_t cell = first + static_cast<std::size_t>(i) / per_cell;
    const int t = static_cast<int>(static_cast<std::size_t>(i) % per_cell);
    try {
      trials[static_cast<std::size_t>(i)] = run_trial(plan, gate, drone, mode, cell, t);
    } catch (...) {
#pragma omp critical(gatesim_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return tally(plan, gate, mode, first, last, std::move(trials));
}

EnvelopeMap run_sweep(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                      GateMode mode) {
  return run_sweep_cells(plan, gate, drone, mode, 0, cell_count(plan));
}

EnvelopeMap merge(std::span<const EnvelopeMap> parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidInput, "nothing to merge");
  EnvelopeMap out;
  out.plan = parts.front().plan;
  out.mode = parts.front().mode;
  out.gate_hash = parts.front().gate_hash;
  for (const auto& p : parts) {
    if (!(p.plan == out.plan) || p.mode != out.mode || p.gate_hash != out.gate_hash)
      throw Error(ErrorKind::IncomparablePlans, "partial maps come from different sweeps");
    out.cells.insert(out.cells.end(), p.cells.begin(), p.cells.end());
    out.trials.insert(out.trials.end(), p.trials.begin(), p.trials.end());
  }
  std::sort(out.cells.begin(), out.cells.end(),
            [](const CellResult& a, const CellResult& b) { return a.index < b.index; });
  std::sort(out.trials.begin(), out.trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return a.cell != b.cell ? a.cell < b.cell : a.trial < b.trial;
  });
  for (std::size_t i = 1; i < out.cells.size(); ++i)
    if (out.cells[i].index == out.cells[i - 1].index)
      throw Error(ErrorKind::InvalidInput, "partial maps overlap");
  return out;
}

std::string envelope_csv(const EnvelopeMap& map) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# gate_mode=%s gate_hash=%016llx seed=%llu trials_per_cell=%d\n",
                std::string(to_string(map.mode)).c_str(),
                static_cast<unsigned long long>(map.gate_hash),
                static_cast<unsigned long long>(map.plan.seed), map.plan.trials_per_cell);
  std::string s = buf;
  s += "cell,speed_mps,angle_deg,offset_lo_m,offset_hi_m,trials,success,bounce_back,stall,timeout,"
       "diverged,success_ratio\n";
  for (const auto& c : map.cells) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%d,%d,%d,%d,%d,%d,%.6f\n", c.index,
                  c.speed, rad_to_deg(c.angle), c.offset_lo, c.offset_hi, c.trials, c.counts[0],
                  c.counts[1], c.counts[2], c.counts[3], c.counts[4], c.success_ratio());
    s += buf;
  }
  return s;
}

std::string trials_csv(const EnvelopeMap& map) {
  std::string s =
      "cell,trial,speed_mps,angle_deg,offset_m,outcome,collisions,first_collision_x_m,"
      "first_collision_y_m,landing_time_s,capture_offset_m\n";
  char buf[256];
  for (const auto& t : map.trials) {
    char fx[32] = "", fy[32] = "", lt[32] = "", co[32] = "";
    if (t.first_collision) {
      std::snprintf(fx, sizeof fx, "%.9g", t.first_collision->x);
      std::snprintf(fy, sizeof fy, "%.9g", t.first_collision->y);
    }
    if (t.landing_time) std::snprintf(lt, sizeof lt, "%.6f", *t.landing_time);
    if (t.capture_offset) std::snprintf(co, sizeof co, "%.9g", *t.capture_offset);
    std::snprintf(buf, sizeof buf, "%zu,%d,%.6f,%.6f,%.9g,%s,%zu,%s,%s,%s,%s\n", t.cell, t.trial,
                  t.speed, rad_to_deg(t.angle), t.offset, std::string(to_string(t.outcome)).c_str(),
                  t.collision_count, fx, fy, lt, co);
    s += buf;
  }
  return s;
}

int angle_bin_of(double angle, double width) {
  return static_cast<int>(std::floor(angle / width + 1e-9));
}

int position_bin_of(double position, double width) {
  return static_cast<int>(std::floor(position / width + 1e-9));
}

FailureRateBins bin_failures(const EnvelopeMap& map, std::span<const TrialRecord> trials,
                             double angle_width, double position_width) {
  FailureRateBins out;
  out.angle_width = angle_width;
  out.position_width = position_width;
  const double max_angle = std::max(std::abs(map.plan.angle.min), std::abs(map.plan.angle.max));
  out.angle_bins = angle_bin_of(max_angle, angle_width) + 1;
  int max_pos_bin = 0;
  for (const auto& t : trials)
    if (t.first_collision)
      max_pos_bin = std::max(max_pos_bin, position_bin_of(std::max(0.0, t.first_collision->y),
                                                          position_width));
  out.position_bins = max_pos_bin + 1;
  out.bins.assign(static_cast<std::size_t>(out.angle_bins) * out.position_bins, FailureBin{});
  for (const auto& t : trials) {
    if (!t.first_collision) {
      ++out.unbinned_trials;
      continue;
    }
    const int a = std::clamp(angle_bin_of(std::abs(t.angle), angle_width), 0, out.angle_bins - 1);
    const int p = position_bin_of(std::max(0.0, t.first_collision->y), position_width);
    auto& bin = out.bins[static_cast<std::size_t>(a) * out.position_bins + p];
    ++bin.trials;
    if (t.outcome != TrialOutcome::Success) ++bin.failures;
  }
  for (auto& bin : out.bins) {
    bin.empty = bin.trials == 0;
    bin.rate = bin.empty ? 0.0 : double(bin.failures) / bin.trials;
  }
  return out;
}

std::string failure_bins_csv(const FailureRateBins& bins) {
  std::string s = "angle_lo_deg,angle_hi_deg,position_lo_m,position_hi_m,trials,failures,"
                  "failure_rate,empty\n";
  char buf[160];
  for (int a = 0; a < bins.angle_bins; ++a)
    for (int p = 0; p < bins.position_bins; ++p) {
      const auto& b = bins.at(a, p);
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.4f,%.4f,%d,%d,%.6f,%d\n",
                    rad_to_deg(a * bins.angle_width), rad_to_deg((a + 1) * bins.angle_width),
                    p * bins.position_width, (p + 1) * bins.position_width, b.trials, b.failures,
                    b.rate, b.empty ? 1 : 0);
      s += buf;
    }
  return s;
}

std::optional<double> max_tolerated_angle(const EnvelopeMap& map, double threshold) {
  const int n_angle = map.plan.angle.steps;
  std::vector<int> success(n_angle, 0), total(n_angle, 0);
  for (const auto& c : map.cells) {
    const int a = coords_of(map.plan, c.index).angle;
    success[a] += c.counts[0];
    total[a] += c.trials;
  }
  std::optional<double> best;
  for (int a = 0; a < n_angle; ++a) {
    if (total[a] == 0 || double(success[a]) / total[a] < threshold) break;
    best = map.plan.angle.node(a);
  }
  return best;
}

double tolerance_gain(const EnvelopeMap& passive, const EnvelopeMap& fixed, double threshold) {
  if (!(passive.plan == fixed.plan) || passive.cells.size() != fixed.cells.size())
    throw Error(ErrorKind::IncomparablePlans, "passive and fixed maps use different plans");
  const Range& r = passive.plan.angle;
  const double floor_angle = r.min - r.spacing();
  return max_tolerated_angle(passive, threshold).value_or(floor_angle) -
         max_tolerated_angle(fixed, threshold).value_or(floor_angle);
}

}  // namespace gatesim
