#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatesim/entry_sim.hpp"

namespace gatesim {

// Inclusive grid of `steps` nodes; a single step sits at `min`.
struct Range {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  double node(int i) const {
    return steps == 1 ? min : min + (max - min) * static_cast<double>(i) / (steps - 1);
  }
  double spacing() const { return steps == 1 ? 0.0 : (max - min) / (steps - 1); }
  bool operator==(const Range&) const = default;
};

enum class SweepGates { Passive, Fixed, Both };

// Speeds and angles are grid nodes. Offsets are bins: with `steps` bins over
// [min, max], each trial draws its offset uniformly inside its cell's bin.
struct SweepPlan {
  Range speed{0.5, 1.9, 8};
  Range angle{0.0, deg_to_rad(45.0), 10};
  Range offset{-0.05, 0.05, 1};
  int trials_per_cell = 10;
  std::uint64_t seed = 1;
  SweepGates gate_mode = SweepGates::Passive;
  double time_step = 1e-4;
  double timeout = 5.0;
  FormulaMode formula = FormulaMode::Consistent;

  bool operator==(const SweepPlan&) const = default;
};

void validate(const SweepPlan& plan);
std::size_t cell_count(const SweepPlan& plan);

enum class TrialOutcome { Success, BounceBack, Stall, Timeout, Diverged };
inline constexpr std::size_t kTrialOutcomeCount = 5;

std::string_view to_string(TrialOutcome outcome);

struct TrialRecord {
  std::size_t cell = 0;
  int trial = 0;
  double speed = 0.0;
  double angle = 0.0;
  double offset = 0.0;
  TrialOutcome outcome = TrialOutcome::Timeout;
  std::size_t collision_count = 0;
  // Link-frame position of the first drone-to-link impact (y = lateral
  // distance inward from the pivot line).
  std::optional<Vec2> first_collision;
  std::optional<double> landing_time;
  // Tip lateral position when it reaches the rail (successful trials only).
  std::optional<double> capture_offset;

  bool operator==(const TrialRecord&) const = default;
};

struct CellResult {
  std::size_t index = 0;
  double speed = 0.0;
  double angle = 0.0;
  double offset_lo = 0.0;
  double offset_hi = 0.0;
  std::array<int, kTrialOutcomeCount> counts{};
  int trials = 0;

  double success_ratio() const { return trials > 0 ? double(counts[0]) / trials : 0.0; }
  bool operator==(const CellResult&) const = default;
};

struct EnvelopeMap {
  SweepPlan plan;
  GateMode mode = GateMode::Passive;
  std::uint64_t gate_hash = 0;
  std::vector<CellResult> cells;    // ordered by cell index
  std::vector<TrialRecord> trials;  // ordered by (cell, trial)

  bool operator==(const EnvelopeMap&) const = default;
};

std::uint64_t gate_spec_hash(const GateSpec& gate);

// Single trial; deterministic in (plan.seed, cell, trial) alone.
TrialRecord run_trial(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                      GateMode mode, std::size_t cell, int trial);

// Reference implementation: plain nested loops, one thread.
EnvelopeMap run_sweep_serial(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                             GateMode mode);

// OpenMP over trials; output identical to run_sweep_serial.
EnvelopeMap run_sweep(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                      GateMode mode);

// Cells [first, last) only, as a mergeable partial map.
EnvelopeMap run_sweep_cells(const SweepPlan& plan, const GateSpec& gate, const DroneSpec& drone,
                            GateMode mode, std::size_t first, std::size_t last);

// Merges partial maps of one plan; the result is ordered by cell index
// whatever the order of `parts`.
EnvelopeMap merge(std::span<const EnvelopeMap> parts);

// Canonical serialisations (byte-stable for equal maps).
std::string envelope_csv(const EnvelopeMap& map);
std::string trials_csv(const EnvelopeMap& map);

inline constexpr double kAngleBinWidth = deg_to_rad(5.0);
inline constexpr double kPositionBinWidth = 0.015;

struct FailureBin {
  int trials = 0;
  int failures = 0;
  double rate = 0.0;
  bool empty = true;
};

struct FailureRateBins {
  double angle_width = kAngleBinWidth;
  double position_width = kPositionBinWidth;
  int angle_bins = 0;
  int position_bins = 0;
  std::vector<FailureBin> bins;  // row-major: angle bin, then position bin
  int unbinned_trials = 0;       // trials without a link impact

  const FailureBin& at(int angle_bin, int position_bin) const {
    return bins[static_cast<std::size_t>(angle_bin) * position_bins + position_bin];
  }
};

int angle_bin_of(double angle, double width = kAngleBinWidth);
int position_bin_of(double position, double width = kPositionBinWidth);

FailureRateBins bin_failures(const EnvelopeMap& map, std::span<const TrialRecord> trials,
                             double angle_width = kAngleBinWidth,
                             double position_width = kPositionBinWidth);
inline FailureRateBins bin_failures(const EnvelopeMap& map) {
  return bin_failures(map, map.trials);
}

std::string failure_bins_csv(const FailureRateBins& bins);

inline constexpr double kToleranceThreshold = 0.95;

// Largest angle node A such that every angle node up to A has pooled success
// (over all speeds and offsets) >= threshold. None if the smallest fails.
std::optional<double> max_tolerated_angle(const EnvelopeMap& map,
                                          double threshold = kToleranceThreshold);

// Passive minus fixed max tolerated angle. A map with no tolerated angle
// counts as one angle spacing below the plan's smallest angle.
double tolerance_gain(const EnvelopeMap& passive, const EnvelopeMap& fixed,
                      double threshold = kToleranceThreshold);

}  // namespace gatesim
