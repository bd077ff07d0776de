#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatesim/entry_sim.hpp"

namespace gatesim {

inline constexpr double kRailLandingNominal = 0.5;   // s
inline constexpr double kRailLandingMeasured = 0.653;  // s
inline constexpr double kVerticalLanding = 4.9;      // s

enum class ArrivalPolicy { FixedInterval, Stochastic };

struct PortConfig {
  double rail_landing_time = kRailLandingNominal;
  double vertical_landing_time = kVerticalLanding;
  // None: use the passive gate's settling time after a reference entry.
  std::optional<double> gate_reset_time;
  double conveyor_speed = 1.0;    // m/s
  double drone_slot_pitch = 0.3;  // m
  ArrivalPolicy arrival = ArrivalPolicy::FixedInterval;
  double arrival_interval = 0.0;  // s; 0 = saturated
  double arrival_rate = 1.0;      // 1/s, Poisson arrivals
  std::uint64_t seed = 1;

  bool operator==(const PortConfig&) const = default;
};

void validate(const PortConfig& config);

PortConfig nominal_preset();
PortConfig measured_preset();

// Fills gate_reset_time from gate_settling_time when unset.
PortConfig resolve_reset_time(PortConfig config, const GateSpec& gate, const DroneSpec& drone);

enum class Bottleneck { Gate, Conveyor, Arrivals };
std::string_view to_string(Bottleneck b);

enum class PortEvent { Arrive, GateStart, Landed, Depart, GateFree };
std::string_view to_string(PortEvent e);

struct EventRecord {
  double time = 0.0;
  int drone = 0;
  PortEvent event = PortEvent::Arrive;
};

struct ThroughputReport {
  int drones = 0;
  std::optional<double> landings_per_minute;  // none for a single drone
  double analytic_bound = 0.0;                // landings/min
  double latency_min = 0.0;
  double latency_mean = 0.0;
  double latency_max = 0.0;
  Bottleneck bottleneck = Bottleneck::Gate;
  double gate_reset_time = 0.0;
  std::vector<EventRecord> events;  // ordered by time, then drone
};

// Requires gate_reset_time to be set (see resolve_reset_time).
ThroughputReport simulate_stream(const PortConfig& config, int n_drones);

double efficiency_ratio(const PortConfig& config);

std::string events_csv(const ThroughputReport& report);
std::string report_text(const ThroughputReport& report, const PortConfig& config);

}  // namespace gatesim
