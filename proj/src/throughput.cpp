#include "gatesim/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "gatesim/error.hpp"

namespace gatesim {

void validate(const PortConfig& c) {
  const auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSpec, what); };
  const auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(c.rail_landing_time) || !nonneg(c.vertical_landing_time))
    fail("landing times must be >= 0");
  if (c.gate_reset_time && !nonneg(*c.gate_reset_time)) fail("gate_reset_time must be >= 0");
  if (!(c.conveyor_speed > 0.0) || !std::isfinite(c.conveyor_speed))
    fail("conveyor_speed must be > 0");
  if (!(c.drone_slot_pitch > 0.0) || !std::isfinite(c.drone_slot_pitch))
    fail("drone_slot_pitch must be > 0");
  if (!nonneg(c.arrival_interval)) fail("arrival_interval must be >= 0");
  if (c.arrival == ArrivalPolicy::Stochastic && !(c.arrival_rate > 0.0))
    fail("arrival_rate must be > 0");
}

PortConfig nominal_preset() { return PortConfig{}; }

PortConfig measured_preset() {
  PortConfig c;
  c.rail_landing_time = kRailLandingMeasured;
  return c;
}

PortConfig resolve_reset_time(PortConfig config, const GateSpec& gate, const DroneSpec& drone) {
  if (!config.gate_reset_time) config.gate_reset_time = gate_settling_time(gate, drone).value_or(0.0);
  return config;
}

std::string_view to_string(Bottleneck b) {
  switch (b) {
    case Bottleneck::Gate: return "gate";
    case Bottleneck::Conveyor: return "conveyor";
    case Bottleneck::Arrivals: return "arrivals";
  }
  return "?";
}

std::string_view to_string(PortEvent e) {
  switch (e) {
    case PortEvent::Arrive: return "arrive";
    case PortEvent::GateStart: return "gate_start";
    case PortEvent::Landed: return "landed";
    case PortEvent::Depart: return "depart";
    case PortEvent::GateFree: return "gate_free";
  }
  return "?";
}

ThroughputReport simulate_stream(const PortConfig& config, int n_drones) {
  validate(config);
  if (n_drones < 1) throw Error(ErrorKind::InvalidInput, "n_drones must be >= 1");
  if (!config.gate_reset_time)
    throw Error(ErrorKind::InvalidInput, "gate_reset_time unresolved");

  const double reset = *config.gate_reset_time;
  const double headway = config.drone_slot_pitch / config.conveyor_speed;
  const double service = config.rail_landing_time + reset;
  const double mean_gap = config.arrival == ArrivalPolicy::Stochastic ? 1.0 / config.arrival_rate
                                                                       : config.arrival_interval;

  ThroughputReport rep;
  rep.drones = n_drones;
  rep.gate_reset_time = reset;
  const double cycle = std::max({service, headway, mean_gap});
  rep.analytic_bound = cycle > 0.0 ? 60.0 / cycle : 0.0;
  rep.bottleneck = service >= headway && service >= mean_gap ? Bottleneck::Gate
                   : headway >= mean_gap                     ? Bottleneck::Conveyor
                                                             : Bottleneck::Arrivals;

  std::mt19937_64 rng(config.seed);
  std::vector<double> depart(static_cast<std::size_t>(n_drones));
  double arrival = 0.0, gate_free = 0.0, prev_depart = -headway;
  double lat_sum = 0.0;
  rep.latency_min = std::numeric_limits<double>::infinity();
  rep.latency_max = 0.0;
  for (int i = 0; i < n_drones; ++i) {
    if (i > 0) {
      if (config.arrival == ArrivalPolicy::Stochastic) {
        const double u = (rng() >> 11) * 0x1.0p-53;
        arrival += -std::log1p(-u) / config.arrival_rate;
      } else {
        arrival += config.arrival_interval;
      }
    }
    const double start = std::max(arrival, gate_free);
    const double landed = start + config.rail_landing_time;
    const double dep = std::max(landed, prev_depart + headway);
    gate_free = std::max(landed + reset, dep);
    prev_depart = dep;
    depart[static_cast<std::size_t>(i)] = dep;

    rep.events.push_back({arrival, i, PortEvent::Arrive});
    rep.events.push_back({start, i, PortEvent::GateStart});
    rep.events.push_back({landed, i, PortEvent::Landed});
    rep.events.push_back({dep, i, PortEvent::Depart});
    rep.events.push_back({gate_free, i, PortEvent::GateFree});

    const double latency = dep - arrival;
    lat_sum += latency;
    rep.latency_min = std::min(rep.latency_min, latency);
    rep.latency_max = std::max(rep.latency_max, latency);
  }
  rep.latency_mean = lat_sum / n_drones;
  std::stable_sort(rep.events.begin(), rep.events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.time < b.time; });

  // Steady state over the last 80% of completions.
  if (n_drones >= 2) {
    const auto first = static_cast<std::size_t>(std::min(n_drones - 2, n_drones / 5));
    const double span = depart.back() - depart[first];
    const double count = static_cast<double>(n_drones - 1 - first);
    if (span > 0.0) rep.landings_per_minute = 60.0 * count / span;
  }
  return rep;
}

double efficiency_ratio(const PortConfig& config) {
  if (!(config.rail_landing_time > 0.0) || !(config.vertical_landing_time > 0.0))
    throw Error(ErrorKind::InvalidInput, "landing times must be > 0");
  return config.vertical_landing_time / config.rail_landing_time;
}

std::string events_csv(const ThroughputReport& report) {
  std::string s = "time_s,drone,event\n";
  char buf[96];
  for (const auto& e : report.events) {
    std::snprintf(buf, sizeof buf, "%.6f,%d,%s\n", e.time, e.drone,
                  std::string(to_string(e.event)).c_str());
    s += buf;
  }
  return s;
}

std::string report_text(const ThroughputReport& r, const PortConfig& c) {
  char buf[512];
  char rate[32] = "n/a";
  if (r.landings_per_minute) std::snprintf(rate, sizeof rate, "%.3f", *r.landings_per_minute);
  std::snprintf(buf, sizeof buf,
                "drones: %d\n"
                "landings_per_minute: %s\n"
                "analytic_bound_per_minute: %.3f\n"
                "bottleneck: %s\n"
                "gate_reset_time_s: %.4f\n"
                "latency_s: min %.4f mean %.4f max %.4f\n"
                "efficiency_ratio: %.4f\n",
                r.drones, rate, r.analytic_bound, std::string(to_string(r.bottleneck)).c_str(),
                r.gate_reset_time, r.latency_min, r.latency_mean, r.latency_max,
                efficiency_ratio(c));
  return buf;
}

}  // namespace gatesim
