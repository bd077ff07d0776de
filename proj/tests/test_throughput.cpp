#include <gtest/gtest.h>

#include <cmath>

#include "gatesim/error.hpp"
#include "gatesim/throughput.hpp"

using namespace gatesim;

namespace {

PortConfig saturated(double landing = 0.5) {
  PortConfig c;
  c.rail_landing_time = landing;
  c.gate_reset_time = 0.0;
  c.arrival_interval = 0.0;
  return c;
}

}  // namespace

TEST(SimulateStream, SaturatedNominal) {
  const ThroughputReport r = simulate_stream(saturated(), 200);
  ASSERT_TRUE(r.landings_per_minute.has_value());
  EXPECT_NEAR(*r.landings_per_minute, 120.0, 1e-9);
  EXPECT_GE(*r.landings_per_minute, 100.0);
  EXPECT_NEAR(r.analytic_bound, 120.0, 1e-12);
  EXPECT_EQ(r.bottleneck, Bottleneck::Gate);
}

TEST(SimulateStream, SingleDrone) {
  const ThroughputReport r = simulate_stream(saturated(), 1);
  EXPECT_FALSE(r.landings_per_minute.has_value());
  EXPECT_DOUBLE_EQ(r.latency_min, 0.5);
  EXPECT_DOUBLE_EQ(r.latency_mean, 0.5);
  EXPECT_DOUBLE_EQ(r.latency_max, 0.5);
}

TEST(SimulateStream, ConveyorBound) {
  PortConfig c = saturated();
  c.drone_slot_pitch = 0.5;
  c.conveyor_speed = 0.5;  // one slot per second
  const ThroughputReport r = simulate_stream(c, 100);
  EXPECT_EQ(r.bottleneck, Bottleneck::Conveyor);
  EXPECT_NEAR(*r.landings_per_minute, 60.0, 1e-9);
  EXPECT_NEAR(r.analytic_bound, 60.0, 1e-12);
}

TEST(SimulateStream, ArrivalBound) {
  PortConfig c = saturated();
  c.arrival_interval = 2.0;
  const ThroughputReport r = simulate_stream(c, 50);
  EXPECT_EQ(r.bottleneck, Bottleneck::Arrivals);
  EXPECT_NEAR(*r.landings_per_minute, 30.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.latency_max, 0.5);
}

TEST(SimulateStream, ResetExtendsService) {
  PortConfig c = saturated();
  c.gate_reset_time = 0.25;
  const ThroughputReport r = simulate_stream(c, 100);
  EXPECT_NEAR(*r.landings_per_minute, 80.0, 1e-9);
}

TEST(SimulateStream, RateNeverExceedsBound) {
  for (double landing : {0.3, 0.5, 0.653, 1.2})
    for (double pitch : {0.1, 0.4, 0.9})
      for (double interval : {0.0, 0.2, 0.7}) {
        PortConfig c = saturated(landing);
        c.drone_slot_pitch = pitch;
        c.arrival_interval = interval;
        const ThroughputReport r = simulate_stream(c, 60);
        const double bound = 60.0 / std::max(landing, pitch / c.conveyor_speed);
        EXPECT_LE(*r.landings_per_minute, bound * (1.0 + 1e-12));
        if (interval == 0.0) {
          EXPECT_NEAR(*r.landings_per_minute, bound, bound * 0.01);
        }
      }
}

TEST(SimulateStream, EventLogIsCausal) {
  PortConfig c = saturated();
  c.arrival = ArrivalPolicy::Stochastic;
  c.arrival_rate = 2.5;
  c.drone_slot_pitch = 0.6;
  const ThroughputReport r = simulate_stream(c, 40);
  for (std::size_t i = 1; i < r.events.size(); ++i)
    EXPECT_LE(r.events[i - 1].time, r.events[i].time);
  std::vector<double> arrive(40, -1), depart(40, -1);
  for (const auto& e : r.events) {
    if (e.event == PortEvent::Arrive) arrive[e.drone] = e.time;
    if (e.event == PortEvent::Depart) depart[e.drone] = e.time;
  }
  for (int i = 0; i < 40; ++i) {
    ASSERT_GE(arrive[i], 0.0);
    EXPECT_GE(depart[i], arrive[i] + c.rail_landing_time - 1e-12);
  }
}

TEST(SimulateStream, StochasticDeterministic) {
  PortConfig c = saturated();
  c.arrival = ArrivalPolicy::Stochastic;
  c.seed = 5;
  EXPECT_EQ(events_csv(simulate_stream(c, 30)), events_csv(simulate_stream(c, 30)));
  PortConfig d = c;
  d.seed = 6;
  EXPECT_NE(events_csv(simulate_stream(c, 30)), events_csv(simulate_stream(d, 30)));
}

TEST(SimulateStream, Validation) {
  EXPECT_THROW(simulate_stream(saturated(), 0), Error);
  PortConfig c = saturated();
  c.conveyor_speed = 0.0;
  EXPECT_THROW(simulate_stream(c, 5), Error);
  PortConfig unresolved;
  EXPECT_THROW(simulate_stream(unresolved, 5), Error);
}

TEST(SimulateStream, ResetDefaultsToSettlingTime) {
  const PortConfig c = resolve_reset_time(PortConfig{}, GateSpec{}, DroneSpec{});
  ASSERT_TRUE(c.gate_reset_time.has_value());
  EXPECT_EQ(*c.gate_reset_time, *gate_settling_time(GateSpec{}, DroneSpec{}));
  PortConfig keep;
  keep.gate_reset_time = 0.3;
  EXPECT_EQ(*resolve_reset_time(keep, GateSpec{}, DroneSpec{}).gate_reset_time, 0.3);
}

TEST(EfficiencyRatio, Presets) {
  EXPECT_NEAR(efficiency_ratio(nominal_preset()), 9.8, 1e-12);
  EXPECT_NEAR(efficiency_ratio(measured_preset()), 7.5, 0.05);
  PortConfig same;
  same.rail_landing_time = same.vertical_landing_time;
  EXPECT_DOUBLE_EQ(efficiency_ratio(same), 1.0);
  PortConfig zero;
  zero.rail_landing_time = 0.0;
  EXPECT_THROW(efficiency_ratio(zero), Error);
}

TEST(Export, EventsCsvAndReport) {
  const ThroughputReport r = simulate_stream(saturated(), 3);
  const std::string csv = events_csv(r);
  EXPECT_EQ(csv.rfind("time_s,drone,event\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 15);
  EXPECT_NE(report_text(r, saturated()).find("landings_per_minute: 120.000"), std::string::npos);
}
