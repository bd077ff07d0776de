#include <gtest/gtest.h>

#include <numbers>

#include "gatesim/config.hpp"
#include "gatesim/error.hpp"
#include "gatesim/svg.hpp"

using namespace gatesim;

namespace {

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;  // sentinel
}

std::string parse_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool well_formed_svg(const std::string& s) {
  return s.rfind("<?xml", 0) == 0 && s.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos &&
         s.size() > 7 && s.substr(s.size() - 7) == "</svg>\n";
}

}  // namespace

TEST(Config, MinimalScenario) {
  const RunConfig c = parse_config("[scenario]\napproach_speed = 1.02\n");
  ASSERT_TRUE(c.scenario.has_value());
  EXPECT_DOUBLE_EQ(c.scenario->approach_speed, 1.02);
  EXPECT_EQ(c.gate, GateSpec{});
  EXPECT_EQ(c.drone, DroneSpec{});
  EXPECT_FALSE(c.sweep.has_value());
}

TEST(Config, DegreeSuffix) {
  const RunConfig c = parse_config(
      "[gate]\ntaper_angle_deg = 30\n[scenario]\napproach_angle_deg = 12.5\n"
      "[sweep]\nangle_min_deg = 5\nangle_max_deg = 25\nangle_steps = 5\n");
  EXPECT_NEAR(c.gate.taper_angle, std::numbers::pi / 6.0, 1e-15);
  EXPECT_NEAR(c.scenario->approach_angle, deg_to_rad(12.5), 1e-15);
  EXPECT_NEAR(c.sweep->angle.max, deg_to_rad(25.0), 1e-15);
  EXPECT_EQ(parse_error_kind("[gate]\ntaper_angle = 0.5\ntaper_angle_deg = 30\n[scenario]\n"),
            ErrorKind::ConfigParse);
}

TEST(Config, Errors) {
  EXPECT_EQ(parse_error_kind("[gate]\nlink_mass = 0.2\n"), ErrorKind::ConfigParse);
  EXPECT_NE(parse_message("[gate]\nlink_mass = 0.2\n").find("no action section"),
            std::string::npos);
  EXPECT_NE(parse_message("[scenario]\nspeed = 1\n").find("unknown key 'speed'"),
            std::string::npos);
  EXPECT_NE(parse_message("[scenaro]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(parse_message("[scenario]\napproach_speed = fast\n").find("approach_speed"),
            std::string::npos);
  EXPECT_NE(parse_message("[gate]\nlink_mass = -1\n[scenario]\n").find("[gate]"),
            std::string::npos);
  EXPECT_EQ(parse_error_kind("[scenario]\ngate_mode = wobbly\n"), ErrorKind::ConfigParse);
  EXPECT_EQ(parse_error_kind("[sweep]\ntrials_per_cell = 0\n"), ErrorKind::ConfigParse);
  EXPECT_EQ(parse_error_kind("[scenario\n"), ErrorKind::ConfigParse);
  EXPECT_EQ(parse_error_kind("[port]\ndrones = 0\n"), ErrorKind::ConfigParse);
  EXPECT_EQ(parse_error_kind("[scenario]\na = 1\na = 2\n"), ErrorKind::ConfigParse);
  EXPECT_THROW(load_config("/nonexistent/file.ini"), Error);
}

TEST(Config, MissingSectionNamed) {
  const RunConfig c = parse_config("[port]\n");
  try {
    make_scenario(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigParse);
    EXPECT_NE(std::string(e.what()).find("[scenario]"), std::string::npos);
  }
}

TEST(Config, PortPresetAndAuto) {
  const RunConfig c = parse_config("[port]\npreset = measured\ngate_reset_time = auto\n");
  EXPECT_DOUBLE_EQ(c.port->config.rail_landing_time, kRailLandingMeasured);
  EXPECT_FALSE(c.port->config.gate_reset_time.has_value());
  const RunConfig d = parse_config("[port]\ngate_reset_time = 0.2\narrival_policy = stochastic\n");
  EXPECT_DOUBLE_EQ(*d.port->config.gate_reset_time, 0.2);
  EXPECT_EQ(d.port->config.arrival, ArrivalPolicy::Stochastic);
}

TEST(Config, RoundTrip) {
  const std::string text =
      "[gate]\ntaper_angle_deg = 40\nstraight_length = 0.07\ninertia_override = 0.003\n"
      "restitution = 0.45\n"
      "[drone]\ndrive_force = 1.7\n"
      "[model]\nformula = printed\n"
      "[scenario]\napproach_speed = 1.3\napproach_angle_deg = 17\nlateral_offset = 0.021\n"
      "gate_mode = fixed\n"
      "[sweep]\nspeed_min = 0.6\nspeed_max = 1.2\nspeed_steps = 4\nangle_max_deg = 33\n"
      "offset_steps = 3\nseed = 12345678901234\ngate_mode = both\n"
      "[optimize]\nobjective = centering-error\nbudget = 9\ntaper_min_deg = 30\n"
      "[port]\nconveyor_speed = 0.8\narrival_interval = 0.3\ndrones = 17\n"
      "[output]\ndir = results\nsvg = false\n";
  const RunConfig a = parse_config(text);
  const RunConfig b = parse_config(emit_config(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(emit_config(a), emit_config(b));
  EXPECT_EQ(a.formula, FormulaMode::Printed);
  EXPECT_EQ(a.sweep->formula, FormulaMode::Printed);
  EXPECT_EQ(a.sweep->gate_mode, SweepGates::Both);
  EXPECT_EQ(a.sweep->seed, 12345678901234ULL);
  EXPECT_EQ(a.output_dir, "results");
  EXPECT_FALSE(a.svg);
  // Identical results from the reloaded config.
  const EntryOutcome ra = run_entry(make_scenario(a));
  const EntryOutcome rb = run_entry(make_scenario(b));
  EXPECT_EQ(trajectory_csv(ra), trajectory_csv(rb));
}

TEST(Config, GateFileRoundTrip) {
  GateSpec g;
  g.straight_length = 0.0123456789;
  g.taper_angle = 0.77777;
  const RunConfig c = parse_config(emit_gate_config(g) + "[scenario]\n");
  EXPECT_EQ(c.gate, g);
}

TEST(Config, SeedAndFormulaOverrides) {
  RunConfig c = parse_config("[sweep]\n[optimize]\n[port]\n");
  apply_seed(c, 99);
  EXPECT_EQ(c.sweep->seed, 99u);
  EXPECT_EQ(c.optimize->plan.seed, 99u);
  EXPECT_EQ(c.port->config.seed, 99u);
  apply_formula(c, FormulaMode::Printed);
  EXPECT_EQ(make_problem(c).plan.formula, FormulaMode::Printed);
}

TEST(Svg, DocumentsAreStandalone) {
  Scenario s;
  s.approach_angle = deg_to_rad(20.0);
  s.lateral_offset = 0.05;
  const EntryOutcome out = run_entry(s);
  EXPECT_TRUE(well_formed_svg(trajectory_svg(out, s.gate)));

  SweepPlan p;
  p.speed = {0.5, 1.9, 3};
  p.angle = {0.0, deg_to_rad(60.0), 5};
  p.trials_per_cell = 2;
  const EnvelopeMap m = run_sweep(p, GateSpec{}, DroneSpec{}, GateMode::Passive);
  const std::string env = envelope_svg(m);
  EXPECT_TRUE(well_formed_svg(env));
  EXPECT_NE(env.find("entering velocity (m/s)"), std::string::npos);
  EXPECT_NE(env.find("entering angle (deg)"), std::string::npos);
  EXPECT_TRUE(well_formed_svg(failure_bins_svg(bin_failures(m))));
}

TEST(Svg, SteepRegionRendersFailures) {
  SweepPlan p;
  p.speed = {0.5, 1.9, 2};
  p.angle = {deg_to_rad(50.0), deg_to_rad(60.0), 2};
  p.trials_per_cell = 2;
  const EnvelopeMap m = run_sweep(p, GateSpec{}, DroneSpec{}, GateMode::Passive);
  const std::string svg = envelope_svg(m);
  // Success markers are circles; the legend carries exactly one.
  std::size_t circles = 0;
  for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  EXPECT_EQ(circles, 1u);
  std::size_t crimson = 0;
  for (std::size_t pos = 0; (pos = svg.find("crimson", pos)) != std::string::npos; ++pos) ++crimson;
  EXPECT_EQ(crimson, 2u * (m.trials.size() + 1));
}
