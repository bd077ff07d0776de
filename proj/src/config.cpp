#include "gatesim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gatesim/error.hpp"

namespace gatesim {
namespace pt = boost::property_tree;

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigParse, "[" + where + "] " + what);
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    used_.insert(key);
    return it->second.data();
  }

  void number(const std::string& key, double& out) {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void angle(const std::string& key, double& out) {
    auto rad = raw(key);
    auto deg = raw(key + "_deg");
    if (rad && deg) parse_error(name_, "both " + key + " and " + key + "_deg given");
    if (rad) out = to_double(key, *rad);
    if (deg) out = deg_to_rad(to_double(key + "_deg", *deg));
  }

  void integer(const std::string& key, int& out) {
    if (auto v = raw(key)) {
      const std::string s = trim(*v);
      int value = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        parse_error(name_, key + ": expected an integer, got '" + *v + "'");
      out = value;
    }
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      const std::string s = trim(*v);
      std::uint64_t value = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        parse_error(name_, key + ": expected an unsigned integer, got '" + *v + "'");
      out = value;
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      const std::string s = trim(*v);
      if (s == "true" || s == "1" || s == "yes") out = true;
      else if (s == "false" || s == "0" || s == "no") out = false;
      else parse_error(name_, key + ": expected true/false, got '" + *v + "'");
    }
  }

  void gate_mode(const std::string& key, GateMode& out) {
    if (auto v = raw(key)) {
      auto m = parse_gate_mode(trim(*v));
      if (!m) parse_error(name_, key + ": expected passive or fixed, got '" + *v + "'");
      out = *m;
    }
  }

  void range(const std::string& prefix, Range& r, bool is_angle) {
    if (is_angle) {
      angle(prefix + "_min", r.min);
      angle(prefix + "_max", r.max);
    } else {
      number(prefix + "_min", r.min);
      number(prefix + "_max", r.max);
    }
    integer(prefix + "_steps", r.steps);
  }

  void finish() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_)
      if (!used_.count(key)) parse_error(name_, "unknown key '" + key + "'");
  }

  const std::string& name() const { return name_; }

  [[noreturn]] void fail(const std::string& what) const { parse_error(name_, what); }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

  double to_double(const std::string& key, const std::string& text) const {
    const std::string s = trim(text);
    double value = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      parse_error(name_, key + ": expected a number, got '" + text + "'");
    return value;
  }

  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

void read_plan(Section& s, SweepPlan& plan) {
  s.range("speed", plan.speed, false);
  s.range("angle", plan.angle, true);
  s.range("offset", plan.offset, false);
  s.integer("trials_per_cell", plan.trials_per_cell);
  s.u64("seed", plan.seed);
  s.number("time_step", plan.time_step);
  s.number("timeout", plan.timeout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class F>
void check(Section& s, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParse) throw;
    s.fail(e.what());
  }
}

std::string_view formula_name(FormulaMode m) {
  return m == FormulaMode::Printed ? "printed" : "consistent";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ConfigParse, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  // The ini reader drops sections without keys; an empty [scenario] still
  // selects the action with all defaults.
  {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] != '[') continue;
      const auto e = line.find(']', b);
      if (e == std::string::npos) continue;
      const std::string name = line.substr(b + 1, e - b - 1);
      if (tree.find(name) == tree.not_found()) tree.push_back({name, pt::ptree()});
    }
  }

  static const std::set<std::string> known = {"gate",     "drone", "scenario", "sweep",
                                              "optimize", "port",  "output",   "model"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty())
      throw Error(ErrorKind::ConfigParse, "key '" + name + "' outside any section");
    if (!known.count(name)) throw Error(ErrorKind::ConfigParse, "unknown section [" + name + "]");
  }
  const auto section = [&](const char* name) {
    auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  RunConfig c;

  Section gate = section("gate");
  GateSpec& g = c.gate;
  gate.number("entrance_width", g.entrance_width);
  gate.number("end_width", g.end_width);
  gate.number("depth", g.depth);
  gate.angle("taper_angle", g.taper_angle);
  gate.number("straight_length", g.straight_length);
  gate.number("link_mass", g.link_mass);
  gate.number("restitution", g.restitution);
  gate.number("restoring_torque_coeff", g.restoring_torque_coeff);
  gate.number("damping_coeff", g.damping_coeff);
  gate.number("coupler_mass", g.coupler_mass);
  gate.number("joint_radius", g.joint_radius);
  gate.optional_number("inertia_override", g.inertia_override);
  // Pivots follow the entrance width unless given explicitly.
  g.pivot_left = {0.0, 0.5 * g.entrance_width};
  g.pivot_right = {0.0, -0.5 * g.entrance_width};
  gate.number("pivot_left_x", g.pivot_left.x);
  gate.number("pivot_left_y", g.pivot_left.y);
  gate.number("pivot_right_x", g.pivot_right.x);
  gate.number("pivot_right_y", g.pivot_right.y);
  gate.integer("polyline_resolution", g.polyline_resolution);
  gate.finish();
  check(gate, [&] { validate(g); });

  Section drone = section("drone");
  DroneSpec& d = c.drone;
  drone.number("total_mass", d.total_mass);
  drone.number("rod_length", d.rod_length);
  drone.number("tip_half_width", d.tip_half_width);
  drone.number("drive_force", d.drive_force);
  drone.number("max_speed", d.max_speed);
  drone.finish();
  check(drone, [&] { validate(d); });

  Section model = section("model");
  if (auto f = model.raw("formula")) {
    if (*f == "consistent") c.formula = FormulaMode::Consistent;
    else if (*f == "printed") c.formula = FormulaMode::Printed;
    else model.fail("formula: expected consistent or printed, got '" + *f + "'");
  }
  model.finish();

  if (Section s = section("scenario"); s.present()) {
    ScenarioSection sc;
    s.number("approach_speed", sc.approach_speed);
    s.angle("approach_angle", sc.approach_angle);
    s.number("lateral_offset", sc.lateral_offset);
    s.gate_mode("gate_mode", sc.gate_mode);
    s.number("time_step", sc.time_step);
    s.number("timeout", sc.timeout);
    s.integer("record_stride", sc.record_stride);
    s.finish();
    c.scenario = sc;
    check(s, [&] { validate(make_scenario(c)); });
  }

  if (Section s = section("sweep"); s.present()) {
    SweepPlan plan;
    read_plan(s, plan);
    if (auto m = s.raw("gate_mode")) {
      if (*m == "passive") plan.gate_mode = SweepGates::Passive;
      else if (*m == "fixed") plan.gate_mode = SweepGates::Fixed;
      else if (*m == "both") plan.gate_mode = SweepGates::Both;
      else s.fail("gate_mode: expected passive, fixed or both, got '" + *m + "'");
    }
    s.finish();
    plan.formula = c.formula;
    check(s, [&] { validate(plan); });
    c.sweep = plan;
  }

  if (Section s = section("optimize"); s.present()) {
    OptimizeSection o;
    if (auto v = s.raw("objective")) check(s, [&] { o.objective = parse_objective(*v); });
    s.number("straight_min", o.straight_min);
    s.number("straight_max", o.straight_max);
    s.angle("taper_min", o.taper_min);
    s.angle("taper_max", o.taper_max);
    s.gate_mode("gate_mode", o.gate_mode);
    read_plan(s, o.plan);
    s.number("reference_speed", o.reference_speed);
    s.integer("grid_straight", o.grid_straight);
    s.integer("grid_taper", o.grid_taper);
    s.integer("budget", o.budget);
    s.finish();
    o.plan.formula = c.formula;
    c.optimize = o;
    check(s, [&] { validate(make_problem(c)); });
  }

  if (Section s = section("port"); s.present()) {
    PortSection p;
    if (auto preset = s.raw("preset")) {
      if (*preset == "nominal") p.config = nominal_preset();
      else if (*preset == "measured") p.config = measured_preset();
      else s.fail("preset: expected nominal or measured, got '" + *preset + "'");
    }
    PortConfig& pc = p.config;
    s.number("rail_landing_time", pc.rail_landing_time);
    s.number("vertical_landing_time", pc.vertical_landing_time);
    if (auto r = s.raw("gate_reset_time"); r && *r != "auto") {
      s.optional_number("gate_reset_time", pc.gate_reset_time);
    }
    s.number("conveyor_speed", pc.conveyor_speed);
    s.number("drone_slot_pitch", pc.drone_slot_pitch);
    if (auto a = s.raw("arrival_policy")) {
      if (*a == "fixed-interval") pc.arrival = ArrivalPolicy::FixedInterval;
      else if (*a == "stochastic") pc.arrival = ArrivalPolicy::Stochastic;
      else s.fail("arrival_policy: expected fixed-interval or stochastic, got '" + *a + "'");
    }
    s.number("arrival_interval", pc.arrival_interval);
    s.number("arrival_rate", pc.arrival_rate);
    s.u64("seed", pc.seed);
    s.integer("drones", p.drones);
    s.finish();
    check(s, [&] { validate(pc); });
    if (p.drones < 1) s.fail("drones must be >= 1");
    c.port = p;
  }

  Section out = section("output");
  if (auto dir = out.raw("dir")) c.output_dir = *dir;
  out.boolean("svg", c.svg);
  out.finish();

  if (!c.scenario && !c.sweep && !c.optimize && !c.port)
    throw Error(ErrorKind::ConfigParse,
                "no action section: need [scenario], [sweep], [optimize] or [port]");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_seed(RunConfig& c, std::uint64_t seed) {
  if (c.sweep) c.sweep->seed = seed;
  if (c.optimize) c.optimize->plan.seed = seed;
  if (c.port) c.port->config.seed = seed;
}

void apply_formula(RunConfig& c, FormulaMode mode) {
  c.formula = mode;
  if (c.sweep) c.sweep->formula = mode;
  if (c.optimize) c.optimize->plan.formula = mode;
}

Scenario make_scenario(const RunConfig& c) {
  if (!c.scenario) throw Error(ErrorKind::ConfigParse, "missing [scenario] section");
  Scenario s;
  s.gate = c.gate;
  s.drone = c.drone;
  s.approach_speed = c.scenario->approach_speed;
  s.approach_angle = c.scenario->approach_angle;
  s.lateral_offset = c.scenario->lateral_offset;
  s.gate_mode = c.scenario->gate_mode;
  s.time_step = c.scenario->time_step;
  s.timeout = c.scenario->timeout;
  s.record_stride = c.scenario->record_stride;
  s.formula = c.formula;
  return s;
}

OptimizationProblem make_problem(const RunConfig& c) {
  if (!c.optimize) throw Error(ErrorKind::ConfigParse, "missing [optimize] section");
  const OptimizeSection& o = *c.optimize;
  OptimizationProblem p;
  p.base = c.gate;
  p.drone = c.drone;
  p.objective = o.objective;
  p.straight_min = o.straight_min;
  p.straight_max = o.straight_max;
  p.taper_min = o.taper_min;
  p.taper_max = o.taper_max;
  p.gate_mode = o.gate_mode;
  p.plan = o.plan;
  p.plan.formula = c.formula;
  p.reference_speed = o.reference_speed;
  p.grid_straight = o.grid_straight;
  p.grid_taper = o.grid_taper;
  p.budget = o.budget;
  return p;
}

namespace {

void write_gate(std::ostream& os, const GateSpec& g) {
  os << "[gate]\n"
     << "entrance_width = " << fmt(g.entrance_width) << "\n"
     << "end_width = " << fmt(g.end_width) << "\n"
     << "depth = " << fmt(g.depth) << "\n"
     << "taper_angle = " << fmt(g.taper_angle) << "\n"
     << "straight_length = " << fmt(g.straight_length) << "\n"
     << "link_mass = " << fmt(g.link_mass) << "\n"
     << "restitution = " << fmt(g.restitution) << "\n"
     << "restoring_torque_coeff = " << fmt(g.restoring_torque_coeff) << "\n"
     << "damping_coeff = " << fmt(g.damping_coeff) << "\n"
     << "coupler_mass = " << fmt(g.coupler_mass) << "\n"
     << "joint_radius = " << fmt(g.joint_radius) << "\n";
  if (g.inertia_override) os << "inertia_override = " << fmt(*g.inertia_override) << "\n";
  os << "pivot_left_x = " << fmt(g.pivot_left.x) << "\n"
     << "pivot_left_y = " << fmt(g.pivot_left.y) << "\n"
     << "pivot_right_x = " << fmt(g.pivot_right.x) << "\n"
     << "pivot_right_y = " << fmt(g.pivot_right.y) << "\n"
     << "polyline_resolution = " << g.polyline_resolution << "\n";
}

void write_range(std::ostream& os, const char* prefix, const Range& r) {
  os << prefix << "_min = " << fmt(r.min) << "\n"
     << prefix << "_max = " << fmt(r.max) << "\n"
     << prefix << "_steps = " << r.steps << "\n";
}

void write_plan(std::ostream& os, const SweepPlan& p) {
  write_range(os, "speed", p.speed);
  write_range(os, "angle", p.angle);
  write_range(os, "offset", p.offset);
  os << "trials_per_cell = " << p.trials_per_cell << "\n"
     << "seed = " << p.seed << "\n"
     << "time_step = " << fmt(p.time_step) << "\n"
     << "timeout = " << fmt(p.timeout) << "\n";
}

}  // namespace

std::string emit_gate_config(const GateSpec& gate) {
  std::ostringstream os;
  write_gate(os, gate);
  return os.str();
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  write_gate(os, c.gate);
  const DroneSpec& d = c.drone;
  os << "\n[drone]\n"
     << "total_mass = " << fmt(d.total_mass) << "\n"
     << "rod_length = " << fmt(d.rod_length) << "\n"
     << "tip_half_width = " << fmt(d.tip_half_width) << "\n"
     << "drive_force = " << fmt(d.drive_force) << "\n"
     << "max_speed = " << fmt(d.max_speed) << "\n";
  os << "\n[model]\nformula = " << formula_name(c.formula) << "\n";
  if (c.scenario) {
    const ScenarioSection& s = *c.scenario;
    os << "\n[scenario]\n"
       << "approach_speed = " << fmt(s.approach_speed) << "\n"
       << "approach_angle = " << fmt(s.approach_angle) << "\n"
       << "lateral_offset = " << fmt(s.lateral_offset) << "\n"
       << "gate_mode = " << to_string(s.gate_mode) << "\n"
       << "time_step = " << fmt(s.time_step) << "\n"
       << "timeout = " << fmt(s.timeout) << "\n"
       << "record_stride = " << s.record_stride << "\n";
  }
  if (c.sweep) {
    os << "\n[sweep]\n";
    write_plan(os, *c.sweep);
    const char* mode = c.sweep->gate_mode == SweepGates::Passive ? "passive"
                       : c.sweep->gate_mode == SweepGates::Fixed ? "fixed"
                                                                 : "both";
    os << "gate_mode = " << mode << "\n";
  }
  if (c.optimize) {
    const OptimizeSection& o = *c.optimize;
    os << "\n[optimize]\n"
       << "objective = " << to_string(o.objective) << "\n"
       << "straight_min = " << fmt(o.straight_min) << "\n"
       << "straight_max = " << fmt(o.straight_max) << "\n"
       << "taper_min = " << fmt(o.taper_min) << "\n"
       << "taper_max = " << fmt(o.taper_max) << "\n"
       << "gate_mode = " << to_string(o.gate_mode) << "\n";
    write_plan(os, o.plan);
    os << "reference_speed = " << fmt(o.reference_speed) << "\n"
       << "grid_straight = " << o.grid_straight << "\n"
       << "grid_taper = " << o.grid_taper << "\n"
       << "budget = " << o.budget << "\n";
  }
  if (c.port) {
    const PortConfig& p = c.port->config;
    os << "\n[port]\n"
       << "rail_landing_time = " << fmt(p.rail_landing_time) << "\n"
       << "vertical_landing_time = " << fmt(p.vertical_landing_time) << "\n"
       << "gate_reset_time = " << (p.gate_reset_time ? fmt(*p.gate_reset_time) : "auto") << "\n"
       << "conveyor_speed = " << fmt(p.conveyor_speed) << "\n"
       << "drone_slot_pitch = " << fmt(p.drone_slot_pitch) << "\n"
       << "arrival_policy = "
       << (p.arrival == ArrivalPolicy::Stochastic ? "stochastic" : "fixed-interval") << "\n"
       << "arrival_interval = " << fmt(p.arrival_interval) << "\n"
       << "arrival_rate = " << fmt(p.arrival_rate) << "\n"
       << "seed = " << p.seed << "\n"
       << "drones = " << c.port->drones << "\n";
  }
  os << "\n[output]\ndir = " << c.output_dir << "\nsvg = " << (c.svg ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace gatesim
