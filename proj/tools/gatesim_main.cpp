#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "gatesim/config.hpp"
#include "gatesim/error.hpp"
#include "gatesim/svg.hpp"

namespace fs = std::filesystem;
using namespace gatesim;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfigError = 2, kWriteError = 3 };

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::FileWrite, "cannot create '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) const {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw Error(ErrorKind::FileWrite, "cannot write '" + path.string() + "'");
  }

 private:
  fs::path dir_;
};

RunConfig load(const Options& opt) {
  RunConfig c = load_config(opt.config);
  if (opt.seed) apply_seed(c, *opt.seed);
  if (opt.strict) apply_formula(c, FormulaMode::Printed);
  if (!opt.out.empty()) c.output_dir = opt.out;
  return c;
}

void cmd_simulate(const RunConfig& c) {
  const Scenario sc = make_scenario(c);
  const Writer out(c.output_dir);
  const EntryOutcome r = run_entry(sc);
  out.write("effective_config.ini", emit_config(c));
  out.write("trajectory.csv", trajectory_csv(r));
  out.write("collisions.csv", collisions_csv(r));
  if (c.svg) out.write("trajectory.svg", trajectory_svg(r, sc.gate));

  char buf[256];
  std::string summary = "result: " + std::string(to_string(r.result)) + "\n";
  if (r.landing_time) std::snprintf(buf, sizeof buf, "landing_time_s: %.4f\n", *r.landing_time);
  else std::snprintf(buf, sizeof buf, "landing_time_s: n/a\n");
  summary += buf;
  std::snprintf(buf, sizeof buf, "collisions: %zu\nmax_gate_deflection_deg: %.3f\n",
                r.collisions.size(), rad_to_deg(r.max_gate_deflection));
  summary += buf;
  out.write("summary.txt", summary);
  std::cout << summary;
}

void cmd_sweep(const RunConfig& c) {
  if (!c.sweep) throw Error(ErrorKind::ConfigParse, "missing [sweep] section");
  const SweepPlan& plan = *c.sweep;
  const Writer out(c.output_dir);
  out.write("effective_config.ini", emit_config(c));

  std::vector<GateMode> modes;
  if (plan.gate_mode != SweepGates::Fixed) modes.push_back(GateMode::Passive);
  if (plan.gate_mode != SweepGates::Passive) modes.push_back(GateMode::Fixed);

  std::vector<EnvelopeMap> maps;
  for (GateMode m : modes) {
    EnvelopeMap map = run_sweep(plan, c.gate, c.drone, m);
    const std::string tag(to_string(m));
    const FailureRateBins bins = bin_failures(map);
    out.write("envelope_" + tag + ".csv", envelope_csv(map));
    out.write("trials_" + tag + ".csv", trials_csv(map));
    out.write("failure_bins_" + tag + ".csv", failure_bins_csv(bins));
    if (c.svg) {
      out.write("envelope_" + tag + ".svg", envelope_svg(map));
      out.write("failure_bins_" + tag + ".svg", failure_bins_svg(bins));
    }
    int ok = 0, total = 0;
    for (const auto& cell : map.cells) {
      ok += cell.counts[0];
      total += cell.trials;
    }
    const auto mta = max_tolerated_angle(map);
    std::printf("%s: success %d/%d, max_tolerated_angle_deg: %s\n", tag.c_str(), ok, total,
                mta ? std::to_string(rad_to_deg(*mta)).c_str() : "none");
    maps.push_back(std::move(map));
  }
  if (maps.size() == 2) {
    const double gain = tolerance_gain(maps[0], maps[1]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "tolerance_gain_deg: %.6f\n", rad_to_deg(gain));
    out.write("tolerance_gain.txt", buf);
    std::cout << buf;
  }
}

void cmd_optimize(const RunConfig& c) {
  const OptimizationProblem problem = make_problem(c);
  const Writer out(c.output_dir);
  out.write("effective_config.ini", emit_config(c));
  const OptimizationResult r = optimize(problem);
  out.write("optimize_trace.csv", trace_csv(r, problem.objective));
  const GateSpec best = apply_params(problem.base, r.best);
  out.write("best_gate.ini", emit_gate_config(best));
  std::printf("evaluations: %zu\nconverged: %s\nbest_straight_length_m: %.6f\n"
              "best_taper_angle_deg: %.4f\nbest_objective: %.9g\n",
              r.trace.size(), r.converged ? "true" : "false", r.best.straight_length,
              rad_to_deg(r.best.taper_angle), r.best_objective);
}

void cmd_throughput(const RunConfig& c) {
  if (!c.port) throw Error(ErrorKind::ConfigParse, "missing [port] section");
  const Writer out(c.output_dir);
  out.write("effective_config.ini", emit_config(c));
  const PortConfig port = resolve_reset_time(c.port->config, c.gate, c.drone);
  const ThroughputReport r = simulate_stream(port, c.port->drones);
  const std::string text = report_text(r, port);
  out.write("events.csv", events_csv(r));
  out.write("throughput.txt", text);
  std::cout << text;
}

int run(void (*cmd)(const RunConfig&), const Options& opt) {
  try {
    cmd(load(opt));
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ConfigParse:
      case ErrorKind::InvalidSpec:
      case ErrorKind::InvalidInput:
      case ErrorKind::InfeasibleGeometry: return kConfigError;
      case ErrorKind::FileWrite: return kWriteError;
      default: return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("GATESIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"Passive entry gate simulator"};
  app.require_subcommand(1);
  Options opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file")->required();
    sub->add_option("--out", opt.out, "output directory (overrides [output] dir)");
    sub->add_option("--seed", opt.seed, "override every seed in the config");
    sub->add_flag("--strict-paper-formulas", opt.strict,
                  "use the printed lever-arm forms in the collision model");
  };
  struct Cmd {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&);
  };
  const Cmd cmds[] = {
      {"simulate", "run one entry trial", cmd_simulate},
      {"sweep", "sweep speed, angle and offset", cmd_sweep},
      {"optimize", "search gate geometry", cmd_optimize},
      {"throughput", "landing stream model", cmd_throughput},
  };
  for (const auto& c : cmds) add_common(app.add_subcommand(c.name, c.help));

  CLI11_PARSE(app, argc, argv);
  for (const auto& c : cmds)
    if (app.got_subcommand(c.name)) return run(c.fn, opt);
  return kFailure;
}
