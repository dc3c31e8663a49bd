// trussforge: run scenarios, sweep parameter grids, validate scenario
// files, recompute metrics from a trace.
//
// Exit codes: 0 ok, 2 configuration error, 3 simulation diverged,
// 4 grasp dropped (scenarios with grasp_required).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <spdlog/spdlog.h>

#include "trussforge/trussforge.hpp"

namespace fs = std::filesystem;
using namespace trussforge;

namespace {

struct CommonArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool deterministic = false;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_out = true) {
  cmd->add_option("--scenario", a.scenario, "scenario JSON file")->required()->check(
      CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "override the scenario seed");
  if (with_out) cmd->add_option("--out", a.out, "output directory");
  cmd->add_flag("--deterministic", a.deterministic, "zero loadcell noise");
  cmd->add_option("--set", a.set, "override a scenario field, key.path=value");
}

nlohmann::json load_with_overrides(const CommonArgs& a) {
  nlohmann::json doc = load_scenario_document(a.scenario);
  for (const std::string& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(doc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return doc;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

int cmd_run(const CommonArgs& a) {
  Scenario sc = parse_scenario(load_with_overrides(a));
  Experiment& e = sc.experiment;
  if (a.seed) e.seed = *a.seed;
  if (a.deterministic) e.actuator.loadcell_noise_sd = 0.0;
  spdlog::info("running '{}' seed {} ({:.1f} s simulated)", e.name, e.seed, e.program.duration());

  const RunResult r = simulate(e);
  fs::create_directories(a.out);
  if (sc.outputs.trace) r.trace.write_csv((fs::path(a.out) / "trace.csv").string());
  const std::string report = report_text(r.report, e.trajectory, r.exit_code, r.failure);
  if (sc.outputs.report) write_text(fs::path(a.out) / "report.json", report);
  if (sc.outputs.plots && r.trace.rows() > 0) write_plots(r.trace, a.out);
  std::cout << report;
  if (r.exit_code != kExitOk) spdlog::error("{}", r.failure);
  return r.exit_code;
}

int cmd_sweep(const CommonArgs& a, const std::vector<std::string>& grid, int repeats,
              unsigned workers) {
  const nlohmann::json doc = load_with_overrides(a);
  parse_scenario(doc);  // fail fast on a broken base scenario

  std::vector<GridAxis> axes;
  for (const std::string& g : grid) axes.push_back(parse_grid_axis(g));
  if (axes.empty() && doc.at("program").value("builder", "") == "double_tet_suite") {
    axes.push_back({"program.trajectory", double_tet_trajectories()});
  }
  SweepOptions opts;
  opts.repeats = repeats;
  opts.workers = workers;
  opts.deterministic = a.deterministic;
  opts.seed = a.seed.value_or(doc.value("seed", std::uint64_t{1}));
  const auto cells = grid_cells(axes);
  spdlog::info("sweep: {} cells x {} repeats", cells.size(), repeats);

  const SweepTable t = sweep(doc, cells, opts);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "summary.csv", sweep_csv(t));
  write_text(fs::path(a.out) / "summary.md", sweep_markdown(t));
  write_text(fs::path(a.out) / "summary.json", sweep_json(t).dump(2) + "\n");
  std::cout << sweep_markdown(t);

  int code = kExitOk;
  for (const SweepRun& r : t.runs) {
    if (r.exit_code != kExitOk) {
      spdlog::warn("cell '{}' seed {}: exit {} ({})", t.rows[r.cell].label, r.seed, r.exit_code,
                   r.failure);
      code = std::max(code, r.exit_code);
    }
  }
  return code;
}

int cmd_validate(const CommonArgs& a) {
  const Scenario sc = parse_scenario(load_with_overrides(a));
  const World w = make_world(sc.experiment);
  make_initial_state(w, sc.experiment.seed);
  std::cout << sc.experiment.name << ": ok (" << to_string(sc.experiment.scene.config.id) << ", "
            << w.topology.node_count() << " nodes, " << w.topology.member_count() << " members, "
            << sc.experiment.program.segments().size() << " segments, "
            << sc.experiment.program.duration() << " s)\n";
  return kExitOk;
}

int cmd_report(const std::string& trace_path, const std::string& name, const std::string& traj,
               const std::string& out) {
  const Trace t = Trace::read_csv(trace_path);
  RunReport r = compute_report(t);
  r.name = name;
  const std::string text = report_text(r, traj);
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "report.json", text);
  }
  std::cout << text;
  return kExitOk;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("TRUSSFORGE_LOG")) {
    const auto level = spdlog::level::from_str(lvl);
    // from_str maps unknown names to "off"; only honour that when asked for.
    if (level != spdlog::level::off || std::string(lvl) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"truss robot quasi-static simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, validate_args;
  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_args);

  auto* sw = app.add_subcommand("sweep", "run a parameter grid with repeats");
  add_common(sw, sweep_args);
  std::vector<std::string> grid;
  int repeats = 3;
  unsigned workers = 0;
  sw->add_option("--grid", grid, "grid axis, key=v1,v2,...");
  sw->add_option("--repeats", repeats, "runs per cell")->check(CLI::PositiveNumber);
  sw->add_option("--workers", workers, "worker threads (0 = all cores)");

  auto* val = app.add_subcommand("validate", "check a scenario without running it");
  add_common(val, validate_args, false);

  auto* rep = app.add_subcommand("report", "recompute metrics from a trace CSV");
  std::string trace_path, name = "trace", traj, rep_out;
  rep->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--name", name, "report name");
  rep->add_option("--trajectory", traj, "suite label, adds the hardware reference block");
  rep->add_option("--out", rep_out, "write report.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sw) return cmd_sweep(sweep_args, grid, repeats, workers);
    if (*val) return cmd_validate(validate_args);
    if (*rep) return cmd_report(trace_path, name, traj, rep_out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
