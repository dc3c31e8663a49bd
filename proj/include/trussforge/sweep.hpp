#pragma once

// Parameter sweeps: every grid cell is run `repeats` times with distinct
// seeds, each run an isolated simulation on a worker thread. Results are
// gathered per run slot and aggregated afterwards on the calling thread.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "trussforge/report.hpp"
#include "trussforge/runner.hpp"
#include "trussforge/scenario.hpp"

namespace trussforge {

/// One grid axis: dotted scenario key and the values it takes.
struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

/// "key=v1,v2,v3". A value list starting with '[' is read as a JSON array,
/// which lets values contain commas.
inline GridAxis parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("grid axis must look like key=v1,v2");
  GridAxis g;
  g.key = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  if (!rest.empty() && rest.front() == '[') {
    const auto arr = nlohmann::json::parse(rest, nullptr, false);
    if (!arr.is_array()) throw ConfigError("bad JSON value list for " + g.key);
    for (const auto& v : arr) g.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  } else {
    std::stringstream ss(rest);
    std::string v;
    while (std::getline(ss, v, ',')) {
      if (!v.empty()) g.values.push_back(v);
    }
  }
  if (g.values.empty()) throw ConfigError("grid axis " + g.key + " has no values");
  return g;
}

struct SweepCell {
  std::string label;
  std::vector<std::pair<std::string, std::string>> overrides;
};

/// Cartesian product of the axes, first axis slowest.
inline std::vector<SweepCell> grid_cells(const std::vector<GridAxis>& axes) {
  std::vector<SweepCell> cells{{}};
  for (const GridAxis& a : axes) {
    std::vector<SweepCell> next;
    for (const SweepCell& c : cells) {
      for (const std::string& v : a.values) {
        SweepCell n = c;
        n.label += (n.label.empty() ? "" : " ") + (axes.size() == 1 ? v : a.key + "=" + v);
        n.overrides.emplace_back(a.key, v);
        next.push_back(std::move(n));
      }
    }
    cells = std::move(next);
  }
  if (cells.size() == 1 && cells[0].label.empty()) cells[0].label = "base";
  return cells;
}

struct SweepOptions {
  int repeats = 3;
  std::uint64_t seed = 1;        // repeat r runs with seed + r
  bool deterministic = false;
  unsigned workers = 0;          // 0 = hardware concurrency
};

struct SweepRun {
  std::size_t cell = 0;
  std::uint64_t seed = 0;
  RunReport report;
  std::string trajectory;
  int exit_code = kExitOk;
  std::string failure;
};

struct SweepRow {
  std::string label;
  std::string trajectory;
  int runs = 0;
  int failures = 0;
  std::optional<Vec3> position_rmse;  // mean over runs that produced one
  std::optional<double> force_rmse;
  std::optional<double> holding_error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepRun> runs;
};

/// Runs one cell repeat. Never throws: configuration problems become exit 2.
inline SweepRun run_cell(const nlohmann::json& base, const SweepCell& cell, std::uint64_t seed,
                         bool deterministic) {
  SweepRun out;
  out.seed = seed;
  try {
    nlohmann::json doc = base;
    for (const auto& [k, v] : cell.overrides) apply_override(doc, k, v);
    Scenario sc = parse_scenario(doc);
    sc.experiment.seed = seed;
    if (deterministic) sc.experiment.actuator.loadcell_noise_sd = 0.0;
    const RunResult r = simulate(sc.experiment);
    out.report = r.report;
    out.trajectory = sc.experiment.trajectory;
    out.exit_code = r.exit_code;
    out.failure = r.failure;
  } catch (const std::exception& e) {
    out.exit_code = kExitConfig;
    out.failure = e.what();
    out.report.seed = seed;
  }
  return out;
}

inline SweepTable aggregate(const std::vector<SweepCell>& cells, std::vector<SweepRun> runs) {
  SweepTable t;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.label = cells[c].label;
    Vec3 pos = Vec3::Zero();
    double force = 0.0, hold = 0.0;
    int np = 0, nf = 0, nh = 0;
    for (const SweepRun& r : runs) {
      if (r.cell != c) continue;
      ++row.runs;
      if (!r.trajectory.empty()) row.trajectory = r.trajectory;
      if (r.exit_code != kExitOk) ++row.failures;
      if (r.report.position_rmse) pos += *r.report.position_rmse, ++np;
      if (r.report.force_rmse) force += *r.report.force_rmse, ++nf;
      if (r.report.holding_error) hold += *r.report.holding_error, ++nh;
    }
    if (np) row.position_rmse = pos / np;
    if (nf) row.force_rmse = force / nf;
    if (nh) row.holding_error = hold / nh;
    t.rows.push_back(row);
  }
  t.runs = std::move(runs);
  return t;
}

inline SweepTable sweep(const nlohmann::json& base, const std::vector<SweepCell>& cells,
                        const SweepOptions& opts) {
  if (cells.empty()) throw ConfigError("sweep grid is empty");
  if (opts.repeats < 1) throw ConfigError("repeats must be >= 1");
  const std::size_t total = cells.size() * static_cast<std::size_t>(opts.repeats);
  std::vector<SweepRun> runs(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t c = i / static_cast<std::size_t>(opts.repeats);
      const std::uint64_t r = i % static_cast<std::size_t>(opts.repeats);
      runs[i] = run_cell(base, cells[c], opts.seed + r, opts.deterministic);
      runs[i].cell = c;
    }
  };
  unsigned n = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, total));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return aggregate(cells, std::move(runs));
}

namespace detail {

inline std::string fixed(const std::optional<double>& v, int digits) {
  if (!v) return "";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << *v;
  return os.str();
}

}  // namespace detail

/// Table layout: one row per cell, per-axis position RMSE then force RMSE.
inline std::string sweep_csv(const SweepTable& t) {
  std::ostringstream os;
  os << "cell,runs,failures,x_rmse_m,y_rmse_m,z_rmse_m,force_rmse_n,holding_error_pct,"
        "hw_x_m,hw_y_m,hw_z_m,hw_force_n\n";
  for (const SweepRow& r : t.rows) {
    auto axis = [&](int k) {
      return r.position_rmse ? std::optional<double>((*r.position_rmse)[k]) : std::nullopt;
    };
    os << r.label << ',' << r.runs << ',' << r.failures << ',' << detail::fixed(axis(0), 6) << ','
       << detail::fixed(axis(1), 6) << ',' << detail::fixed(axis(2), 6) << ','
       << detail::fixed(r.force_rmse, 4) << ',' << detail::fixed(r.holding_error, 3);
    if (const HardwareReference* h = hardware_reference(r.trajectory)) {
      os << ',' << h->x << ',' << h->y << ',' << h->z << ',' << h->force;
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string sweep_markdown(const SweepTable& t) {
  std::ostringstream os;
  const bool hw = std::any_of(t.rows.begin(), t.rows.end(),
                              [](const SweepRow& r) { return hardware_reference(r.trajectory); });
  os << "| Cell | runs | failed | x (m) | y (m) | z (m) | F (N) |";
  if (hw) os << " " << kHardwareLabel << " x / y / z (m), F (N) |";
  os << "\n|---|---|---|---|---|---|---|" << (hw ? "---|" : "") << "\n";
  for (const SweepRow& r : t.rows) {
    auto axis = [&](int k) {
      return r.position_rmse ? std::optional<double>((*r.position_rmse)[k]) : std::nullopt;
    };
    os << "| " << r.label << " | " << r.runs << " | " << r.failures << " | "
       << detail::fixed(axis(0), 4) << " | " << detail::fixed(axis(1), 4) << " | "
       << detail::fixed(axis(2), 4) << " | " << detail::fixed(r.force_rmse, 2) << " |";
    if (hw) {
      if (const HardwareReference* h = hardware_reference(r.trajectory)) {
        os << ' ' << detail::fixed(h->x, 4) << " / " << detail::fixed(h->y, 4) << " / "
           << detail::fixed(h->z, 4) << ", " << detail::fixed(h->force, 2) << " |";
      } else {
        os << " |";
      }
    }
    os << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json sweep_json(const SweepTable& t) {
  using oj = nlohmann::ordered_json;
  oj rows = oj::array();
  for (const SweepRow& r : t.rows) {
    oj row;
    row["cell"] = r.label;
    row["runs"] = r.runs;
    row["failures"] = r.failures;
    row["position_rmse_m"] =
        r.position_rmse ? oj{{"x", r.position_rmse->x()}, {"y", r.position_rmse->y()},
                             {"z", r.position_rmse->z()}}
                        : oj(nullptr);
    row["force_rmse_n"] = r.force_rmse ? oj(*r.force_rmse) : oj(nullptr);
    row["holding_error_pct"] = r.holding_error ? oj(*r.holding_error) : oj(nullptr);
    if (const HardwareReference* h = hardware_reference(r.trajectory)) {
      row["reference"] = {{"label", kHardwareLabel},
                          {"position_rmse_m", {{"x", h->x}, {"y", h->y}, {"z", h->z}}},
                          {"force_rmse_n", h->force}};
    }
    rows.push_back(row);
  }
  oj runs = oj::array();
  for (const SweepRun& r : t.runs) {
    oj run = report_json(r.report, r.trajectory, r.exit_code, r.failure);
    run["cell"] = t.rows.at(r.cell).label;
    runs.push_back(run);
  }
  return {{"rows", rows}, {"runs", runs}};
}

}  // namespace trussforge
