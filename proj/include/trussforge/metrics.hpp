#pragma once

// Run metrics. Everything here is computed from a Trace, so the numbers in
// a report can be recomputed offline from the CSV it was written with.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trussforge/contact.hpp"
#include "trussforge/trace.hpp"

namespace trussforge {

/// RMS of desired - actual over the rows where window is nonzero.
inline double rmse(std::span<const double> desired, std::span<const double> actual,
                   std::span<const double> window) {
  if (desired.size() != actual.size() || desired.size() != window.size()) {
    throw DimensionMismatch("rmse: series lengths differ");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    if (window[i] == 0.0) continue;
    const double d = desired[i] - actual[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw EmptyWindow("rmse window selects no samples");
  return std::sqrt(sum / static_cast<double>(n));
}

inline double rmse(std::span<const double> desired, std::span<const double> actual) {
  std::vector<double> all(desired.size(), 1.0);
  return rmse(desired, actual, all);
}

struct GraspEvent {
  double time;
  GraspStatus status;
};

struct RunReport {
  std::string name;
  std::uint64_t seed = 0;
  double duration = 0.0;           // simulated seconds
  std::size_t samples = 0;
  std::optional<Vec3> position_rmse;      // m per axis, position window
  std::optional<double> force_rmse;       // N, force window
  std::optional<double> holding_error;    // %, mean |error| / mean target over hold window
  std::optional<double> max_overshoot;    // %, over the force window
  std::vector<GraspEvent> grasp_timeline;
  bool grasp_dropped = false;
  bool carry_status_ok = true;     // status stayed grasped in every carry row
};

/// Metrics from a trace with the standard columns.
inline RunReport compute_report(const Trace& t) {
  RunReport r;
  r.samples = t.rows();
  if (t.rows() == 0) return r;
  r.duration = t.at(t.rows() - 1, "time");

  const auto pw = t.series("pos_window");
  if (std::any_of(pw.begin(), pw.end(), [](double v) { return v != 0.0; })) {
    Vec3 e;
    const char* axes[3] = {"x", "y", "z"};
    for (int k = 0; k < 3; ++k) {
      e[k] = rmse(t.series(std::string("ref_") + axes[k]), t.series(std::string("act_") + axes[k]),
                  pw);
    }
    r.position_rmse = e;
  }

  const auto ref = t.series("force_ref");
  const auto act = t.series("force_act");
  const auto fw = t.series("force_window");
  if (std::any_of(fw.begin(), fw.end(), [](double v) { return v != 0.0; })) {
    r.force_rmse = rmse(ref, act, fw);
    double peak_ref = 0.0, peak_act = -INFINITY;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (fw[i] == 0.0) continue;
      peak_ref = std::max(peak_ref, ref[i]);
      peak_act = std::max(peak_act, act[i]);
    }
    if (peak_ref > 0.0) r.max_overshoot = 100.0 * std::max(0.0, peak_act - peak_ref) / peak_ref;
  }

  const auto hw = t.series("hold_window");
  double err = 0.0, target = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < hw.size(); ++i) {
    if (hw[i] == 0.0) continue;
    err += std::abs(act[i] - ref[i]);
    target += std::abs(ref[i]);
    ++n;
  }
  if (n > 0 && target > 0.0) r.holding_error = 100.0 * err / target;

  const auto status = t.series("grasp_status");
  const auto carry = t.series("carry");
  const auto time = t.series("time");
  for (std::size_t i = 0; i < status.size(); ++i) {
    const auto s = static_cast<GraspStatus>(static_cast<int>(status[i]));
    if (r.grasp_timeline.empty() || r.grasp_timeline.back().status != s) {
      r.grasp_timeline.push_back({time[i], s});
    }
    if (s == GraspStatus::dropped) r.grasp_dropped = true;
    if (carry[i] != 0.0 && s != GraspStatus::grasped) r.carry_status_ok = false;
  }
  return r;
}

}  // namespace trussforge
