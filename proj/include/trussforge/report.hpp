#pragma once

// RunReport <-> JSON. Key order is fixed and no wall-clock data goes in, so
// the same run always serialises to the same bytes.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "trussforge/metrics.hpp"

namespace trussforge {

/// Measured RMSE of the physical double-tetrahedron runs, kept next to the
/// simulated numbers for scale. Not a target.
struct HardwareReference {
  const char* trajectory;
  double x, y, z, force;
};

inline constexpr HardwareReference kHardwareReference[] = {
    {"x-axis", 0.0321, 0.0049, 0.0197, 7.30},  {"y-axis", 0.0143, 0.0421, 0.0295, 13.87},
    {"z-axis", 0.0118, 0.0051, 0.1372, 5.67},  {"xy", 0.0244, 0.0236, 0.0095, 5.05},
    {"yz", 0.0100, 0.0181, 0.0824, 10.35},     {"xz", 0.0188, 0.0093, 0.0648, 9.18},
    {"oblique", 0.0109, 0.0173, 0.0689, 9.15},
};

inline const HardwareReference* hardware_reference(std::string_view trajectory) {
  for (const auto& h : kHardwareReference) {
    if (trajectory == h.trajectory) return &h;
  }
  return nullptr;
}

inline const char* kHardwareLabel = "hardware (paper)";

inline nlohmann::ordered_json report_json(const RunReport& r, std::string_view trajectory = {},
                                          int exit_code = 0, const std::string& failure = {}) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["exit_code"] = exit_code;
  j["failure"] = failure.empty() ? oj(nullptr) : oj(failure);
  j["duration_s"] = r.duration;
  j["samples"] = r.samples;
  if (r.position_rmse) {
    j["position_rmse_m"] = {{"x", r.position_rmse->x()},
                            {"y", r.position_rmse->y()},
                            {"z", r.position_rmse->z()}};
  } else {
    j["position_rmse_m"] = nullptr;
  }
  j["force_rmse_n"] = r.force_rmse ? oj(*r.force_rmse) : oj(nullptr);
  j["holding_error_pct"] = r.holding_error ? oj(*r.holding_error) : oj(nullptr);
  j["max_overshoot_pct"] = r.max_overshoot ? oj(*r.max_overshoot) : oj(nullptr);
  oj timeline = oj::array();
  for (const GraspEvent& e : r.grasp_timeline) {
    timeline.push_back({{"time_s", e.time}, {"status", to_string(e.status)}});
  }
  j["grasp_timeline"] = timeline;
  j["grasp_dropped"] = r.grasp_dropped;
  j["carry_status_ok"] = r.carry_status_ok;
  if (const HardwareReference* h = hardware_reference(trajectory)) {
    j["trajectory"] = h->trajectory;
    j["reference"] = {{"label", kHardwareLabel},
                      {"position_rmse_m", {{"x", h->x}, {"y", h->y}, {"z", h->z}}},
                      {"force_rmse_n", h->force}};
  }
  return j;
}

inline std::string report_text(const RunReport& r, std::string_view trajectory = {},
                               int exit_code = 0, const std::string& failure = {}) {
  return report_json(r, trajectory, exit_code, failure).dump(2) + "\n";
}

}  // namespace trussforge
