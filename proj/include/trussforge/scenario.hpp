#pragma once

// Scenario files (JSON) -> Experiment.
//
// Field names carry their units. Unknown keys are rejected so typos fail
// loudly instead of silently falling back to defaults.

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "trussforge/runner.hpp"

namespace trussforge {

inline constexpr int kScenarioSchemaVersion = 1;

namespace detail {

using json = nlohmann::json;

inline void allow_keys(const json& j, std::string_view where,
                       std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto k : keys) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + std::string(where));
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline Vec3 vec3(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(std::string(key) + " must be [x, y, z]");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string(key) + " must hold numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

inline void read_vec3(const json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = vec3(j, key);
}

inline double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

inline TrajectoryProgram parse_segments(const json& p, const Scene& scene) {
  allow_keys(p, "program", {"start", "segments"});
  Setpoint start;
  start.position = controlled_point(scene, scene.config.positions);
  if (p.contains("start")) {
    const json& s = p.at("start");
    allow_keys(s, "program.start", {"position_m", "force_n", "grip_n", "opening_m"});
    read_vec3(s, "position_m", start.position);
    read_vec3(s, "force_n", start.force);
    read(s, "grip_n", start.grip);
    read(s, "opening_m", start.opening);
  }
  ProgramBuilder pb(start);
  if (!p.contains("segments") || !p.at("segments").is_array()) {
    throw ConfigError("program.segments must be an array");
  }
  for (const json& seg : p.at("segments")) {
    if (!seg.contains("type")) throw ConfigError("segment without type");
    const SegmentKind kind = segment_kind_from_string(seg.at("type").get<std::string>());
    switch (kind) {
      case SegmentKind::hold:
        allow_keys(seg, "hold segment", {"type", "duration_s"});
        pb.hold(require_number(seg, "duration_s"));
        break;
      case SegmentKind::line: {
        allow_keys(seg, "line segment", {"type", "to_m", "by_m", "duration_s", "smooth"});
        bool smooth = true;
        read(seg, "smooth", smooth);
        Vec3 target = pb.current().position;
        if (seg.contains("to_m")) target = vec3(seg, "to_m");
        if (seg.contains("by_m")) target += vec3(seg, "by_m");
        pb.line_to(target, require_number(seg, "duration_s"), "line", smooth);
        break;
      }
      case SegmentKind::circle:
        allow_keys(seg, "circle segment", {"type", "plane", "radius_m", "period_s"});
        pb.circle(circle_plane_from_string(seg.at("plane").get<std::string>()),
                  require_number(seg, "radius_m"), require_number(seg, "period_s"));
        break;
      case SegmentKind::force_ramp:
        allow_keys(seg, "force_ramp segment", {"type", "force_n", "rate_n_per_s", "hold_s"});
        pb.force_ramp(vec3(seg, "force_n"), require_number(seg, "rate_n_per_s"),
                      require_number(seg, "hold_s"));
        break;
      case SegmentKind::grasp:
        allow_keys(seg, "grasp segment", {"type", "grip_n", "rate_n_per_s", "duration_s"});
        pb.grasp(require_number(seg, "grip_n"), require_number(seg, "rate_n_per_s"),
                 require_number(seg, "duration_s"));
        break;
      case SegmentKind::release:
        allow_keys(seg, "release segment", {"type", "opening_m", "duration_s"});
        pb.release(require_number(seg, "opening_m"), require_number(seg, "duration_s"));
        break;
    }
  }
  return pb.build();
}

}  // namespace detail

/// Sets `dotted.key` in a scenario document. The value is parsed as JSON
/// when possible ("0.5", "true", "[1,0,0]") and kept as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty override key");
  nlohmann::json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("bad override key '" + key + "'");
    if (dot == std::string::npos) {
      nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
      (*node)[part] = v.is_discarded() ? nlohmann::json(value) : v;
      return;
    }
    node = &(*node)[part];
    if (!node->is_object()) *node = nlohmann::json::object();
    pos = dot + 1;
  }
}

inline nlohmann::json load_scenario_document(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario " + path);
  nlohmann::json doc = nlohmann::json::parse(f, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("scenario " + path + " is not valid JSON");
  return doc;
}

struct ScenarioOutputs {
  bool trace = true;
  bool report = true;
  bool plots = true;
};

struct Scenario {
  Experiment experiment;
  ScenarioOutputs outputs;
};

/// Builds an experiment from a parsed scenario document.
inline Scenario parse_scenario(const nlohmann::json& doc) {
  using namespace detail;
  allow_keys(doc, "scenario",
             {"schema_version", "name", "configuration", "geometry", "actuator", "gains",
              "solver", "timing", "environment", "objects", "program", "grasp_required", "seed",
              "outputs"});
  if (!doc.contains("schema_version") || doc.at("schema_version") != kScenarioSchemaVersion) {
    throw ConfigError("schema_version must be " + std::to_string(kScenarioSchemaVersion));
  }
  if (!doc.contains("configuration")) throw ConfigError("missing 'configuration'");
  if (!doc.contains("program")) throw ConfigError("missing 'program'");

  Scenario sc;
  Experiment& e = sc.experiment;
  read(doc, "name", e.name);
  read(doc, "seed", e.seed);
  read(doc, "grasp_required", e.grasp_required);

  if (doc.contains("actuator")) {
    const json& a = doc.at("actuator");
    allow_keys(a, "actuator",
               {"min_length_m", "max_length_m", "max_speed_m_per_s", "dead_zone_pwm",
                "velocity_gain_m_per_s", "force_limit_n", "axial_stiffness_n_per_m",
                "loadcell_noise_sd_n"});
    read(a, "min_length_m", e.actuator.min_length);
    read(a, "max_length_m", e.actuator.max_length);
    read(a, "max_speed_m_per_s", e.actuator.max_speed);
    read(a, "dead_zone_pwm", e.actuator.dead_zone);
    read(a, "velocity_gain_m_per_s", e.actuator.velocity_gain);
    read(a, "force_limit_n", e.actuator.force_limit);
    read(a, "axial_stiffness_n_per_m", e.actuator.axial_stiffness);
    read(a, "loadcell_noise_sd_n", e.actuator.loadcell_noise_sd);
  }
  e.actuator.validate();

  double k_pos = 800.0;
  bool hold_feedback = true;
  if (doc.contains("gains")) {
    const json& g = doc.at("gains");
    allow_keys(g, "gains",
               {"k_p_pwm_per_n", "k_i_pwm_per_n_s", "integrator_limit_pwm", "k_pos_n_per_m",
                "hold_feedback"});
    read(g, "k_p_pwm_per_n", e.gains.k_p);
    read(g, "k_i_pwm_per_n_s", e.gains.k_i);
    read(g, "integrator_limit_pwm", e.gains.integrator_limit);
    read(g, "k_pos_n_per_m", k_pos);
    read(g, "hold_feedback", hold_feedback);
  }
  e.gains.validate();
  if (!(k_pos >= 0.0)) throw ConfigError("k_pos must be >= 0");

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    allow_keys(s, "solver",
               {"max_iterations", "tolerance_m", "force_tolerance_n", "damping", "step_limit_m"});
    read(s, "max_iterations", e.solver.max_iterations);
    read(s, "tolerance_m", e.solver.tolerance);
    read(s, "force_tolerance_n", e.solver.force_tolerance);
    read(s, "damping", e.solver.damping);
    read(s, "step_limit_m", e.solver.step_limit);
  }
  e.solver.validate();

  if (doc.contains("timing")) {
    const json& t = doc.at("timing");
    allow_keys(t, "timing", {"dt_s", "control_divider"});
    read(t, "dt_s", e.dt);
    read(t, "control_divider", e.control_divider);
  }

  GeometryOverrides geo;
  if (doc.contains("geometry")) {
    const json& g = doc.at("geometry");
    allow_keys(g, "geometry",
               {"edge_length_m", "fixture_length_m", "apex_height_m", "node_mass_kg",
                "member_mass_kg"});
    auto opt = [&](const char* k, std::optional<double>& out) {
      if (g.contains(k)) out = require_number(g, k);
    };
    opt("edge_length_m", geo.edge_length);
    opt("fixture_length_m", geo.fixture_length);
    opt("apex_height_m", geo.apex_height);
    opt("node_mass_kg", geo.node_mass);
    opt("member_mass_kg", geo.member_mass);
  }
  const ConfigurationId id = configuration_from_string(doc.at("configuration").get<std::string>());
  e.scene = default_scene(build_configuration(id, geo, e.actuator));
  e.scene.control.k_pos = k_pos;
  e.scene.control.hold_feedback = hold_feedback;

  if (doc.contains("environment")) {
    const json& env = doc.at("environment");
    allow_keys(env, "environment",
               {"contact_stiffness_n_per_m", "node_radius_m", "slip_speed_m_per_s", "walls",
                "supports", "contact_wall"});
    Environment& out = e.scene.env;
    read(env, "contact_stiffness_n_per_m", out.contact_stiffness);
    read(env, "node_radius_m", out.node_radius);
    read(env, "slip_speed_m_per_s", out.slip_speed);
    if (!(out.contact_stiffness > 0.0) || !(out.node_radius > 0.0)) {
      throw ConfigError("contact stiffness and node radius must be positive");
    }
    if (env.contains("walls")) {
      for (const json& w : env.at("walls")) {
        allow_keys(w, "wall", {"point_m", "normal", "stiffness_n_per_m"});
        Wall wall;
        wall.point = vec3(w, "point_m");
        wall.normal = vec3(w, "normal").normalized();
        read(w, "stiffness_n_per_m", wall.stiffness);
        out.walls.push_back(wall);
      }
    }
    if (env.contains("supports")) {
      out.supports.clear();
      for (const json& s : env.at("supports")) {
        allow_keys(s, "support", {"center_m", "half_extents_m"});
        out.supports.push_back({vec3(s, "center_m"), vec3(s, "half_extents_m")});
      }
    }
    if (env.contains("contact_wall")) {
      const json& cw = env.at("contact_wall");
      allow_keys(cw, "contact_wall", {"direction", "stiffness_n_per_m"});
      double k = 5e4;
      read(cw, "stiffness_n_per_m", k);
      add_contact_wall(e.scene, vec3(cw, "direction"), k);
    }
  }

  if (doc.contains("objects")) {
    e.scene.objects.clear();
    for (const json& o : doc.at("objects")) {
      allow_keys(o, "object", {"half_extents_m", "mass_kg", "position_m", "friction"});
      RigidObject obj;
      read_vec3(o, "half_extents_m", obj.half_extents);
      read(o, "mass_kg", obj.mass);
      read_vec3(o, "position_m", obj.position);
      read(o, "friction", obj.friction);
      if (!(obj.mass > 0.0) || !(obj.friction >= 0.0)) {
        throw ConfigError("objects need mass > 0 and friction >= 0");
      }
      e.scene.objects.push_back(obj);
    }
    if (e.scene.grasp && e.scene.objects.empty()) throw ConfigError("grasp scene needs an object");
  }

  const json& p = doc.at("program");
  if (p.contains("builder")) {
    const std::string builder = p.at("builder").get<std::string>();
    if (builder == "force_ramp") {
      allow_keys(p, "program", {"builder", "target_n", "rate_n_per_s", "hold_s", "direction"});
      Vec3 dir = Vec3::UnitX();
      read_vec3(p, "direction", dir);
      double rate = 10.0, hold = 10.0;
      read(p, "rate_n_per_s", rate);
      read(p, "hold_s", hold);
      e.program = force_ramp_program(require_number(p, "target_n"), rate, hold, dir,
                                     controlled_point(e.scene, e.scene.config.positions));
    } else if (builder == "double_tet_suite") {
      allow_keys(p, "program", {"builder", "trajectory", "grip_n"});
      double grip = 30.0;
      read(p, "grip_n", grip);
      e.trajectory = p.at("trajectory").get<std::string>();
      e.program = double_tet_program(e.scene, e.trajectory, grip, e.actuator);
    } else if (builder == "octahedron_two_box") {
      allow_keys(p, "program", {"builder", "grip_n"});
      double grip = 12.0;
      read(p, "grip_n", grip);
      e.program = octahedron_two_box_program(e.scene, grip);
    } else {
      throw ConfigError("unknown program builder '" + builder + "'");
    }
  } else {
    e.program = parse_segments(p, e.scene);
  }

  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    allow_keys(o, "outputs", {"trace", "report", "plots"});
    read(o, "trace", sc.outputs.trace);
    read(o, "report", sc.outputs.report);
    read(o, "plots", sc.outputs.plots);
  }
  // Catch world-level problems (ranges, grasp indices) at load time.
  make_world(e).validate();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(load_scenario_document(path));
}

}  // namespace trussforge
