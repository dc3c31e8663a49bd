#pragma once

// Reference experiments: a configuration plus everything needed to run it.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trussforge/configurations.hpp"
#include "trussforge/contact.hpp"
#include "trussforge/program.hpp"

namespace trussforge {

enum class ControlMode { member, node, grasp };

inline const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::member: return "member";
    case ControlMode::node: return "node";
    case ControlMode::grasp: return "grasp";
  }
  return "?";
}

inline ControlMode control_mode_from_string(std::string_view s) {
  for (auto m : {ControlMode::member, ControlMode::node, ControlMode::grasp}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown control mode '" + std::string(s) + "'");
}

/// How program samples become commands.
///
/// member: lambda_cmd = sign * force.x on one member (sign -1 pushes).
/// node:   one target node, P_des = position, F_des = force.
/// grasp:  the grasp pair straddles `position` along the grasp axis and each
///         node presses toward it with `grip`.
struct ControlSettings {
  ControlMode mode = ControlMode::node;
  MemberId member{};
  double member_sign = -1.0;
  NodeId node{};
  double k_pos = 800.0;        // N/m
  bool hold_feedback = true;   // non-target nodes hold their start positions
};

struct Scene {
  Configuration config;
  Environment env;
  std::vector<RigidObject> objects;
  std::optional<GraspState> grasp;
  ControlSettings control;
};

// Double-tetrahedron payload: 0.2 m cube, 931 g, silicone pads.
inline constexpr double kCubeMass = 0.931;
inline constexpr double kCubeFriction = 0.8;
// Octahedron payloads: two 0.2 m boxes of 309 g.
inline constexpr double kBoxMass = 0.309;
inline constexpr double kPileAY = -0.25;
inline constexpr double kPileBY = 0.25;
inline constexpr double kPileATop = 0.5;
inline constexpr double kPileBTop = 0.37;

/// Scene with the configuration's default objects and control mode.
inline Scene default_scene(const Configuration& config) {
  Scene s;
  s.config = config;
  switch (config.id) {
    case ConfigurationId::single_member:
      s.control.mode = ControlMode::member;
      s.control.member = member_id(0);
      break;
    case ConfigurationId::tetrahedron:
    case ConfigurationId::pyramid:
      s.control.mode = ControlMode::node;
      s.control.node = *config.tip;
      break;
    case ConfigurationId::double_tetrahedron: {
      const auto [a, b] = *config.grasp_nodes;
      const Vec3 mid = 0.5 * (node_block(config.positions, a) + node_block(config.positions, b));
      RigidObject cube;
      cube.mass = kCubeMass;
      cube.friction = kCubeFriction;
      cube.position = mid;
      s.objects.push_back(cube);
      const double post_h = 0.5 * (mid.z() - cube.half_extents.z());
      s.env.supports.push_back({Vec3(mid.x(), mid.y(), post_h), Vec3(0.03, 0.03, post_h)});
      break;
    }
    case ConfigurationId::octahedron_internal: {
      RigidObject box;
      box.mass = kBoxMass;
      box.friction = kCubeFriction;
      box.position = Vec3(0, kPileAY, kPileATop + 0.3);  // box 1, on top
      s.objects.push_back(box);
      box.position = Vec3(0, kPileAY, kPileATop + 0.1);  // box 2, underneath
      s.objects.push_back(box);
      s.env.supports.push_back(
          {Vec3(0, kPileAY, 0.5 * kPileATop), Vec3(0.12, 0.12, 0.5 * kPileATop)});
      s.env.supports.push_back(
          {Vec3(0, kPileBY, 0.5 * kPileBTop), Vec3(0.12, 0.12, 0.5 * kPileBTop)});
      break;
    }
  }
  if (config.grasp_nodes) {
    GraspState g;
    g.node_a = (*config.grasp_nodes)[0];
    g.node_b = (*config.grasp_nodes)[1];
    g.axis = config.grasp_axis;
    g.object = 0;
    s.grasp = g;
    s.control.mode = ControlMode::grasp;
  }
  return s;
}

/// Places a wall just touching the target node's sphere on the side it
/// will push toward.
inline void add_contact_wall(Scene& s, const Vec3& direction, double stiffness) {
  if (s.control.mode != ControlMode::node) throw ConfigError("contact wall needs node control");
  const Vec3 d = direction.normalized();
  const Vec3 tip = node_block(s.config.positions, s.control.node);
  s.env.walls.push_back({tip + s.env.node_radius * d, -d, stiffness});
}

/// Where the grasp pair sits for a grasp centre and opening.
inline std::array<Vec3, 2> grasp_node_targets(const Scene& s, const Vec3& center, double opening) {
  const RigidObject& obj = s.objects.at(s.grasp ? s.grasp->object : 0);
  const Vec3 axis = s.config.grasp_axis;
  const double reach = support_extent(obj.half_extents, axis) + s.env.node_radius + opening;
  return {center - reach * axis, center + reach * axis};
}

/// The controlled point of a scene at positions P.
inline Vec3 controlled_point(const Scene& s, const VecX& positions) {
  switch (s.control.mode) {
    case ControlMode::node: return node_block(positions, s.control.node);
    case ControlMode::grasp: {
      const auto [a, b] = *s.config.grasp_nodes;
      return 0.5 * (node_block(positions, a) + node_block(positions, b));
    }
    case ControlMode::member: break;
  }
  return Vec3::Zero();
}

/// Rigid-member reachability: every member touching a commanded node stays
/// inside the actuator range and the node stays 0.2 m above the ground.
inline ReachableFn workspace(const Scene& s, const ActuatorModel& limits) {
  return [s, limits](const Vec3& point) {
    VecX p = s.config.positions;
    std::vector<NodeId> moved;
    if (s.control.mode == ControlMode::grasp) {
      const auto t = grasp_node_targets(s, point, 0.0);
      const auto [a, b] = *s.config.grasp_nodes;
      node_block(p, a) = t[0];
      node_block(p, b) = t[1];
      moved = {a, b};
    } else if (s.control.mode == ControlMode::node) {
      node_block(p, s.control.node) = point;
      moved = {s.control.node};
    }
    for (NodeId n : moved) {
      if (node_block(p, n).z() < 0.2) return false;
      for (MemberId m : s.config.topology.incident(n)) {
        const Member& mem = s.config.topology.member(m);
        const double l = (node_block(p, mem.a) - node_block(p, mem.b)).norm();
        if (l < limits.min_length || l > limits.max_length) return false;
      }
    }
    return true;
  };
}

inline const std::vector<std::string>& double_tet_trajectories() {
  static const std::vector<std::string> labels = {"x-axis", "y-axis", "z-axis", "xy",
                                                  "yz",     "xz",     "oblique"};
  return labels;
}

/// Grasp the cube, settle, run one trajectory of the manipulation suite.
///
/// Linear moves: x between +0.5 and -0.5 m, y between +0.35 and -0.35 m,
/// z from 0 up to +0.5 m and back. Circles: radius 0.2 m, 100 s period.
inline TrajectoryProgram double_tet_program(const Scene& s, std::string_view label,
                                            double grip = 30.0, const ActuatorModel& limits = {}) {
  if (s.control.mode != ControlMode::grasp) throw ConfigError("double_tet_program needs a grasp scene");
  Setpoint start;
  start.position = controlled_point(s, s.config.positions);
  const auto [a, b] = *s.config.grasp_nodes;
  const auto flush = grasp_node_targets(s, start.position, 0.0);
  start.opening = (node_block(s.config.positions, a) - flush[0]).dot(-s.config.grasp_axis);
  ProgramBuilder pb(start);
  pb.grasp(grip, 10.0, 6.0).hold(2.0, {}, "settle");
  const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
  const ReachableFn reach = workspace(s, limits);
  if (label == "x-axis") {
    pb.line_by(0.5 * x, 50.0).line_by(-1.0 * x, 100.0).line_by(0.5 * x, 50.0);
  } else if (label == "y-axis") {
    pb.line_by(0.35 * y, 35.0).line_by(-0.7 * y, 70.0).line_by(0.35 * y, 35.0);
  } else if (label == "z-axis") {
    pb.line_by(0.5 * z, 50.0).line_by(-0.5 * z, 50.0);
  } else if (label == "xy" || label == "yz" || label == "xz" || label == "oblique") {
    pb.circle(circle_plane_from_string(label), 0.2, 100.0, reach);
  } else {
    throw ConfigError("unknown trajectory '" + std::string(label) + "'");
  }
  return pb.hold(2.0, {}, "settle").build();
}

/// The two-box stacking sequence: grasp box 1 off pile A, lift, carry +y,
/// lower onto pile B, release, return for box 2, lift, carry, release onto
/// box 1.
inline TrajectoryProgram octahedron_two_box_program(const Scene& s, double grip = 12.0) {
  if (s.config.id != ConfigurationId::octahedron_internal || s.objects.size() < 2) {
    throw ConfigError("octahedron_two_box_program needs the octahedron scene");
  }
  Setpoint start;
  start.position = controlled_point(s, s.config.positions);
  const auto [a, b] = *s.config.grasp_nodes;
  const auto flush = grasp_node_targets(s, start.position, 0.0);
  start.opening = (node_block(s.config.positions, a) - flush[0]).dot(-s.config.grasp_axis);
  const Vec3 y = Vec3::UnitY(), z = Vec3::UnitZ();
  ProgramBuilder pb(start);
  pb.line_to(s.objects[0].position, 25.0, "approach")
      .windows({})
      .grasp(grip, 10.0, 10.0)
      .line_by(0.08 * z, 10.0, "lift")
      .line_by(0.5 * y, 52.0, "carry")
      .line_by(-0.4 * z, 42.5, "lower")
      .release(0.05, 8.0)
      .line_to(s.objects[1].position, 70.0, "reposition")
      .windows({})
      .grasp(grip, 10.0, 10.0)
      .line_by(0.1 * z, 8.5, "lift")
      .line_by(0.5 * y, 52.5, "carry")
      .release(0.05, 8.0);
  return pb.build();
}

}  // namespace trussforge
