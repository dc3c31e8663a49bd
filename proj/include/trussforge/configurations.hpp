#pragma once

// Builders for the reference truss configurations.
//
// Coordinates are metres, z up, anchors on the ground plane. Node numbering
// is fixed per configuration and documented next to each builder.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trussforge/actuator.hpp"
#include "trussforge/solver.hpp"
#include "trussforge/statics.hpp"

namespace trussforge {

enum class ConfigurationId { single_member, tetrahedron, pyramid, double_tetrahedron, octahedron_internal };

inline const char* to_string(ConfigurationId id) {
  switch (id) {
    case ConfigurationId::single_member: return "single_member";
    case ConfigurationId::tetrahedron: return "tetrahedron";
    case ConfigurationId::pyramid: return "pyramid";
    case ConfigurationId::double_tetrahedron: return "double_tetrahedron";
    case ConfigurationId::octahedron_internal: return "octahedron_internal";
  }
  return "?";
}

inline ConfigurationId configuration_from_string(std::string_view s) {
  for (auto id : {ConfigurationId::single_member, ConfigurationId::tetrahedron,
                  ConfigurationId::pyramid, ConfigurationId::double_tetrahedron,
                  ConfigurationId::octahedron_internal}) {
    if (s == to_string(id)) return id;
  }
  throw ConfigError("unknown configuration '" + std::string(s) + "'");
}

struct GeometryOverrides {
  std::optional<double> edge_length;     // tetrahedron / pyramid base edge, octahedron edge
  std::optional<double> fixture_length;   // single_member
  std::optional<double> apex_height;      // double_tetrahedron grasp height
  std::optional<double> node_mass;        // kg, every node
  std::optional<double> member_mass;      // kg, every member
};

struct Configuration {
  ConfigurationId id{};
  TrussTopology topology;
  VecX positions;
  std::vector<double> node_masses;
  std::vector<double> member_masses;
  std::optional<NodeId> tip;                  // single end-effector node
  std::optional<std::array<NodeId, 2>> grasp_nodes;  // -axis side first
  Vec3 grasp_axis = Vec3::UnitY();
};

namespace detail {

inline std::vector<Member> make_members(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Member> out;
  for (auto [a, b] : pairs) out.push_back({node_id(a), node_id(b)});
  return out;
}

inline std::vector<NodeId> make_nodes(std::initializer_list<int> ids) {
  std::vector<NodeId> out;
  for (int i : ids) out.push_back(node_id(i));
  return out;
}

inline VecX stack(std::initializer_list<Vec3> pts) {
  VecX p(3 * pts.size());
  Eigen::Index i = 0;
  for (const Vec3& v : pts) {
    p.segment<3>(i) = v;
    i += 3;
  }
  return p;
}

}  // namespace detail

/// Checks the invariants every built configuration must satisfy.
inline void validate_configuration(const Configuration& c, const ActuatorModel& limits) {
  const TrussTopology& t = c.topology;
  VecX lengths;
  try {
    lengths = forward_lengths(t, c.positions);
  } catch (const DegenerateMember& e) {
    throw InvalidGeometry(e.what());
  }
  for (std::size_t m = 0; m < t.member_count(); ++m) {
    if (lengths[m] < limits.min_length || lengths[m] > limits.max_length) {
      throw InvalidGeometry("member " + std::to_string(m) + " length " +
                            std::to_string(lengths[m]) + " m is outside the actuator range");
    }
  }
  const MatX j = inverse_jacobian(t, c.positions);
  for (NodeId n : t.free_nodes()) {
    if (numerical_rank(node_submatrix(j, t, n), 1e-6) < 3) {
      throw InvalidGeometry("node " + std::to_string(index(n)) + " is not held in all directions");
    }
  }
  try {
    SolverConfig cfg;
    cfg.tolerance = 1e-10;
    const SolveResult r = solve_positions(t, lengths, c.positions, cfg);
    if (r.residual > 1e-9) throw InvalidGeometry("nominal lengths do not re-solve");
  } catch (const UnderConstrained& e) {
    throw InvalidGeometry(std::string("configuration is a mechanism: ") + e.what());
  }
  if (c.grasp_nodes) {
    const auto [a, b] = *c.grasp_nodes;
    for (MemberId m : t.incident(a)) {
      if (t.member(m).touches(b)) throw InvalidGeometry("grasp nodes share a member");
    }
  }
}

/// Builds a configuration with default geometry unless overridden.
///
/// single_member       nodes 0-1, both anchored (rigid test fixture), one member.
/// tetrahedron         base 0,1,2 anchored (equilateral, centroid at origin), apex 3.
/// pyramid             square base 0..3 anchored, apex 4; legs are members 0..3.
/// double_tetrahedron  base A 0,1,2 + apex 3; base B 4,5,6 + apex 7. Grasp nodes
///                     3 and 7 face each other along y.
/// octahedron_internal bottom face 0,1,2 anchored, top face 3,4,5, internal
///                     grasp nodes 6 (-x side) and 7 (+x side), grasp axis x.
inline Configuration build_configuration(ConfigurationId id, const GeometryOverrides& geo = {},
                                         const ActuatorModel& limits = {}) {
  using detail::make_members;
  using detail::make_nodes;
  using detail::stack;
  Configuration c;
  c.id = id;
  const double s3 = std::sqrt(3.0);
  switch (id) {
    case ConfigurationId::single_member: {
      const double l = geo.fixture_length.value_or(1.0);
      c.topology = TrussTopology(2, make_members({{0, 1}}), make_nodes({0, 1}));
      c.positions = stack({Vec3(0, 0, 0), Vec3(0, 0, l)});
      break;
    }
    case ConfigurationId::tetrahedron: {
      const double e = geo.edge_length.value_or(1.0);
      c.topology = TrussTopology(4, make_members({{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}}),
                                 make_nodes({0, 1, 2}));
      c.positions = stack({Vec3(-0.5 * e, -e / (2 * s3), 0), Vec3(0.5 * e, -e / (2 * s3), 0),
                           Vec3(0, e / s3, 0), Vec3(0, 0, e * std::sqrt(2.0 / 3.0))});
      c.tip = node_id(3);
      break;
    }
    case ConfigurationId::pyramid: {
      const double e = geo.edge_length.value_or(1.0);
      const double h = 0.5 * e;
      c.topology = TrussTopology(
          5, make_members({{0, 4}, {1, 4}, {2, 4}, {3, 4}, {0, 1}, {1, 2}, {2, 3}, {3, 0}}),
          make_nodes({0, 1, 2, 3}));
      c.positions = stack({Vec3(-h, -h, 0), Vec3(h, -h, 0), Vec3(h, h, 0), Vec3(-h, h, 0),
                           Vec3(0, 0, e / std::sqrt(2.0))});
      c.tip = node_id(4);
      break;
    }
    case ConfigurationId::double_tetrahedron: {
      const double z = geo.apex_height.value_or(0.8);
      // Two unit-edge bases mirrored about y = 0, apexes leaning inward so
      // they meet 0.3 m apart above the origin.
      const double yb = 0.361;
      const double yf = yb + s3 / 2;
      c.topology = TrussTopology(
          8,
          make_members({{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3},
                        {4, 5}, {5, 6}, {6, 4}, {4, 7}, {5, 7}, {6, 7}}),
          make_nodes({0, 1, 2, 4, 5, 6}));
      c.positions = stack({Vec3(-0.5, -yb, 0), Vec3(0.5, -yb, 0), Vec3(0, -yf, 0),
                           Vec3(0, -0.15, z), Vec3(-0.5, yb, 0), Vec3(0.5, yb, 0),
                           Vec3(0, yf, 0), Vec3(0, 0.15, z)});
      c.grasp_nodes = std::array<NodeId, 2>{node_id(3), node_id(7)};
      c.grasp_axis = Vec3::UnitY();
      break;
    }
    case ConfigurationId::octahedron_internal: {
      const double e = geo.edge_length.value_or(2.0);
      const double rc = e / s3;                       // face circumradius
      const double h = e * std::sqrt(2.0 / 3.0);      // face-to-face height
      auto at = [&](double deg, double zz) {
        const double a = deg * std::numbers::pi / 180.0;
        return Vec3(rc * std::cos(a), rc * std::sin(a), zz);
      };
      // Bottom 0,1,2 at 90/210/330 deg; top 3,4,5 at 30/150/270 deg.
      // Each internal node is tied to four outer vertices on its side.
      c.topology = TrussTopology(
          8,
          make_members({{0, 1}, {1, 2}, {2, 0},
                        {3, 4}, {4, 5}, {5, 3},
                        {0, 3}, {0, 4}, {1, 4}, {1, 5}, {2, 5}, {2, 3},
                        {6, 1}, {6, 4}, {6, 0}, {6, 5},
                        {7, 2}, {7, 3}, {7, 0}, {7, 5}}),
          make_nodes({0, 1, 2}));
      c.positions = stack({at(90, 0), at(210, 0), at(330, 0), at(30, h), at(150, h), at(270, h),
                           Vec3(-0.15, 0, 0.9), Vec3(0.15, 0, 0.9)});
      c.grasp_nodes = std::array<NodeId, 2>{node_id(6), node_id(7)};
      c.grasp_axis = Vec3::UnitX();
      break;
    }
  }
  const double node_mass = geo.node_mass.value_or(0.2);
  const double member_mass = geo.member_mass.value_or(0.4);
  if (node_mass < 0.0 || member_mass < 0.0) throw InvalidGeometry("masses must be non-negative");
  c.node_masses.assign(c.topology.node_count(), node_mass);
  c.member_masses.assign(c.topology.member_count(), member_mass);
  validate_configuration(c, limits);
  return c;
}

}  // namespace trussforge
