#pragma once

// Penalty contacts between node spheres and the environment (walls, boxes),
// plus the two-node friction grasp.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "trussforge/truss.hpp"

namespace trussforge {

/// Solid half-space behind a plane; `normal` points out of the solid.
struct Wall {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double stiffness = 5e4;  // N/m
};

/// Static axis-aligned box that objects can rest on (a pedestal or pile).
struct SupportBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.05);

  double top() const { return center.z() + half_extents.z(); }
};

/// Box-shaped payload. Orientation is fixed; it only translates.
struct RigidObject {
  Vec3 half_extents = Vec3::Constant(0.1);  // m
  double mass = 0.931;                      // kg
  Vec3 position = Vec3::Zero();             // center, m
  double friction = 0.8;                    // node-sphere / object

  friend bool operator==(const RigidObject&, const RigidObject&) = default;
};

struct Environment {
  std::vector<Wall> walls;
  std::vector<SupportBox> supports;
  double contact_stiffness = 5e4;  // N/m, node-object
  double node_radius = 0.03;       // m
  double floor_height = 0.0;       // m
  double slip_speed = 0.5;         // m/s, object slide rate relative to the grasp
};

enum class GraspStatus : unsigned char { free, grasped, slipping, dropped };

inline const char* to_string(GraspStatus s) {
  switch (s) {
    case GraspStatus::free: return "free";
    case GraspStatus::grasped: return "grasped";
    case GraspStatus::slipping: return "slipping";
    case GraspStatus::dropped: return "dropped";
  }
  return "?";
}

/// Two nodes pressing one object from opposite faces. node_a sits on the
/// -axis face, node_b on the +axis face.
struct GraspState {
  NodeId node_a{};
  NodeId node_b{};
  Vec3 axis = Vec3::UnitY();
  std::size_t object = 0;
  std::array<double, 2> normal_force{0.0, 0.0};
  std::array<Vec3, 2> contact_normal{Vec3::Zero(), Vec3::Zero()};  // onto the node
  GraspStatus status = GraspStatus::free;
  Vec3 offset = Vec3::Zero();  // object center minus node midpoint, tangential
  bool release_requested = false;
  bool supported = false;  // object weight carried by a support, not friction

  friend bool operator==(const GraspState&, const GraspState&) = default;
};

struct PenaltyTerm {
  double stiffness = 0.0;
  double penetration = 0.0;  // > 0 for active terms
  std::array<NodeId, 2> nodes{};
  std::array<Vec3, 2> gradient{Vec3::Zero(), Vec3::Zero()};  // d(penetration)/d(p_node)
  int node_count = 1;

  enum class Kind : unsigned char { wall, object, grasp } kind = Kind::wall;
  std::size_t source = 0;  // wall or object index
};

/// Box extent along a unit direction.
inline double support_extent(const Vec3& half_extents, const Vec3& dir) {
  return half_extents.cwiseProduct(dir.cwiseAbs()).sum();
}

/// Highest resting height (box bottom) available under a footprint.
inline double rest_height(const Environment& env, const std::vector<RigidObject>& objects,
                          std::size_t self, const Vec3& center, const Vec3& half_extents) {
  double h = env.floor_height;
  auto overlaps = [&](const Vec3& c, const Vec3& e) {
    return std::abs(c.x() - center.x()) < e.x() + half_extents.x() &&
           std::abs(c.y() - center.y()) < e.y() + half_extents.y();
  };
  const double bottom = center.z() - half_extents.z();
  for (const SupportBox& s : env.supports) {
    if (overlaps(s.center, s.half_extents) && s.top() <= bottom + 1e-6) h = std::max(h, s.top());
  }
  for (std::size_t j = 0; j < objects.size(); ++j) {
    if (j == self) continue;
    const RigidObject& o = objects[j];
    const double top = o.position.z() + o.half_extents.z();
    if (overlaps(o.position, o.half_extents) && top <= bottom + 1e-6) h = std::max(h, top);
  }
  return h;
}

inline bool grasp_holds_object(const GraspState& g) {
  return g.status == GraspStatus::grasped || g.status == GraspStatus::slipping;
}

namespace detail {

inline void add_sphere_box_term(std::vector<PenaltyTerm>& out, NodeId node, const Vec3& p,
                                double radius, const RigidObject& obj, std::size_t which,
                                double stiffness) {
  const Vec3 rel = p - obj.position;
  const Vec3 clamped = rel.cwiseMax(-obj.half_extents).cwiseMin(obj.half_extents);
  const Vec3 diff = rel - clamped;
  const double dist = diff.norm();
  PenaltyTerm t;
  t.stiffness = stiffness;
  t.nodes[0] = node;
  t.kind = PenaltyTerm::Kind::object;
  t.source = which;
  if (dist > 0.0) {
    if (dist >= radius) return;
    t.penetration = radius - dist;
    t.gradient[0] = -diff / dist;
  } else {
    // Center inside the box: push out through the nearest face.
    const Vec3 depth = obj.half_extents - rel.cwiseAbs();
    Eigen::Index axis = 0;
    depth.minCoeff(&axis);
    Vec3 n = Vec3::Zero();
    n[axis] = rel[axis] >= 0.0 ? 1.0 : -1.0;
    t.penetration = radius + depth[axis];
    t.gradient[0] = -n;
  }
  out.push_back(t);
}

}  // namespace detail

/// Active penalty terms for the node positions `p`.
///
/// Walls act on every free node. Objects act on free nodes through the
/// closest point of the box, except a held object: its center along the grasp
/// axis is the midpoint of the two grasp nodes, so both faces share one
/// penetration r + h - (p_b - p_a).axis / 2.
inline std::vector<PenaltyTerm> contact_terms(const TrussTopology& topology, const VecX& p,
                                              const Environment& env,
                                              const std::vector<RigidObject>& objects,
                                              const std::optional<GraspState>& grasp,
                                              const VecX* face_reference = nullptr) {
  std::vector<PenaltyTerm> out;
  const double r = env.node_radius;
  const bool pair_active = grasp && grasp_holds_object(*grasp);
  for (std::size_t k = 0; k < topology.node_count(); ++k) {
    const NodeId node = node_id(k);
    if (topology.is_anchor(node)) continue;
    const Vec3 pk = node_block(p, node);
    for (std::size_t w = 0; w < env.walls.size(); ++w) {
      const Wall& wall = env.walls[w];
      const double pen = r - (pk - wall.point).dot(wall.normal);
      if (pen <= 0.0) continue;
      PenaltyTerm t;
      t.stiffness = wall.stiffness;
      t.penetration = pen;
      t.nodes[0] = node;
      t.gradient[0] = -wall.normal;
      t.kind = PenaltyTerm::Kind::wall;
      t.source = w;
      out.push_back(t);
    }
    for (std::size_t j = 0; j < objects.size(); ++j) {
      if (pair_active && j == grasp->object &&
          (node == grasp->node_a || node == grasp->node_b)) {
        continue;
      }
      detail::add_sphere_box_term(out, node, pk, r, objects[j], j, env.contact_stiffness);
    }
  }
  if (pair_active) {
    const GraspState& g = *grasp;
    const RigidObject& obj = objects.at(g.object);
    const Vec3 pa = node_block(p, g.node_a);
    const Vec3 pb = node_block(p, g.node_b);
    const double h = support_extent(obj.half_extents, g.axis);
    const double pen = r + h - 0.5 * (pb - pa).dot(g.axis);
    // Each node must still be over its face.
    auto over_face = [&](const Vec3& pn) {
      Vec3 rel = pn - obj.position;
      rel -= rel.dot(g.axis) * g.axis;
      return (rel.cwiseAbs() - obj.half_extents).maxCoeff() <= 0.0;
    };
    // The solver passes the pose it started from here, which keeps the
    // energy smooth while it iterates; contact loss shows up afterwards.
    const VecX& ref = face_reference ? *face_reference : p;
    if (pen > 0.0 && over_face(node_block(ref, g.node_a)) && over_face(node_block(ref, g.node_b))) {
      for (int side = 0; side < 2; ++side) {
        PenaltyTerm t;
        t.stiffness = env.contact_stiffness;
        t.penetration = pen;
        t.node_count = 2;
        t.nodes = {g.node_a, g.node_b};
        t.gradient = {0.5 * g.axis, -0.5 * g.axis};
        t.kind = PenaltyTerm::Kind::grasp;
        t.source = static_cast<std::size_t>(side);
        out.push_back(t);
      }
    }
  }
  return out;
}

/// Stacked force that contacts apply to each node (3N).
inline VecX contact_forces_on_nodes(std::size_t node_count, const std::vector<PenaltyTerm>& terms) {
  VecX f = VecX::Zero(3 * node_count);
  for (const PenaltyTerm& t : terms) {
    for (int i = 0; i < t.node_count; ++i) {
      f.segment<3>(3 * index(t.nodes[i])) -= t.stiffness * t.penetration * t.gradient[i];
    }
  }
  return f;
}

/// Normal force magnitudes the two grasp nodes apply to their object.
inline std::array<double, 2> grasp_normal_forces(const std::vector<PenaltyTerm>& terms,
                                                 const GraspState& g) {
  std::array<double, 2> n{0.0, 0.0};
  for (const PenaltyTerm& t : terms) {
    if (t.kind == PenaltyTerm::Kind::grasp) {
      n[t.source] += t.stiffness * t.penetration;
    } else if (t.kind == PenaltyTerm::Kind::object && t.source == g.object) {
      if (t.nodes[0] == g.node_a) n[0] += t.stiffness * t.penetration;
      if (t.nodes[0] == g.node_b) n[1] += t.stiffness * t.penetration;
    }
  }
  return n;
}

/// Total normal force pressed into one wall.
inline double wall_force(const std::vector<PenaltyTerm>& terms, std::size_t wall) {
  double f = 0.0;
  for (const PenaltyTerm& t : terms) {
    if (t.kind == PenaltyTerm::Kind::wall && t.source == wall) f += t.stiffness * t.penetration;
  }
  return f;
}

/// Friction demand per contact: half the weight unless a support carries it.
inline double tangential_demand(const RigidObject& obj, bool supported) {
  return supported ? 0.0 : 0.5 * obj.mass * kGravity;
}

/// Friction-cone check for both contacts.
inline bool friction_holds(const RigidObject& obj, const std::array<double, 2>& normal,
                           bool supported) {
  const double demand = tangential_demand(obj, supported);
  return normal[0] > 0.0 && normal[1] > 0.0 && demand <= obj.friction * normal[0] &&
         demand <= obj.friction * normal[1];
}

/// Minimum friction coefficient that holds `obj` with a per-node normal force.
inline double minimum_friction(double mass, double normal_force) {
  return 0.5 * mass * kGravity / normal_force;
}

/// Advance grasp status and the object poses.
///
/// free -> grasped once both nodes press the object inside the friction cone.
/// grasped -> slipping when the weight share exceeds mu N at either contact;
/// slipping -> grasped if the cone is satisfied again. Losing a contact while
/// held ends the grasp: dropped, or free when a release was requested.
/// Objects not held rest on the highest support below them.
inline void grasp_update(GraspState& g, std::vector<RigidObject>& objects,
                         const Environment& env, const VecX& positions,
                         const std::array<double, 2>& normal, double dt) {
  g.normal_force = normal;
  g.contact_normal = {-g.axis, g.axis};
  const Vec3 mid = 0.5 * (node_block(positions, g.node_a) + node_block(positions, g.node_b));

  if (g.object < objects.size()) {
    RigidObject& obj = objects[g.object];
    const bool both = normal[0] > 0.0 && normal[1] > 0.0;
    switch (g.status) {
      case GraspStatus::free:
        if (both && !g.release_requested) {
          const double rest = rest_height(env, objects, g.object, obj.position, obj.half_extents);
          const bool on_support = obj.position.z() - obj.half_extents.z() <= rest + 1e-9;
          if (friction_holds(obj, normal, on_support)) {
            g.status = GraspStatus::grasped;
            g.offset = obj.position - mid;
            g.offset -= g.offset.dot(g.axis) * g.axis;
          }
        }
        break;
      case GraspStatus::grasped:
        if (!both) {
          g.status = g.release_requested ? GraspStatus::free : GraspStatus::dropped;
        } else if (!friction_holds(obj, normal, g.supported)) {
          g.status = GraspStatus::slipping;
        }
        break;
      case GraspStatus::slipping:
        if (!both) {
          g.status = g.release_requested ? GraspStatus::free : GraspStatus::dropped;
        } else if (friction_holds(obj, normal, g.supported)) {
          g.status = GraspStatus::grasped;
        } else {
          g.offset.z() -= env.slip_speed * dt;
        }
        break;
      case GraspStatus::dropped:
        break;
    }

    if (grasp_holds_object(g)) {
      Vec3 c = mid + g.offset;
      // Supports are searched from the higher of the old and new pose so a
      // held box cannot be pushed down through a pedestal.
      Vec3 probe = c;
      probe.z() = std::max(c.z(), obj.position.z());
      const double rest = rest_height(env, objects, g.object, probe, obj.half_extents);
      g.supported = c.z() - obj.half_extents.z() <= rest;
      if (g.supported) c.z() = rest + obj.half_extents.z();
      obj.position = c;
    } else {
      g.supported = false;
    }
  }

  // Everything not held settles onto what is below it, lowest first so
  // stacks resolve in one pass.
  std::vector<std::size_t> order(objects.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objects[a].position.z() < objects[b].position.z();
  });
  for (std::size_t j : order) {
    if (j == g.object && grasp_holds_object(g)) continue;
    RigidObject& o = objects[j];
    o.position.z() = rest_height(env, objects, j, o.position, o.half_extents) + o.half_extents.z();
  }
}

}  // namespace trussforge
