#pragma once

// High-level hybrid position/force law and its mapping to member force
// commands through the statics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "trussforge/statics.hpp"

namespace trussforge {

struct NodeTarget {
  NodeId node;
  Vec3 position;  // P_des, m
  Vec3 force;     // F_des, N, force the node should exert on its surroundings
};

struct HybridCommand {
  std::vector<NodeTarget> targets;
  double k_pos = 800.0;  // N/m
};

/// F_cmd = F_des + k_pos (P_des - P_curr). No projection, no selection
/// matrices: force and position terms add along whatever directions they have.
inline Vec3 hybrid_nodal_command(const Vec3& position_desired, const Vec3& position_current,
                                 const Vec3& force_desired, double k_pos) {
  return force_desired + k_pos * (position_desired - position_current);
}

/// Scaling F_des and k_pos together by s scales F_cmd by s.
inline bool scaling_invariance_check(const Vec3& position_desired, const Vec3& position_current,
                                     const Vec3& force_desired, double k_pos, double scale,
                                     double tolerance = 1e-12) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  const Vec3 base = hybrid_nodal_command(position_desired, position_current, force_desired, k_pos);
  const Vec3 scaled = hybrid_nodal_command(position_desired, position_current,
                                           scale * force_desired, scale * k_pos);
  const double ref = std::max(1.0, (scale * base).norm());
  return (scaled - scale * base).norm() <= tolerance * ref;
}

enum class CommandSource : unsigned char { idle, target, hold };

struct MemberCommandSet {
  VecX force;                          // lambda_cmd per member, N
  std::vector<CommandSource> source;   // who set each entry
  std::vector<Vec3> nodal_command;     // F_cmd per target, same order as targets
  double time = 0.0;                   // s
};

struct CommandOptions {
  AllocationOptions allocation;
  // Positions non-target free nodes are held at. Empty: pure gravity hold.
  std::optional<VecX> hold_positions;
};

/// lambda_cmd for every member.
///
/// Each target node k gets F_cmd from the hybrid law and lambda on E_k from
/// per-node allocation. The remaining free nodes are held with a joint
/// allocation over their still-uncommanded members, treating target-commanded
/// members as known loads; their F_cmd is k_pos (P_hold - P_curr), which is
/// zero without hold positions. Members touching only anchors idle at 0 N.
inline MemberCommandSet compute_member_commands(const TrussTopology& topology,
                                                const MatX& jacobian, const VecX& positions,
                                                const HybridCommand& command, const VecX& loads,
                                                const CommandOptions& options = {}) {
  check_dimension(topology, positions);
  if (loads.size() != positions.size()) throw DimensionMismatch("loads size != 3N");
  if (!(command.k_pos >= 0.0)) throw ConfigError("k_pos must be non-negative");

  MemberCommandSet out;
  out.force = VecX::Zero(topology.member_count());
  out.source.assign(topology.member_count(), CommandSource::idle);

  std::vector<bool> is_target(topology.node_count(), false);
  for (const NodeTarget& t : command.targets) {
    if (topology.is_anchor(t.node)) throw AnchorNode(t.node);
    is_target[index(t.node)] = true;
    for (MemberId m : topology.incident(t.node)) {
      if (out.source[index(m)] == CommandSource::target) throw SharedMemberConflict(m);
      out.source[index(m)] = CommandSource::target;
    }
  }

  for (const NodeTarget& t : command.targets) {
    const Vec3 f_cmd = hybrid_nodal_command(t.position, node_block(positions, t.node), t.force,
                                            command.k_pos);
    out.nodal_command.push_back(f_cmd);
    const AllocationResult alloc = allocate_member_forces(
        topology, jacobian, t.node, f_cmd, node_block(loads, t.node), options.allocation);
    for (std::size_t i = 0; i < alloc.members.size(); ++i) {
      out.force[index(alloc.members[i])] = alloc.member_forces[i];
    }
  }

  std::vector<NodeId> hold_nodes;
  for (NodeId n : topology.free_nodes()) {
    if (!is_target[index(n)]) hold_nodes.push_back(n);
  }
  if (hold_nodes.empty()) return out;

  std::vector<MemberId> hold_members;
  for (std::size_t m = 0; m < topology.member_count(); ++m) {
    if (out.source[m] == CommandSource::target) continue;
    const Member& mem = topology.members()[m];
    const bool touches_hold = std::any_of(hold_nodes.begin(), hold_nodes.end(),
                                          [&](NodeId n) { return mem.touches(n); });
    if (touches_hold) hold_members.push_back(member_id(m));
  }

  VecX desired = VecX::Zero(3 * hold_nodes.size());
  VecX rhs_loads(3 * hold_nodes.size());
  // Target-commanded members act on hold nodes as known loads: -J^T lambda.
  const VecX known = -jacobian.transpose() * out.force;
  for (std::size_t i = 0; i < hold_nodes.size(); ++i) {
    const NodeId n = hold_nodes[i];
    rhs_loads.segment<3>(3 * i) = node_block(loads, n) + node_block(known, n);
    if (options.hold_positions) {
      desired.segment<3>(3 * i) = command.k_pos * (node_block(*options.hold_positions, n) -
                                                   node_block(positions, n));
    }
  }
  const VecX hold = allocate_node_set(jacobian, hold_nodes, hold_members, desired, rhs_loads,
                                      options.allocation.relative_cutoff);
  for (std::size_t i = 0; i < hold_members.size(); ++i) {
    const std::size_t m = index(hold_members[i]);
    out.force[m] = hold[i];
    out.source[m] = CommandSource::hold;
    if (options.allocation.clamp && std::abs(hold[i]) > options.allocation.force_limit) {
      throw ForceLimitExceeded(hold_members[i], hold[i]);
    }
  }
  return out;
}

}  // namespace trussforge
