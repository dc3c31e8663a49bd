#pragma once

// Truss graph and kinematics: member lengths L = f(P) and the inverse
// Jacobian J = dL/dP (M x 3N), plus per-node submatrices of J.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "trussforge/common.hpp"

namespace trussforge {

struct Member {
  NodeId a;
  NodeId b;

  NodeId other(NodeId n) const { return n == a ? b : a; }
  bool touches(NodeId n) const { return n == a || n == b; }
};

/// Node/member graph with a set of nodes fixed to ground.
///
/// Member order is significant: it defines the row order of J and of every
/// per-member vector.
class TrussTopology {
 public:
  TrussTopology() = default;

  TrussTopology(std::size_t node_count, std::vector<Member> members, std::vector<NodeId> anchors)
      : node_count_(node_count),
        members_(std::move(members)),
        anchor_flags_(node_count, false),
        incidence_(node_count) {
    for (NodeId n : anchors) {
      if (index(n) >= node_count_) {
        throw InvalidTopology("anchor " + std::to_string(index(n)) + " is not a node");
      }
      anchor_flags_[index(n)] = true;
    }
    for (std::size_t m = 0; m < members_.size(); ++m) {
      const Member& mem = members_[m];
      if (index(mem.a) >= node_count_ || index(mem.b) >= node_count_) {
        throw InvalidTopology("member " + std::to_string(m) + " references a missing node");
      }
      if (mem.a == mem.b) {
        throw InvalidTopology("member " + std::to_string(m) + " is a self-loop");
      }
      for (std::size_t prev = 0; prev < m; ++prev) {
        const Member& o = members_[prev];
        if ((o.a == mem.a && o.b == mem.b) || (o.a == mem.b && o.b == mem.a)) {
          throw InvalidTopology("members " + std::to_string(prev) + " and " + std::to_string(m) +
                                " join the same node pair");
        }
      }
      incidence_[index(mem.a)].push_back(member_id(m));
      incidence_[index(mem.b)].push_back(member_id(m));
    }
  }

  std::size_t node_count() const { return node_count_; }
  std::size_t member_count() const { return members_.size(); }
  std::size_t dof() const { return 3 * node_count_; }

  const std::vector<Member>& members() const { return members_; }
  const Member& member(MemberId m) const { return members_.at(index(m)); }

  bool is_anchor(NodeId n) const { return anchor_flags_.at(index(n)); }

  std::vector<NodeId> anchors() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < node_count_; ++i) {
      if (anchor_flags_[i]) out.push_back(node_id(i));
    }
    return out;
  }

  std::vector<NodeId> free_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < node_count_; ++i) {
      if (!anchor_flags_[i]) out.push_back(node_id(i));
    }
    return out;
  }

  /// E_k: members incident to node k, ascending MemberId.
  std::span<const MemberId> incident(NodeId k) const { return incidence_.at(index(k)); }

 private:
  std::size_t node_count_ = 0;
  std::vector<Member> members_;
  std::vector<bool> anchor_flags_;
  std::vector<std::vector<MemberId>> incidence_;
};

inline double member_length(const Vec3& p_i, const Vec3& p_j) {
  const double l = (p_i - p_j).norm();
  if (!(l >= kDegenerateLength)) throw DegenerateMember();
  return l;
}

inline void check_dimension(const TrussTopology& topology, const VecX& positions) {
  if (static_cast<std::size_t>(positions.size()) != topology.dof()) {
    throw DimensionMismatch("position vector has " + std::to_string(positions.size()) +
                            " entries, expected " + std::to_string(topology.dof()));
  }
}

/// L = f(P), in member-list order.
inline VecX forward_lengths(const TrussTopology& topology, const VecX& positions) {
  check_dimension(topology, positions);
  VecX lengths(topology.member_count());
  for (std::size_t m = 0; m < topology.member_count(); ++m) {
    const Member& mem = topology.members()[m];
    try {
      lengths[m] = member_length(node_block(positions, mem.a), node_block(positions, mem.b));
    } catch (const DegenerateMember&) {
      throw DegenerateMember(member_id(m));
    }
  }
  return lengths;
}

/// Unit direction of member m pointing from node b toward node a, i.e. the
/// node-a block of row m of J.
inline Vec3 member_direction(const TrussTopology& topology, const VecX& positions, MemberId m) {
  const Member& mem = topology.member(m);
  const Vec3 d = node_block(positions, mem.a) - node_block(positions, mem.b);
  const double l = d.norm();
  if (!(l >= kDegenerateLength)) throw DegenerateMember(m);
  return d / l;
}

/// J with dL/dt = J dP/dt. Row m has +u in node a's columns and -u in node
/// b's, where u is the unit vector from b to a. Anchored nodes keep their
/// columns.
inline MatX inverse_jacobian(const TrussTopology& topology, const VecX& positions) {
  check_dimension(topology, positions);
  MatX jac = MatX::Zero(topology.member_count(), topology.dof());
  for (std::size_t m = 0; m < topology.member_count(); ++m) {
    const Member& mem = topology.members()[m];
    const Vec3 u = member_direction(topology, positions, member_id(m));
    jac.block<1, 3>(m, 3 * index(mem.a)) = u.transpose();
    jac.block<1, 3>(m, 3 * index(mem.b)) = -u.transpose();
  }
  return jac;
}

/// J_k: the E_k rows of J restricted to node k's three columns.
inline MatX node_submatrix(const MatX& jacobian, const TrussTopology& topology, NodeId k) {
  if (topology.is_anchor(k)) throw AnchorNode(k);
  if (static_cast<std::size_t>(jacobian.rows()) != topology.member_count() ||
      static_cast<std::size_t>(jacobian.cols()) != topology.dof()) {
    throw DimensionMismatch("jacobian shape does not match topology");
  }
  const auto members = topology.incident(k);
  MatX sub(members.size(), 3);
  for (std::size_t r = 0; r < members.size(); ++r) {
    sub.row(r) = jacobian.block<1, 3>(index(members[r]), 3 * index(k));
  }
  return sub;
}

/// Columns of J belonging to the listed nodes, in the listed order.
inline MatX free_columns(const MatX& jacobian, std::span<const NodeId> nodes) {
  MatX out(jacobian.rows(), 3 * nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.middleCols<3>(3 * i) = jacobian.middleCols<3>(3 * index(nodes[i]));
  }
  return out;
}

/// Numerical rank from singular values, relative cutoff.
inline int numerical_rank(const MatX& a, double relative_cutoff = 1e-10) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > s[0] * relative_cutoff) ++rank;
  }
  return rank;
}

}  // namespace trussforge
