#pragma once

// Static force model.
//
// Sign convention: member force lambda is positive in tension (the member
// pulls its two end nodes toward each other). A tensioned member pulls node a
// along -u, where u = dl/dp_a is the node-a block of its Jacobian row, so the
// force a node exerts on its surroundings is
//
//   F = W - J^T lambda
//
// with W the external loads (gravity) acting on the nodes. Allocation inverts
// this per node: lambda_k = (J_k^T)^+ (W_k - F_des).

#include <cmath>
#include <span>
#include <vector>

#include "trussforge/truss.hpp"

namespace trussforge {

/// Moore-Penrose pseudoinverse by SVD, dropping singular values below
/// sigma_max * relative_cutoff.
inline MatX pseudo_inverse(const MatX& a, double relative_cutoff = 1e-10) {
  if (a.size() == 0) return MatX::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? s[0] * relative_cutoff : 0.0;
  VecX inv = VecX::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Stacked force every node exerts on its surroundings: W - J^T lambda.
inline VecX nodal_forces(const MatX& jacobian, const VecX& member_forces, const VecX& loads) {
  if (jacobian.rows() != member_forces.size() || jacobian.cols() != loads.size()) {
    throw DimensionMismatch("nodal_forces: J is " + std::to_string(jacobian.rows()) + "x" +
                            std::to_string(jacobian.cols()) + ", lambda has " +
                            std::to_string(member_forces.size()) + ", W has " +
                            std::to_string(loads.size()));
  }
  return loads - jacobian.transpose() * member_forces;
}

enum class Constrainedness { fully, over, under };

inline const char* to_string(Constrainedness c) {
  switch (c) {
    case Constrainedness::fully: return "fully";
    case Constrainedness::over: return "over";
    case Constrainedness::under: return "under";
  }
  return "?";
}

struct AllocationResult {
  std::vector<MemberId> members;  // E_k, ascending
  VecX member_forces;             // lambda_k, aligned with members
  Vec3 residual = Vec3::Zero();   // achieved force minus F_des
  int rank = 0;
  Constrainedness constrainedness = Constrainedness::under;
};

struct AllocationOptions {
  bool clamp = false;
  double force_limit = 200.0;  // N
  double relative_cutoff = 1e-10;
};

inline Constrainedness classify(int rank, std::size_t member_count) {
  if (rank < 3) return Constrainedness::under;
  return member_count == 3 ? Constrainedness::fully : Constrainedness::over;
}

/// Member forces on E_k that make node k exert force_desired, given the
/// external load on node k.
inline AllocationResult allocate_member_forces(const TrussTopology& topology, const MatX& jacobian,
                                               NodeId k, const Vec3& force_desired,
                                               const Vec3& node_load,
                                               const AllocationOptions& options = {}) {
  const MatX jk = node_submatrix(jacobian, topology, k);
  for (Eigen::Index r = 0; r < jk.rows(); ++r) {
    if (!(jk.row(r).norm() > 0.5)) throw DegenerateMember(topology.incident(k)[r]);
  }
  AllocationResult out;
  out.members.assign(topology.incident(k).begin(), topology.incident(k).end());
  const MatX jkt = jk.transpose();
  out.member_forces = pseudo_inverse(jkt, options.relative_cutoff) * (node_load - force_desired);
  out.residual = (node_load - jkt * out.member_forces) - force_desired;
  out.rank = numerical_rank(jkt, options.relative_cutoff);
  out.constrainedness = classify(out.rank, out.members.size());
  if (options.clamp) {
    for (Eigen::Index i = 0; i < out.member_forces.size(); ++i) {
      if (std::abs(out.member_forces[i]) > options.force_limit) {
        throw ForceLimitExceeded(out.members[i], out.member_forces[i]);
      }
    }
  }
  return out;
}

/// Joint allocation over several free nodes at once: find minimum-norm forces
/// on `members` so that every node in `nodes` exerts `force_desired` (stacked
/// 3 per node) given `node_loads` (stacked, already including any known
/// member forces acting on those nodes).
inline VecX allocate_node_set(const MatX& jacobian, std::span<const NodeId> nodes,
                              std::span<const MemberId> members, const VecX& force_desired,
                              const VecX& node_loads, double relative_cutoff = 1e-10) {
  MatX sub(3 * nodes.size(), members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      sub.block<3, 1>(3 * r, c) =
          jacobian.block<1, 3>(index(members[c]), 3 * index(nodes[r])).transpose();
    }
  }
  return pseudo_inverse(sub, relative_cutoff) * (node_loads - force_desired);
}

/// Gravity on every node: node mass plus half of each incident member's mass.
inline VecX gravity_loads(const TrussTopology& topology, std::span<const double> node_masses,
                          std::span<const double> member_masses) {
  if (node_masses.size() != topology.node_count() ||
      member_masses.size() != topology.member_count()) {
    throw DimensionMismatch("gravity_loads: mass vector sizes do not match the topology");
  }
  VecX w = VecX::Zero(topology.dof());
  for (std::size_t k = 0; k < topology.node_count(); ++k) {
    double mass = node_masses[k];
    for (MemberId m : topology.incident(node_id(k))) mass += 0.5 * member_masses[index(m)];
    w[3 * k + 2] = -mass * kGravity;
  }
  return w;
}

}  // namespace trussforge
