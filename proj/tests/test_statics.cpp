#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trussforge/configurations.hpp"
#include "trussforge/statics.hpp"

using namespace trussforge;

namespace {

// Anchor at the origin, free node straight above it.
struct Post {
  TrussTopology topo{2, {{node_id(0), node_id(1)}}, {node_id(0)}};
  VecX p = (VecX(6) << 0, 0, 0, 0, 0, 1).finished();
};

}  // namespace

TEST(NodalForces, TensionPullsTheFreeNodeDown) {
  Post s;
  const VecX f = nodal_forces(inverse_jacobian(s.topo, s.p), VecX::Constant(1, 10.0),
                              VecX::Zero(6));
  EXPECT_TRUE(f.segment<3>(3).isApprox(Vec3(0, 0, -10)));
}

TEST(NodalForces, ShapeMismatchThrows) {
  Post s;
  EXPECT_THROW(nodal_forces(inverse_jacobian(s.topo, s.p), VecX::Zero(2), VecX::Zero(6)),
               DimensionMismatch);
}

TEST(Allocate, WeightCarriedInCompression) {
  Post s;
  const auto r = allocate_member_forces(s.topo, inverse_jacobian(s.topo, s.p), node_id(1),
                                        Vec3::Zero(), Vec3(0, 0, -kGravity));
  ASSERT_EQ(r.member_forces.size(), 1);
  EXPECT_NEAR(r.member_forces[0], -kGravity, 1e-12);
  EXPECT_EQ(r.constrainedness, Constrainedness::under);
  EXPECT_LT(r.residual.norm(), 1e-12);
}

TEST(Allocate, UnderConstrainedReportsUnrealizableComponent) {
  Post s;
  const auto r = allocate_member_forces(s.topo, inverse_jacobian(s.topo, s.p), node_id(1),
                                        Vec3(3, 0, 5), Vec3::Zero());
  EXPECT_NEAR(r.member_forces[0], -5.0, 1e-12);
  EXPECT_TRUE(r.residual.isApprox(Vec3(-3, 0, 0), 1e-12));
}

TEST(Allocate, TetraApexMatchesDirectSolve) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  const NodeId apex = *c.tip;
  const MatX j = inverse_jacobian(c.topology, c.positions);
  const Vec3 fdes(4, -7, 12), w(0, 0, -3);
  const auto r = allocate_member_forces(c.topology, j, apex, fdes, w);
  EXPECT_EQ(r.constrainedness, Constrainedness::fully);

  // Oracle: rows of J_k are unit vectors from the base nodes to the apex.
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    const MemberId m = c.topology.incident(apex)[i];
    const NodeId other = c.topology.member(m).other(apex);
    a.col(i) = (node_block(c.positions, apex) - node_block(c.positions, other)).normalized();
  }
  const Vec3 expected = a.partialPivLu().solve(w - fdes);
  EXPECT_TRUE(r.member_forces.isApprox(expected, 1e-12));
  EXPECT_LT(r.residual.norm(), 1e-9);
}

TEST(Allocate, PyramidIsMinimumNorm) {
  const Configuration c = build_configuration(ConfigurationId::pyramid);
  const NodeId apex = *c.tip;
  const MatX j = inverse_jacobian(c.topology, c.positions);
  const Vec3 fdes(10, -5, 20), w(0, 0, -4);
  const auto r = allocate_member_forces(c.topology, j, apex, fdes, w);
  EXPECT_EQ(r.constrainedness, Constrainedness::over);
  EXPECT_EQ(r.member_forces.size(), 4);
  EXPECT_LT(r.residual.norm(), 1e-9);

  const MatX jkt = node_submatrix(j, c.topology, apex).transpose();
  const VecX oracle = oracle::min_norm_normal_equations(jkt, w - fdes);
  EXPECT_TRUE(r.member_forces.isApprox(oracle, 1e-10));

  const MatX n = oracle::null_space(jkt);
  ASSERT_EQ(n.cols(), 1);
  const VecX dir = n.col(0).normalized();
  EXPECT_GE(oracle::null_space_sweep_min(r.member_forces, dir) + 1e-12, r.member_forces.norm());
}

TEST(Allocate, AnchorAndClampErrors) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  const MatX j = inverse_jacobian(c.topology, c.positions);
  EXPECT_THROW(allocate_member_forces(c.topology, j, node_id(0), Vec3::Zero(), Vec3::Zero()),
               AnchorNode);
  AllocationOptions clamp;
  clamp.clamp = true;
  try {
    allocate_member_forces(c.topology, j, *c.tip, Vec3(0, 0, 1000), Vec3::Zero(), clamp);
    FAIL() << "expected ForceLimitExceeded";
  } catch (const ForceLimitExceeded& e) {
    EXPECT_GT(std::abs(e.force()), 200.0);
  }
}

TEST(Classify, ByRankAndCount) {
  EXPECT_EQ(classify(3, 3), Constrainedness::fully);
  EXPECT_EQ(classify(3, 4), Constrainedness::over);
  EXPECT_EQ(classify(2, 4), Constrainedness::under);
}

TEST(GravityLoads, NodeMassPlusHalfOfEachIncidentMember) {
  Post s;
  const std::vector<double> nodes = {1.0, 0.5};
  const std::vector<double> members = {0.4};
  const VecX w = gravity_loads(s.topo, nodes, members);
  EXPECT_NEAR(w[5], -(0.5 + 0.2) * kGravity, 1e-12);
  EXPECT_NEAR(w[2], -(1.0 + 0.2) * kGravity, 1e-12);
  EXPECT_EQ(w[3], 0.0);
}

TEST(AllocateNodeSet, JointMatchesSingleNodeWhenAlone) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  const NodeId apex = *c.tip;
  const MatX j = inverse_jacobian(c.topology, c.positions);
  const Vec3 fdes(1, 2, 3), w(0, 0, -2);
  const auto single = allocate_member_forces(c.topology, j, apex, fdes, w);
  const std::vector<NodeId> nodes = {apex};
  const VecX joint = allocate_node_set(j, nodes, single.members, fdes, w);
  EXPECT_TRUE(joint.isApprox(single.member_forces, 1e-12));
}
