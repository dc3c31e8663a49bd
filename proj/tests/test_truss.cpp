#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trussforge/truss.hpp"

using namespace trussforge;

namespace {

TrussTopology bar() { return TrussTopology(2, {{node_id(0), node_id(1)}}, {node_id(0)}); }

VecX stack(std::initializer_list<Vec3> pts) {
  VecX p(3 * pts.size());
  int k = 0;
  for (const Vec3& v : pts) p.segment<3>(3 * k++) = v;
  return p;
}

}  // namespace

TEST(MemberLength, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(member_length(Vec3(0, 0, 0), Vec3(3, 4, 0)), 5.0);
  EXPECT_DOUBLE_EQ(member_length(Vec3(1, 1, 1), Vec3(1, 1, 3)), 2.0);
}

TEST(MemberLength, CoincidentNodesThrow) {
  EXPECT_THROW(member_length(Vec3(1, 2, 3), Vec3(1, 2, 3)), DegenerateMember);
}

TEST(ForwardLengths, UnitBar) {
  const VecX l = forward_lengths(bar(), stack({{0, 0, 0}, {0, 0, 1}}));
  ASSERT_EQ(l.size(), 1);
  EXPECT_DOUBLE_EQ(l[0], 1.0);
}

TEST(ForwardLengths, WrongSizeThrows) {
  EXPECT_THROW(forward_lengths(bar(), VecX::Zero(5)), DimensionMismatch);
}

TEST(ForwardLengths, DegenerateMemberNamesTheMember) {
  try {
    forward_lengths(bar(), stack({{0, 0, 0}, {0, 0, 0}}));
    FAIL() << "expected DegenerateMember";
  } catch (const DegenerateMember& e) {
    ASSERT_TRUE(e.member().has_value());
    EXPECT_EQ(index(*e.member()), 0u);
  }
}

TEST(Topology, RejectsSelfLoopAndDuplicates) {
  EXPECT_THROW(TrussTopology(2, {{node_id(1), node_id(1)}}, {}), InvalidTopology);
  EXPECT_THROW(TrussTopology(2, {{node_id(0), node_id(1)}, {node_id(1), node_id(0)}}, {}),
               InvalidTopology);
  EXPECT_THROW(TrussTopology(2, {{node_id(0), node_id(2)}}, {}), InvalidTopology);
  EXPECT_THROW(TrussTopology(2, {}, {node_id(5)}), InvalidTopology);
}

TEST(Topology, IncidenceAndFreeNodes) {
  const TrussTopology t(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, {node_id(0)});
  EXPECT_EQ(t.incident(node_id(1)).size(), 2u);
  EXPECT_EQ(t.incident(node_id(0)).size(), 1u);
  EXPECT_EQ(t.free_nodes().size(), 2u);
  EXPECT_EQ(t.dof(), 9u);
}

TEST(InverseJacobian, AxialBarRow) {
  // Pulling node 1 further along +x lengthens the bar; pushing node 0 does too.
  const TrussTopology t(2, {{node_id(0), node_id(1)}}, {});
  const MatX j = inverse_jacobian(t, stack({{0, 0, 0}, {2, 0, 0}}));
  Eigen::RowVectorXd expected(6);
  expected << -1, 0, 0, 1, 0, 0;
  EXPECT_TRUE(j.row(0).isApprox(expected, 1e-15));
}

TEST(InverseJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rt = oracle::random_truss(rng, 4 + trial % 4);
    const MatX j = inverse_jacobian(rt.topology, rt.positions);
    const MatX fd = oracle::fd_jacobian(rt.topology, rt.positions);
    EXPECT_LT((j - fd).norm() / fd.norm(), 1e-6) << "trial " << trial;
  }
}

TEST(InverseJacobian, RigidTranslationIsInTheNullSpace) {
  std::mt19937_64 rng(7);
  const auto rt = oracle::random_truss(rng, 6);
  VecX shift(rt.positions.size());
  for (Eigen::Index k = 0; k < shift.size(); k += 3) shift.segment<3>(k) = Vec3(0.3, -0.2, 0.7);
  EXPECT_LT((inverse_jacobian(rt.topology, rt.positions) * shift).norm(), 1e-12);
}

TEST(NodeSubmatrix, RowsAreIncidentMembers) {
  const TrussTopology t(3, {{node_id(0), node_id(1)}, {node_id(1), node_id(2)}}, {node_id(0)});
  const VecX p = stack({{0, 0, 0}, {1, 0, 0}, {1, 2, 0}});
  const MatX j = inverse_jacobian(t, p);
  const MatX jk = node_submatrix(j, t, node_id(1));
  ASSERT_EQ(jk.rows(), 2);
  ASSERT_EQ(jk.cols(), 3);
  EXPECT_TRUE(jk.row(0).isApprox(Eigen::RowVector3d(1, 0, 0)));
  EXPECT_TRUE(jk.row(1).isApprox(Eigen::RowVector3d(0, -1, 0)));
  EXPECT_THROW(node_submatrix(j, t, node_id(0)), AnchorNode);
}
