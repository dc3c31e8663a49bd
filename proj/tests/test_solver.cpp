#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trussforge/configurations.hpp"
#include "trussforge/solver.hpp"

using namespace trussforge;

namespace {

auto no_contacts = [](const VecX&) { return std::vector<PenaltyTerm>{}; };

}  // namespace

TEST(SolvePositions, TetraApexFromLengthsAlone) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  const NodeId apex = *c.tip;
  VecX guess = c.positions;
  node_block(guess, apex) += Vec3(0.05, -0.03, -0.1);
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  const SolveResult r = solve_positions(c.topology, VecX::Ones(6), guess, cfg);
  EXPECT_NEAR(node_block(r.positions, apex).z() - node_block(r.positions, node_id(0)).z(),
              oracle::tetra_apex_height(1.0), 1e-9);
  EXPECT_LT((oracle::lengths(c.topology, r.positions) - VecX::Ones(6)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(SolvePositions, WarmStartAfterMillimetre) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  VecX l = VecX::Ones(6);
  l[index(c.topology.incident(*c.tip)[0])] += 1e-3;
  const SolveResult r = solve_positions(c.topology, l, c.positions);
  EXPECT_LE(r.iterations, 5);
  EXPECT_LE(r.residual, 1e-6);
}

TEST(SolvePositions, MechanismIsUnderConstrained) {
  const TrussTopology t(3, {{node_id(0), node_id(2)}, {node_id(1), node_id(2)}},
                        {node_id(0), node_id(1)});
  VecX p(9);
  p << 0, 0, 0, 1, 0, 0, 0.5, 0, 1;
  EXPECT_THROW(solve_positions(t, oracle::lengths(t, p), p), UnderConstrained);
}

TEST(SolvePositions, ImpossibleLengthsDoNotConverge) {
  const Configuration c = build_configuration(ConfigurationId::tetrahedron);
  VecX l = VecX::Ones(6);
  for (MemberId m : c.topology.incident(*c.tip)) l[index(m)] = 0.3;  // apex cannot reach
  SolverConfig cfg;
  cfg.max_iterations = 30;
  EXPECT_THROW(solve_positions(c.topology, l, c.positions, cfg), NoConvergence);
}

TEST(SolveEquilibrium, SingleBarSagsByWeightOverStiffness) {
  // A vertical bar with three horizontal braces so the node is held
  // laterally; only the bar resists z to first order.
  const TrussTopology braced(5,
                             {{node_id(0), node_id(1)}, {node_id(2), node_id(1)},
                              {node_id(3), node_id(1)}, {node_id(4), node_id(1)}},
                             {node_id(0), node_id(2), node_id(3), node_id(4)});
  VecX q(15);
  q << 0, 0, 0, 0, 0, 1, 1, 0, 1, 0, 1, 1, -1, -1, 1;
  const VecX rest = oracle::lengths(braced, q);
  VecX loads = VecX::Zero(15);
  loads[5] = -20.0;
  const double k = 2e4;
  const SolveResult r = solve_equilibrium(braced, rest, k, loads, q, no_contacts);
  EXPECT_NEAR(r.positions[5], 1.0 - 20.0 / k, 1e-6);
  EXPECT_LE(r.residual, 1e-6);
}

TEST(SolveEquilibrium, ForceBalanceAtSolution) {
  const Configuration c = build_configuration(ConfigurationId::pyramid);
  const double k = 2e4;
  VecX rest = forward_lengths(c.topology, c.positions);
  rest[0] -= 0.002;  // one leg shortened: pre-stress
  VecX loads = gravity_loads(c.topology, c.node_masses, c.member_masses);
  const SolveResult r = solve_equilibrium(c.topology, rest, k, loads, c.positions, no_contacts);
  const VecX lambda = k * (forward_lengths(c.topology, r.positions) - rest);
  const VecX f = nodal_forces(inverse_jacobian(c.topology, r.positions), lambda, loads);
  EXPECT_LT(node_block(f, *c.tip).norm(), 1e-6);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
