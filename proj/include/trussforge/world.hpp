#pragma once

// Closed-loop quasi-static world.
//
// Members are stiff axial springs around their actuator lengths, so the
// structure settles where every free node is in force balance. Geometric
// lengths therefore differ from actuator lengths by lambda / k_ax; that
// deflection is what the loadcells read.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "trussforge/actuator.hpp"
#include "trussforge/contact.hpp"
#include "trussforge/controller.hpp"
#include "trussforge/solver.hpp"
#include "trussforge/statics.hpp"

namespace trussforge {

struct World {
  TrussTopology topology;
  VecX nominal;                      // starting positions; anchors stay here
  std::vector<double> node_masses;   // kg
  std::vector<double> member_masses; // kg
  ActuatorModel actuator;
  PiGains gains;
  SolverConfig solver;
  Environment env;
  std::vector<RigidObject> objects;
  std::optional<GraspState> grasp;   // grasp pair, if the scene has one
  double dt = 0.01;                  // low-level period, s
  int control_divider = 2;           // high-level runs every n ticks

  void validate() const {
    check_dimension(topology, nominal);
    if (node_masses.size() != topology.node_count() ||
        member_masses.size() != topology.member_count()) {
      throw ConfigError("mass vectors do not match the topology");
    }
    actuator.validate();
    gains.validate();
    solver.validate();
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (control_divider < 1) throw ConfigError("control_divider must be >= 1");
    if (grasp) {
      if (grasp->object >= objects.size()) throw ConfigError("grasp object index out of range");
      if (topology.is_anchor(grasp->node_a) || topology.is_anchor(grasp->node_b)) {
        throw ConfigError("grasp nodes must be free");
      }
    }
  }
};

struct SimState {
  VecX positions;
  std::vector<ActuatorState> actuators;
  std::vector<RigidObject> objects;
  std::optional<GraspState> grasp;
  VecX loads;           // gravity + payload used by the last solve
  VecX contact_force;   // contact force acting on each node
  std::vector<PenaltyTerm> contacts;
  double time = 0.0;
  std::uint64_t ticks = 0;
  int solver_iterations = 0;
  std::mt19937_64 rng;
};

/// Gravity on the truss plus the share of a held object's weight that
/// friction transfers to each grasp node.
inline VecX external_loads(const World& world, const std::vector<RigidObject>& objects,
                           const std::optional<GraspState>& grasp) {
  VecX w = gravity_loads(world.topology, world.node_masses, world.member_masses);
  if (grasp && grasp_holds_object(*grasp) && !grasp->supported) {
    const RigidObject& obj = objects.at(grasp->object);
    const double half = 0.5 * obj.mass * kGravity;
    const NodeId nodes[2] = {grasp->node_a, grasp->node_b};
    for (int i = 0; i < 2; ++i) {
      double share = half;
      if (grasp->status == GraspStatus::slipping) {
        share = std::min(half, obj.friction * grasp->normal_force[i]);
      }
      w[3 * index(nodes[i]) + 2] -= share;
    }
  }
  return w;
}

/// Member forces that hold the nominal pose against `loads` (minimum norm).
inline VecX holding_forces(const TrussTopology& topology, const VecX& positions, const VecX& loads) {
  const std::vector<NodeId> free = topology.free_nodes();
  std::vector<MemberId> members;
  for (std::size_t m = 0; m < topology.member_count(); ++m) {
    const Member& mem = topology.members()[m];
    if (!topology.is_anchor(mem.a) || !topology.is_anchor(mem.b)) members.push_back(member_id(m));
  }
  VecX lambda = VecX::Zero(topology.member_count());
  if (free.empty()) return lambda;
  VecX w(3 * free.size());
  for (std::size_t i = 0; i < free.size(); ++i) w.segment<3>(3 * i) = node_block(loads, free[i]);
  const VecX sub = allocate_node_set(inverse_jacobian(topology, positions), free, members,
                                     VecX::Zero(w.size()), w);
  for (std::size_t i = 0; i < members.size(); ++i) lambda[index(members[i])] = sub[i];
  return lambda;
}

namespace detail {

inline void refresh_contacts(const World& world, SimState& s) {
  s.contacts = contact_terms(world.topology, s.positions, world.env, s.objects, s.grasp);
  s.contact_force = contact_forces_on_nodes(world.topology.node_count(), s.contacts);
}

}  // namespace detail

/// Starting state: the structure sits exactly at `world.nominal`, with
/// actuator lengths preloaded so members already carry the gravity-holding
/// forces.
inline SimState make_initial_state(const World& world, std::uint64_t seed) {
  world.validate();
  SimState s;
  s.rng.seed(seed);
  s.positions = world.nominal;
  s.objects = world.objects;
  s.grasp = world.grasp;
  s.loads = external_loads(world, s.objects, s.grasp);

  const VecX l0 = forward_lengths(world.topology, world.nominal);
  const VecX lambda = holding_forces(world.topology, world.nominal, s.loads);
  s.actuators.resize(world.topology.member_count());
  for (std::size_t m = 0; m < s.actuators.size(); ++m) {
    ActuatorState& a = s.actuators[m];
    a.length = l0[m] - lambda[m] / world.actuator.axial_stiffness;
    if (a.length < world.actuator.min_length || a.length > world.actuator.max_length) {
      throw InvalidGeometry("member " + std::to_string(m) + " starts outside the actuator range");
    }
    a.true_force = lambda[m];
    a.measured_force = lambda[m];
    a.commanded_force = lambda[m];
  }
  detail::refresh_contacts(world, s);
  return s;
}

/// Member commands from the hybrid law, evaluated at the current state.
inline MemberCommandSet control_step(const World& world, const SimState& s,
                                     const HybridCommand& command,
                                     const std::optional<VecX>& hold_positions) {
  CommandOptions opts;
  opts.allocation.force_limit = world.actuator.force_limit;
  opts.hold_positions = hold_positions;
  MemberCommandSet out = compute_member_commands(
      world.topology, inverse_jacobian(world.topology, s.positions), s.positions, command, s.loads,
      opts);
  out.time = s.time;
  return out;
}

/// One low-level period.
///
/// Actuators move on the last reading first. The truss then settles under the
/// new lengths (warm-started) and the loadcells and contacts see the result.
inline void tick(const World& world, SimState& s, const VecX& member_commands) {
  const TrussTopology& topo = world.topology;
  if (static_cast<std::size_t>(member_commands.size()) != topo.member_count()) {
    throw DimensionMismatch("member command vector size != member count");
  }
  VecX rest(topo.member_count());
  for (std::size_t m = 0; m < topo.member_count(); ++m) {
    s.actuators[m] =
        advance_length(s.actuators[m], member_commands[m], world.dt, world.actuator, world.gains)
            .state;
    rest[m] = s.actuators[m].length;
  }

  s.loads = external_loads(world, s.objects, s.grasp);
  const VecX start = s.positions;
  auto contacts = [&](const VecX& p) {
    return contact_terms(topo, p, world.env, s.objects, s.grasp, &start);
  };
  const SolveResult solved = solve_equilibrium(topo, rest, world.actuator.axial_stiffness, s.loads,
                                               s.positions, contacts, world.solver);
  for (NodeId n : topo.free_nodes()) {
    const double moved = (node_block(solved.positions, n) - node_block(s.positions, n)).norm();
    if (moved > world.solver.step_limit) {
      throw SimDiverged("node " + std::to_string(index(n)) + " jumped " + std::to_string(moved) +
                        " m in one tick");
    }
  }
  s.positions = solved.positions;
  s.solver_iterations = solved.iterations;

  const VecX lengths = forward_lengths(topo, s.positions);
  for (std::size_t m = 0; m < topo.member_count(); ++m) {
    measure_force(s.actuators[m], LoadContext{lengths[m]}, world.actuator, s.rng);
  }

  detail::refresh_contacts(world, s);
  if (s.grasp) {
    GraspState& g = *s.grasp;
    if (g.status == GraspStatus::free) {
      // An open pair takes hold of whichever object it closes on.
      for (std::size_t j = 0; j < s.objects.size(); ++j) {
        GraspState probe = g;
        probe.object = j;
        const auto n = grasp_normal_forces(s.contacts, probe);
        if (n[0] > 0.0 && n[1] > 0.0) {
          g.object = j;
          break;
        }
      }
    }
    grasp_update(*s.grasp, s.objects, world.env, s.positions,
                 grasp_normal_forces(s.contacts, *s.grasp), world.dt);
  }
  ++s.ticks;
  s.time = static_cast<double>(s.ticks) * world.dt;
}

}  // namespace trussforge
