#pragma once

// Closed-loop runs: program -> hybrid controller -> actuators -> world,
// recorded at the high-level rate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trussforge/metrics.hpp"
#include "trussforge/program.hpp"
#include "trussforge/scenes.hpp"
#include "trussforge/trace.hpp"
#include "trussforge/world.hpp"

namespace trussforge {

struct Experiment {
  std::string name = "run";
  Scene scene;
  TrajectoryProgram program;
  ActuatorModel actuator;
  PiGains gains;
  SolverConfig solver;
  double dt = 0.01;
  int control_divider = 2;
  bool grasp_required = false;
  std::uint64_t seed = 1;
  std::string trajectory;  // suite label, if any
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDiverged = 3, kExitDropped = 4 };

struct RunResult {
  Trace trace;
  RunReport report;
  int exit_code = kExitOk;
  std::string failure;  // empty on success
};

inline World make_world(const Experiment& e) {
  World w;
  w.topology = e.scene.config.topology;
  w.nominal = e.scene.config.positions;
  w.node_masses = e.scene.config.node_masses;
  w.member_masses = e.scene.config.member_masses;
  w.actuator = e.actuator;
  w.gains = e.gains;
  w.solver = e.solver;
  w.env = e.scene.env;
  w.objects = e.scene.objects;
  w.grasp = e.scene.grasp;
  w.dt = e.dt;
  w.control_divider = e.control_divider;
  return w;
}

/// Fixed trace layout; see docs/formats.md.
inline std::vector<std::string> trace_columns(const World& w) {
  std::vector<std::string> c = {"time",     "segment",     "pos_window", "force_window",
                                "hold_window", "carry",    "ref_x",      "ref_y",
                                "ref_z",    "act_x",       "act_y",      "act_z",
                                "force_ref", "force_act",  "grasp_status", "grasp_object",
                                "normal_a", "normal_b"};
  const char* ax[3] = {"x", "y", "z"};
  for (std::size_t k = 0; k < w.topology.node_count(); ++k) {
    for (auto a : ax) c.push_back("n" + std::to_string(k) + "_des_" + a);
    for (auto a : ax) c.push_back("n" + std::to_string(k) + "_" + a);
  }
  for (std::size_t m = 0; m < w.topology.member_count(); ++m) {
    c.push_back("m" + std::to_string(m) + "_cmd");
    c.push_back("m" + std::to_string(m) + "_force");
    c.push_back("m" + std::to_string(m) + "_length");
    c.push_back("m" + std::to_string(m) + "_rest");
  }
  for (std::size_t j = 0; j < w.objects.size(); ++j) {
    for (auto a : ax) c.push_back("o" + std::to_string(j) + "_" + a);
  }
  return c;
}

/// One control decision: member commands plus what they were aiming at.
struct ControlDecision {
  VecX member_force;
  VecX desired_positions;  // 3N, per node
  double force_ref = 0.0;
};

inline ControlDecision decide(const Experiment& e, const World& w, const SimState& s,
                              const ProgramSample& sample) {
  const ControlSettings& ctl = e.scene.control;
  const Setpoint& sp = sample.setpoint;
  HybridCommand cmd;
  cmd.k_pos = ctl.k_pos;
  ControlDecision d;
  d.desired_positions = w.nominal;
  switch (ctl.mode) {
    case ControlMode::node:
      cmd.targets.push_back({ctl.node, sp.position, sp.force});
      d.force_ref = sp.force.norm();
      break;
    case ControlMode::grasp: {
      const GraspState& g = *s.grasp;
      const RigidObject& obj = s.objects.at(g.object);
      const double reach =
          support_extent(obj.half_extents, g.axis) + w.env.node_radius + sp.opening;
      cmd.targets.push_back({g.node_a, sp.position - reach * g.axis, sp.grip * g.axis});
      cmd.targets.push_back({g.node_b, sp.position + reach * g.axis, -sp.grip * g.axis});
      d.force_ref = sp.grip;
      break;
    }
    case ControlMode::member:
      d.force_ref = sp.force.x();
      break;
  }
  std::optional<VecX> hold;
  if (ctl.hold_feedback) hold = w.nominal;
  const MemberCommandSet set = control_step(w, s, cmd, hold);
  d.member_force = set.force;
  if (ctl.mode == ControlMode::member) {
    d.member_force[index(ctl.member)] = ctl.member_sign * sp.force.x();
  }
  for (const NodeTarget& t : cmd.targets) node_block(d.desired_positions, t.node) = t.position;
  return d;
}

inline double measured_force(const Experiment& e, const SimState& s) {
  const ControlSettings& ctl = e.scene.control;
  switch (ctl.mode) {
    case ControlMode::member:
      return ctl.member_sign * s.actuators[index(ctl.member)].measured_force;
    case ControlMode::node:
      return node_block(s.contact_force, ctl.node).norm();
    case ControlMode::grasp:
      return 0.5 * (s.grasp->normal_force[0] + s.grasp->normal_force[1]);
  }
  return 0.0;
}

inline void record(Trace& trace, const Experiment& e, const World& w, const SimState& s,
                   const ProgramSample& sample, const ControlDecision& d) {
  std::vector<double> row;
  row.reserve(trace.columns().size());
  const Vec3 act = controlled_point(e.scene, s.positions);
  const Vec3 ref = e.scene.control.mode == ControlMode::member ? Vec3::Zero()
                                                               : sample.setpoint.position;
  row.insert(row.end(), {s.time, static_cast<double>(sample.segment),
                         sample.windows.position ? 1.0 : 0.0, sample.windows.force ? 1.0 : 0.0,
                         sample.windows.hold ? 1.0 : 0.0, sample.carry ? 1.0 : 0.0, ref.x(),
                         ref.y(), ref.z(), act.x(), act.y(), act.z(), d.force_ref,
                         measured_force(e, s)});
  if (s.grasp) {
    row.insert(row.end(), {static_cast<double>(s.grasp->status),
                           static_cast<double>(s.grasp->object), s.grasp->normal_force[0],
                           s.grasp->normal_force[1]});
  } else {
    row.insert(row.end(), {0.0, 0.0, 0.0, 0.0});
  }
  for (std::size_t k = 0; k < w.topology.node_count(); ++k) {
    for (int a = 0; a < 3; ++a) row.push_back(d.desired_positions[3 * k + a]);
    for (int a = 0; a < 3; ++a) row.push_back(s.positions[3 * k + a]);
  }
  const VecX lengths = forward_lengths(w.topology, s.positions);
  for (std::size_t m = 0; m < w.topology.member_count(); ++m) {
    row.push_back(d.member_force[m]);
    row.push_back(s.actuators[m].measured_force);
    row.push_back(lengths[m]);
    row.push_back(s.actuators[m].length);
  }
  for (const RigidObject& o : s.objects) {
    for (int a = 0; a < 3; ++a) row.push_back(o.position[a]);
  }
  trace.append(row);
}

/// Runs the experiment to the end of its program. Simulation failures are
/// reported through the exit code; configuration errors throw.
inline RunResult simulate(const Experiment& e) {
  const World w = make_world(e);
  SimState s = make_initial_state(w, e.seed);
  RunResult out;
  out.trace = Trace(trace_columns(w));
  const auto n = static_cast<std::uint64_t>(std::llround(e.program.duration() / w.dt));
  ControlDecision d;
  try {
    for (std::uint64_t i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) * w.dt;
      const bool control = i % static_cast<std::uint64_t>(w.control_divider) == 0;
      if (!control && i < n) {
        tick(w, s, d.member_force);
        continue;
      }
      const ProgramSample sample = e.program.sample(t);
      if (s.grasp) {
        s.grasp->release_requested =
            sample.setpoint.grip <= 0.0 ||
            e.program.segments()[sample.segment].kind == SegmentKind::release;
      }
      if (control) d = decide(e, w, s, sample);
      record(out.trace, e, w, s, sample, d);
      if (i < n) tick(w, s, d.member_force);
    }
  } catch (const SimDiverged& ex) {
    out.exit_code = kExitDiverged;
    out.failure = ex.what();
  } catch (const NoConvergence& ex) {
    out.exit_code = kExitDiverged;
    out.failure = ex.what();
  } catch (const UnderConstrained& ex) {
    out.exit_code = kExitDiverged;
    out.failure = ex.what();
  }
  out.report = compute_report(out.trace);
  out.report.name = e.name;
  out.report.seed = e.seed;
  if (out.exit_code == kExitOk && e.grasp_required && out.report.grasp_dropped) {
    out.exit_code = kExitDropped;
    out.failure = "grasp dropped";
  }
  return out;
}

}  // namespace trussforge
