#pragma once

// Quasi-static position solvers.
//
// solve_positions inverts L = f(P) for the free nodes (rigid members).
// solve_equilibrium finds the rest state of the elastic truss: members are
// axial springs around their actuator lengths and contacts add penalty
// springs. Both are damped Gauss-Newton
// (Levenberg-Marquardt) iterations on free-node coordinates with the
// inverse Jacobian as the residual Jacobian.

#include <algorithm>
#include <cmath>
#include <vector>

#include "trussforge/contact.hpp"
#include "trussforge/truss.hpp"

namespace trussforge {

struct SolverConfig {
  int max_iterations = 50;
  double tolerance = 1e-6;         // m, max |f(P) - L| for solve_positions
  double force_tolerance = 1e-6;   // N, max free-node force imbalance for equilibrium
  double damping = 1e-3;           // initial Levenberg parameter, relative to diag(H)
  double step_limit = 0.05;        // m, max coordinate change per iteration

  void validate() const {
    if (!(tolerance > 0.0) || !(force_tolerance > 0.0)) {
      throw ConfigError("solver tolerances must be positive");
    }
    if (max_iterations < 1) throw ConfigError("solver needs at least one iteration");
    if (!(step_limit > 0.0) || !(damping >= 0.0)) throw ConfigError("bad solver damping/step");
  }
};

struct SolveResult {
  VecX positions;
  int iterations = 0;
  double residual = 0.0;  // m for solve_positions, N for solve_equilibrium
};

namespace detail {

struct FreeIndex {
  std::vector<NodeId> nodes;
  std::vector<int> column;  // per node: first free column, -1 for anchors

  explicit FreeIndex(const TrussTopology& topology)
      : nodes(topology.free_nodes()), column(topology.node_count(), -1) {
    for (std::size_t i = 0; i < nodes.size(); ++i) column[index(nodes[i])] = 3 * static_cast<int>(i);
  }
  Eigen::Index size() const { return 3 * static_cast<Eigen::Index>(nodes.size()); }
};

inline void apply_step(VecX& positions, const FreeIndex& fi, const VecX& step) {
  for (std::size_t i = 0; i < fi.nodes.size(); ++i) {
    positions.segment<3>(3 * index(fi.nodes[i])) += step.segment<3>(3 * i);
  }
}

/// Smallest-to-largest pivot ratio of an LDLT factorization; 0 when singular.
inline double conditioning(const MatX& h) {
  Eigen::LDLT<MatX> ldlt(h);
  const VecX d = ldlt.vectorD().cwiseAbs();
  const double mx = d.maxCoeff();
  return mx > 0.0 ? d.minCoeff() / mx : 0.0;
}

struct Evaluation {
  double cost = 0.0;
  VecX gradient;
  MatX hessian;
  double metric = 0.0;  // convergence measure
};

/// Shared Levenberg-Marquardt driver. `eval(P)` returns cost, gradient and
/// Gauss-Newton Hessian over free coordinates.
template <class Eval>
SolveResult levenberg_marquardt(const FreeIndex& fi, VecX positions, Eval&& eval,
                                double target, const SolverConfig& config) {
  SolveResult out;
  Evaluation cur = eval(positions);
  double mu = config.damping;
  int iter = 0;
  while (cur.metric > target) {
    if (iter >= config.max_iterations) {
      throw NoConvergence("position solve did not converge in " +
                          std::to_string(config.max_iterations) + " iterations (residual " +
                          std::to_string(cur.metric) + ")");
    }
    ++iter;
    MatX damped = cur.hessian;
    damped.diagonal() += mu * cur.hessian.diagonal();
    VecX step = damped.ldlt().solve(-cur.gradient);
    if (!step.allFinite()) throw NoConvergence("position solve produced a non-finite step");
    const double biggest = step.cwiseAbs().maxCoeff();
    if (biggest > config.step_limit) step *= config.step_limit / biggest;

    VecX trial = positions;
    apply_step(trial, fi, step);
    Evaluation next = eval(trial);
    if (next.cost < cur.cost || next.metric < cur.metric) {
      positions = std::move(trial);
      cur = std::move(next);
      mu = std::max(mu * 0.1, 1e-15);
    } else {
      mu = mu > 0.0 ? mu * 10.0 : 1e-6;
      if (mu > 1e12) {
        throw NoConvergence("position solve stalled (residual " + std::to_string(cur.metric) +
                            ")");
      }
    }
  }
  out.positions = std::move(positions);
  out.iterations = iter;
  out.residual = cur.metric;
  return out;
}

}  // namespace detail

/// P with f(P) = L. Anchors are taken from `guess` and never move.
inline SolveResult solve_positions(const TrussTopology& topology, const VecX& lengths,
                                   const VecX& guess, const SolverConfig& config = {}) {
  check_dimension(topology, guess);
  if (static_cast<std::size_t>(lengths.size()) != topology.member_count()) {
    throw DimensionMismatch("lengths size != member count");
  }
  config.validate();
  const detail::FreeIndex fi(topology);
  if (fi.nodes.empty()) {
    const VecX r = forward_lengths(topology, guess) - lengths;
    return {guess, 0, r.size() ? r.cwiseAbs().maxCoeff() : 0.0};
  }
  {
    const MatX jf = free_columns(inverse_jacobian(topology, guess), fi.nodes);
    if (numerical_rank(jf, 1e-9) < fi.size()) {
      throw UnderConstrained("free nodes are not fully constrained by the members");
    }
  }
  auto eval = [&](const VecX& p) {
    detail::Evaluation e;
    const VecX r = forward_lengths(topology, p) - lengths;
    const MatX jf = free_columns(inverse_jacobian(topology, p), fi.nodes);
    e.cost = 0.5 * r.squaredNorm();
    e.gradient = jf.transpose() * r;
    e.hessian = jf.transpose() * jf;
    e.metric = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    return e;
  };
  return detail::levenberg_marquardt(fi, guess, eval, config.tolerance, config);
}

/// Rest state of the elastic truss.
///
/// Minimizes  sum_m k/2 (l_m - L_m)^2 + sum_c k_c/2 pen_c^2 - W.P  over the
/// free coordinates. At the solution every free node satisfies
/// W - J^T lambda + F_contact = 0 with lambda = k (l - L).
template <class ContactFn>
SolveResult solve_equilibrium(const TrussTopology& topology, const VecX& rest_lengths,
                              double axial_stiffness, const VecX& loads, const VecX& guess,
                              ContactFn&& contacts, const SolverConfig& config = {}) {
  check_dimension(topology, guess);
  if (loads.size() != guess.size()) throw DimensionMismatch("loads size != 3N");
  const detail::FreeIndex fi(topology);
  if (fi.nodes.empty()) return {guess, 0, 0.0};
  const VecX origin = guess;

  bool checked = false;
  auto eval = [&](const VecX& p) {
    detail::Evaluation e;
    const VecX l = forward_lengths(topology, p);
    const VecX stretch = l - rest_lengths;
    e.gradient = VecX::Zero(fi.size());
    e.hessian = MatX::Zero(fi.size(), fi.size());
    e.cost = 0.5 * axial_stiffness * stretch.squaredNorm();
    for (std::size_t m = 0; m < topology.member_count(); ++m) {
      const Member& mem = topology.members()[m];
      const Vec3 u = (node_block(p, mem.a) - node_block(p, mem.b)) / l[m];
      const int ca = fi.column[index(mem.a)];
      const int cb = fi.column[index(mem.b)];
      const double f = axial_stiffness * stretch[m];
      const Eigen::Matrix3d kuu = axial_stiffness * u * u.transpose();
      if (ca >= 0) {
        e.gradient.segment<3>(ca) += f * u;
        e.hessian.block<3, 3>(ca, ca) += kuu;
      }
      if (cb >= 0) {
        e.gradient.segment<3>(cb) -= f * u;
        e.hessian.block<3, 3>(cb, cb) += kuu;
      }
      if (ca >= 0 && cb >= 0) {
        e.hessian.block<3, 3>(ca, cb) -= kuu;
        e.hessian.block<3, 3>(cb, ca) -= kuu;
      }
    }
    for (const PenaltyTerm& t : contacts(p)) {
      e.cost += 0.5 * t.stiffness * t.penetration * t.penetration;
      for (int i = 0; i < t.node_count; ++i) {
        const int ci = fi.column[index(t.nodes[i])];
        if (ci < 0) continue;
        e.gradient.segment<3>(ci) += t.stiffness * t.penetration * t.gradient[i];
        for (int j = 0; j < t.node_count; ++j) {
          const int cj = fi.column[index(t.nodes[j])];
          if (cj < 0) continue;
          e.hessian.block<3, 3>(ci, cj) += t.stiffness * t.gradient[i] * t.gradient[j].transpose();
        }
      }
    }
    for (std::size_t i = 0; i < fi.nodes.size(); ++i) {
      const Vec3 w = node_block(loads, fi.nodes[i]);
      e.gradient.segment<3>(3 * i) -= w;
      e.cost -= w.dot(node_block(p, fi.nodes[i]) - node_block(origin, fi.nodes[i]));
    }
    e.metric = e.gradient.cwiseAbs().maxCoeff();
    if (!checked) {
      checked = true;
      if (detail::conditioning(e.hessian) < 1e-12) {
        throw UnderConstrained("free nodes form a mechanism");
      }
    }
    return e;
  };
  return detail::levenberg_marquardt(fi, guess, eval, config.force_tolerance, config);
}

}  // namespace trussforge
