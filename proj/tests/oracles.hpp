#pragma once

// Independent reference computations for the tests. Nothing in here calls
// the library routine it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "trussforge/truss.hpp"

namespace oracle {

using trussforge::MatX;
using trussforge::TrussTopology;
using trussforge::Vec3;
using trussforge::VecX;

/// Member lengths straight from coordinates.
inline VecX lengths(const TrussTopology& t, const VecX& p) {
  VecX l(t.member_count());
  for (std::size_t m = 0; m < t.member_count(); ++m) {
    const auto& mem = t.members()[m];
    const auto a = static_cast<Eigen::Index>(3 * trussforge::index(mem.a));
    const auto b = static_cast<Eigen::Index>(3 * trussforge::index(mem.b));
    l[m] = std::sqrt((p.segment<3>(a) - p.segment<3>(b)).squaredNorm());
  }
  return l;
}

/// Central finite differences of the length map.
inline MatX fd_jacobian(const TrussTopology& t, const VecX& p, double h = 1e-6) {
  MatX j(t.member_count(), p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    VecX plus = p, minus = p;
    plus[c] += h;
    minus[c] -= h;
    j.col(c) = (lengths(t, plus) - lengths(t, minus)) / (2 * h);
  }
  return j;
}

/// Random complete graph on n nodes, coordinates in a 2 m cube, every pair
/// at least `min_sep` apart. Node 0 anchored.
struct RandomTruss {
  TrussTopology topology;
  VecX positions;
};

inline RandomTruss random_truss(std::mt19937_64& rng, int n, double min_sep = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Vec3 c(u(rng), u(rng), u(rng));
    bool ok = true;
    for (const Vec3& q : pts) ok = ok && (c - q).norm() >= min_sep;
    if (ok) pts.push_back(c);
  }
  std::vector<trussforge::Member> members;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      members.push_back({trussforge::node_id(a), trussforge::node_id(b)});
    }
  }
  RandomTruss out{TrussTopology(n, members, {trussforge::node_id(0)}), VecX(3 * n)};
  for (int k = 0; k < n; ++k) out.positions.segment<3>(3 * k) = pts[k];
  return out;
}

/// Minimum-norm solution of A x = b for full-row-rank A via the normal
/// equations of the transpose: x = A^T (A A^T)^{-1} b.
inline VecX min_norm_normal_equations(const MatX& a, const VecX& b) {
  const MatX aat = a * a.transpose();
  return a.transpose() * aat.llt().solve(b);
}

/// Null space of A from a full-pivot LU, independent of the SVD used by the
/// library's pseudoinverse.
inline MatX null_space(const MatX& a) { return Eigen::FullPivLU<MatX>(a).kernel(); }

/// 21 evenly spaced perturbations x + t n, t in [-span, span], along the
/// first null-space direction. Returns the smallest norm found.
inline double null_space_sweep_min(const VecX& x, const VecX& n, double span = 1.0,
                                   int samples = 21) {
  double best = INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double t = -span + 2.0 * span * i / (samples - 1);
    best = std::min(best, (x + t * n).norm());
  }
  return best;
}

/// Regular tetrahedron apex height for edge e.
inline double tetra_apex_height(double e) { return e * std::sqrt(2.0 / 3.0); }

/// Steady contact force of a node pushed by F = f + k_pos (d - p) into a
/// wall of stiffness k_env, with d the target depth behind the wall face.
inline double wall_contact_force(double f, double k_pos, double depth, double k_env) {
  return k_env * (f + k_pos * depth) / (k_env + k_pos);
}

}  // namespace oracle
