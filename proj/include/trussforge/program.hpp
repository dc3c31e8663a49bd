#pragma once

// Trajectory programs: time-contiguous segments over a controlled point,
// a force setpoint, a grip force and a grasp opening.
//
// The controlled point is the target node itself (single-node scenes) or
// the midpoint of the grasp pair. `force` is the nodal force setpoint for a
// single node (or the member force magnitude for a lone member); `grip` is
// the per-node squeeze force of a grasp.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "trussforge/common.hpp"

namespace trussforge {

enum class SegmentKind { hold, line, circle, force_ramp, grasp, release };
enum class CirclePlane { xy, yz, xz, oblique };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::hold: return "hold";
    case SegmentKind::line: return "line";
    case SegmentKind::circle: return "circle";
    case SegmentKind::force_ramp: return "force_ramp";
    case SegmentKind::grasp: return "grasp";
    case SegmentKind::release: return "release";
  }
  return "?";
}

inline SegmentKind segment_kind_from_string(std::string_view s) {
  for (auto k : {SegmentKind::hold, SegmentKind::line, SegmentKind::circle,
                 SegmentKind::force_ramp, SegmentKind::grasp, SegmentKind::release}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown segment type '" + std::string(s) + "'");
}

inline const char* to_string(CirclePlane p) {
  switch (p) {
    case CirclePlane::xy: return "xy";
    case CirclePlane::yz: return "yz";
    case CirclePlane::xz: return "xz";
    case CirclePlane::oblique: return "oblique";
  }
  return "?";
}

inline CirclePlane circle_plane_from_string(std::string_view s) {
  for (auto p : {CirclePlane::xy, CirclePlane::yz, CirclePlane::xz, CirclePlane::oblique}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown circle plane '" + std::string(s) + "'");
}

/// In-plane basis (a, b) of a circle plane. `a` points from the centre to
/// the starting point, which is the lowest point whenever the plane is not
/// horizontal. For oblique the normal is (1,1,1)/sqrt(3).
inline std::pair<Vec3, Vec3> circle_basis(CirclePlane plane) {
  Vec3 n, a;
  switch (plane) {
    case CirclePlane::xy: n = Vec3::UnitZ(); a = -Vec3::UnitY(); break;
    case CirclePlane::yz: n = Vec3::UnitX(); a = -Vec3::UnitZ(); break;
    case CirclePlane::xz: n = -Vec3::UnitY(); a = -Vec3::UnitZ(); break;
    case CirclePlane::oblique:
      n = Vec3(1, 1, 1).normalized();
      a = Vec3(1, 1, -2).normalized();
      break;
  }
  return {a, n.cross(a)};
}

struct Setpoint {
  Vec3 position = Vec3::Zero();  // m
  Vec3 force = Vec3::Zero();     // N
  double grip = 0.0;             // N per grasp node
  double opening = 0.0;          // m, clearance of each grasp node from its face

  friend bool operator==(const Setpoint&, const Setpoint&) = default;
};

/// Which metric windows a segment belongs to.
struct Windows {
  bool position = false;  // position RMSE
  bool force = false;     // force RMSE / overshoot
  bool hold = false;      // holding-phase error

  friend bool operator==(const Windows&, const Windows&) = default;
};

struct Segment {
  SegmentKind kind = SegmentKind::hold;
  double duration = 0.0;  // s
  Setpoint start;
  Setpoint end;
  bool smooth = true;     // minimum-jerk time scaling (line, circle)
  // circle only
  Vec3 center = Vec3::Zero();
  Vec3 axis_a = Vec3::UnitX();
  Vec3 axis_b = Vec3::UnitY();
  double radius = 0.0;
  Windows windows;
  std::string label;

  /// Carrying: a motion or hold while a grip is commanded throughout.
  bool carry() const {
    return (kind == SegmentKind::line || kind == SegmentKind::circle ||
            kind == SegmentKind::hold) &&
           start.grip > 0.0 && end.grip > 0.0;
  }
};

struct ProgramSample {
  Setpoint setpoint;
  std::size_t segment = 0;
  Windows windows;
  bool carry = false;
};

/// Minimum-jerk profile on [0, 1].
inline double min_jerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

class TrajectoryProgram {
 public:
  TrajectoryProgram() = default;
  TrajectoryProgram(Setpoint initial, std::vector<Segment> segments)
      : initial_(std::move(initial)), segments_(std::move(segments)) {
    double t = 0.0;
    starts_.reserve(segments_.size());
    for (const Segment& s : segments_) {
      if (!(s.duration >= 0.0) || !std::isfinite(s.duration)) {
        throw ConfigError("segment duration must be finite and >= 0");
      }
      starts_.push_back(t);
      t += s.duration;
    }
    duration_ = t;
  }

  double duration() const { return duration_; }
  const Setpoint& initial() const { return initial_; }
  const std::vector<Segment>& segments() const { return segments_; }
  double segment_start(std::size_t i) const { return starts_.at(i); }

  ProgramSample sample(double t) const {
    ProgramSample out;
    if (segments_.empty()) {
      out.setpoint = initial_;
      return out;
    }
    std::size_t i = 0;
    // Last segment whose start <= t; zero-length segments are skipped.
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      if (starts_[k] <= t && (segments_[k].duration > 0.0 || k + 1 == segments_.size())) i = k;
    }
    const Segment& seg = segments_[i];
    out.segment = i;
    out.windows = seg.windows;
    out.carry = seg.carry();
    const double s = seg.duration > 0.0 ? std::clamp((t - starts_[i]) / seg.duration, 0.0, 1.0)
                                        : 1.0;
    out.setpoint = evaluate(seg, s);
    return out;
  }

  static Setpoint evaluate(const Segment& seg, double s) {
    Setpoint p;
    const double sp = seg.smooth ? min_jerk(s) : s;
    auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
    p.force = seg.start.force + (seg.end.force - seg.start.force) * s;
    p.grip = lerp(seg.start.grip, seg.end.grip, s);
    p.opening = lerp(seg.start.opening, seg.end.opening, s);
    switch (seg.kind) {
      case SegmentKind::circle: {
        const double th = 2.0 * std::numbers::pi * sp;
        p.position = seg.center + seg.radius * (std::cos(th) * seg.axis_a +
                                                std::sin(th) * seg.axis_b);
        break;
      }
      case SegmentKind::line:
        p.position = seg.start.position + (seg.end.position - seg.start.position) * sp;
        break;
      case SegmentKind::grasp:
        // The grasp point stays put while the pair closes and squeezes.
        p.position = seg.start.position;
        break;
      default:
        p.position = seg.start.position + (seg.end.position - seg.start.position) * s;
        break;
    }
    return p;
  }

 private:
  Setpoint initial_;
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double duration_ = 0.0;
};

/// Predicate deciding whether a controlled-point position is reachable.
using ReachableFn = std::function<bool(const Vec3&)>;

/// Incremental program construction from a starting setpoint.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(Setpoint start) : initial_(start), cur_(start) {}

  const Setpoint& current() const { return cur_; }

  ProgramBuilder& hold(double duration, Windows w = {}, std::string label = "hold") {
    Segment s = make(SegmentKind::hold, duration, std::move(label));
    s.windows = w;
    return push(s);
  }

  ProgramBuilder& line_to(const Vec3& target, double duration, std::string label = "line",
                          bool smooth = true) {
    if (!(duration > 0.0)) throw ConfigError("line duration must be positive");
    Segment s = make(SegmentKind::line, duration, std::move(label));
    s.end.position = target;
    s.smooth = smooth;
    s.windows = {true, true, false};
    return push(s);
  }

  ProgramBuilder& line_by(const Vec3& delta, double duration, std::string label = "line") {
    return line_to(cur_.position + delta, duration, std::move(label));
  }

  /// Full circle starting and ending at the current point, which is taken
  /// as the point centre + radius * a of the plane basis.
  ProgramBuilder& circle(CirclePlane plane, double radius, double period,
                         const ReachableFn& reachable = {}, std::string label = "circle") {
    if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
    if (!(period > 0.0)) throw ConfigError("circle period must be positive");
    Segment s = make(SegmentKind::circle, period, std::move(label));
    std::tie(s.axis_a, s.axis_b) = circle_basis(plane);
    s.radius = radius;
    s.center = cur_.position - radius * s.axis_a;
    s.windows = {true, true, false};
    if (reachable) {
      for (int k = 0; k < 16; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 16.0;
        const Vec3 p = s.center + radius * (std::cos(th) * s.axis_a + std::sin(th) * s.axis_b);
        if (!reachable(p)) {
          throw Unreachable(std::string(to_string(plane)) + " circle of radius " +
                            std::to_string(radius) + " m leaves the workspace");
        }
      }
    }
    return push(s);
  }

  /// Linear force ramp at `rate` to `target`, then a hold. The hold is the
  /// holding-phase window.
  ProgramBuilder& force_ramp(const Vec3& target, double rate, double hold_time) {
    if (!(rate > 0.0)) throw ConfigError("ramp rate must be positive");
    if (!(hold_time >= 0.0)) throw ConfigError("hold time must be >= 0");
    const double t_ramp = (target - cur_.force).norm() / rate;
    if (t_ramp > 0.0) {
      Segment s = make(SegmentKind::force_ramp, t_ramp, "ramp");
      s.end.force = target;
      s.windows = {false, true, false};
      push(s);
    }
    Segment h = make(SegmentKind::hold, hold_time, "hold");
    h.windows = {false, true, true};
    return push(h);
  }

  /// Close to zero opening over the first 40 % of `duration`, ramp the grip
  /// at `rate`, then hold for whatever time is left.
  ProgramBuilder& grasp(double force, double rate, double duration) {
    if (!(force >= 0.0) || !(rate > 0.0)) throw ConfigError("bad grasp force/rate");
    const double t_close = 0.4 * duration;
    const double t_ramp = std::abs(force - cur_.grip) / rate;
    if (t_close + t_ramp > duration) throw ConfigError("grasp duration shorter than its force ramp");
    Segment close = make(SegmentKind::grasp, t_close, "grasp");
    close.end.opening = 0.0;
    push(close);
    Segment ramp = make(SegmentKind::grasp, t_ramp, "grasp");
    ramp.end.grip = force;
    push(ramp);
    return push(make(SegmentKind::grasp, duration - t_close - t_ramp, "grasp"));
  }

  ProgramBuilder& release(double opening, double duration) {
    Segment s = make(SegmentKind::release, duration, "release");
    s.end.grip = 0.0;
    s.end.opening = opening;
    return push(s);
  }

  /// Replace the windows of the last segment.
  ProgramBuilder& windows(Windows w) {
    if (segments_.empty()) throw ConfigError("no segment to set windows on");
    segments_.back().windows = w;
    return *this;
  }

  TrajectoryProgram build() const { return TrajectoryProgram(initial_, segments_); }

 private:
  Segment make(SegmentKind kind, double duration, std::string label) const {
    Segment s;
    s.kind = kind;
    s.duration = duration;
    s.start = cur_;
    s.end = cur_;
    s.label = std::move(label);
    return s;
  }

  ProgramBuilder& push(const Segment& s) {
    segments_.push_back(s);
    cur_ = s.end;
    if (s.kind == SegmentKind::circle) cur_.position = s.start.position;
    return *this;
  }

  Setpoint initial_;
  Setpoint cur_;
  std::vector<Segment> segments_;
};

/// Force ramp at a fixed point: ramp `direction * target` at `rate`, hold.
inline TrajectoryProgram force_ramp_program(double target, double rate, double hold_time,
                                            const Vec3& direction = Vec3::UnitX(),
                                            const Vec3& position = Vec3::Zero()) {
  if (!(target >= 0.0)) throw ConfigError("force target must be >= 0");
  Setpoint s0;
  s0.position = position;
  return ProgramBuilder(s0).force_ramp(target * direction.normalized(), rate, hold_time).build();
}

/// One circle of `radius` about `center`, starting at centre + radius * a.
inline TrajectoryProgram circle_program(const Vec3& center, double radius, CirclePlane plane,
                                        double period, const ReachableFn& reachable = {}) {
  Setpoint s0;
  s0.position = center + radius * circle_basis(plane).first;
  return ProgramBuilder(s0).circle(plane, radius, period, reachable).build();
}

}  // namespace trussforge
