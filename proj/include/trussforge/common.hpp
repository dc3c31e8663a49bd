#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace trussforge {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Standard gravity used for every weight computation (m/s^2).
inline constexpr double kGravity = 9.81;

/// Members shorter than this have no meaningful direction (m).
inline constexpr double kDegenerateLength = 1e-9;

enum class NodeId : std::uint32_t {};
enum class MemberId : std::uint32_t {};

constexpr std::size_t index(NodeId n) { return static_cast<std::size_t>(n); }
constexpr std::size_t index(MemberId m) { return static_cast<std::size_t>(m); }
constexpr NodeId node_id(std::size_t i) { return static_cast<NodeId>(i); }
constexpr MemberId member_id(std::size_t i) { return static_cast<MemberId>(i); }

// Stacked 3N vectors (positions, loads, nodal forces) store node k at rows
// [3k, 3k+3).
inline auto node_block(VecX& stacked, NodeId k) { return stacked.segment<3>(3 * index(k)); }
inline auto node_block(const VecX& stacked, NodeId k) {
  return stacked.segment<3>(3 * index(k));
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateMember : public Error {
 public:
  explicit DegenerateMember(MemberId member)
      : Error("member " + std::to_string(index(member)) + " has coincident end nodes"),
        member_(member) {}
  DegenerateMember() : Error("coincident nodes") {}

  /// Empty when raised by member_length() outside any topology.
  std::optional<MemberId> member() const { return member_; }

 private:
  std::optional<MemberId> member_;
};

class InvalidTopology : public Error {
 public:
  using Error::Error;
};

class AnchorNode : public Error {
 public:
  explicit AnchorNode(NodeId node)
      : Error("node " + std::to_string(index(node)) + " is anchored"), node_(node) {}
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ForceLimitExceeded : public Error {
 public:
  ForceLimitExceeded(MemberId member, double force)
      : Error("member " + std::to_string(index(member)) + " force " + std::to_string(force) +
              " N exceeds the actuator limit"),
        member_(member),
        force_(force) {}
  MemberId member() const { return member_; }
  double force() const { return force_; }

 private:
  MemberId member_;
  double force_;
};

class SharedMemberConflict : public Error {
 public:
  explicit SharedMemberConflict(MemberId member)
      : Error("member " + std::to_string(index(member)) + " is claimed by two target nodes"),
        member_(member) {}
  MemberId member() const { return member_; }

 private:
  MemberId member_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class UnderConstrained : public Error {
 public:
  using Error::Error;
};

class SimDiverged : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace trussforge
