#include <gtest/gtest.h>

#include "trussforge/program.hpp"
#include "trussforge/scenes.hpp"

using namespace trussforge;

TEST(MinJerk, EndpointsAndMidpoint) {
  EXPECT_EQ(min_jerk(0.0), 0.0);
  EXPECT_EQ(min_jerk(1.0), 1.0);
  EXPECT_DOUBLE_EQ(min_jerk(0.5), 0.5);
  // Zero slope at both ends.
  const double h = 1e-6;
  EXPECT_LT(min_jerk(h) / h, 1e-9);
  EXPECT_LT((1.0 - min_jerk(1.0 - h)) / h, 1e-9);
}

TEST(Program, ForceRampTimingAndWindows) {
  const TrajectoryProgram p = force_ramp_program(50.0, 10.0, 10.0);
  ASSERT_EQ(p.segments().size(), 2u);
  EXPECT_DOUBLE_EQ(p.duration(), 15.0);
  EXPECT_NEAR(p.sample(2.5).setpoint.force.x(), 25.0, 1e-12);
  EXPECT_NEAR(p.sample(12.0).setpoint.force.x(), 50.0, 1e-12);
  EXPECT_FALSE(p.sample(2.5).windows.hold);
  EXPECT_TRUE(p.sample(2.5).windows.force);
  EXPECT_TRUE(p.sample(12.0).windows.hold);
}

TEST(Program, CircleClosesOnItself) {
  for (auto plane : {CirclePlane::xy, CirclePlane::yz, CirclePlane::xz, CirclePlane::oblique}) {
    const Vec3 c(0.1, -0.2, 0.8);
    const TrajectoryProgram p = circle_program(c, 0.2, plane, 100.0);
    const Vec3 a = p.sample(0.0).setpoint.position;
    const Vec3 b = p.sample(100.0).setpoint.position;
    EXPECT_LT((a - b).norm(), 1e-12) << to_string(plane);
    EXPECT_NEAR((p.sample(37.0).setpoint.position - c).norm(), 0.2, 1e-12);
    // Stays in its plane.
    const auto [u, v] = circle_basis(plane);
    const Vec3 n = u.cross(v);
    EXPECT_NEAR((p.sample(61.0).setpoint.position - c).dot(n), 0.0, 1e-12);
  }
}

TEST(Program, CircleBasisIsOrthonormal) {
  for (auto plane : {CirclePlane::xy, CirclePlane::yz, CirclePlane::xz, CirclePlane::oblique}) {
    const auto [a, b] = circle_basis(plane);
    EXPECT_NEAR(a.norm(), 1.0, 1e-15);
    EXPECT_NEAR(b.norm(), 1.0, 1e-15);
    EXPECT_NEAR(a.dot(b), 0.0, 1e-15);
  }
}

TEST(Program, SetpointsContinuousAcrossSegments) {
  Setpoint s0;
  s0.position = Vec3(0, 0, 1);
  s0.opening = 0.02;
  const TrajectoryProgram p = ProgramBuilder(s0)
                                  .grasp(30.0, 10.0, 6.0)
                                  .hold(2.0)
                                  .line_by(Vec3(0.3, 0, 0), 20.0)
                                  .circle(CirclePlane::xz, 0.1, 30.0)
                                  .line_by(Vec3(0, 0, -0.2), 10.0)
                                  .release(0.05, 5.0)
                                  .build();
  for (std::size_t i = 1; i < p.segments().size(); ++i) {
    const double t = p.segment_start(i);
    const Setpoint before = p.sample(t - 1e-9).setpoint;
    const Setpoint after = p.sample(t).setpoint;
    EXPECT_LT((before.position - after.position).norm(), 1e-6) << "segment " << i;
    EXPECT_NEAR(before.grip, after.grip, 1e-6);
    EXPECT_NEAR(before.opening, after.opening, 1e-6);
  }
  EXPECT_DOUBLE_EQ(p.duration(), 6 + 2 + 20 + 30 + 10 + 5);
}

TEST(Program, GraspClosesThenRampsAtRate) {
  Setpoint s0;
  s0.opening = 0.05;
  const TrajectoryProgram p = ProgramBuilder(s0).grasp(30.0, 10.0, 6.0).build();
  ASSERT_EQ(p.segments().size(), 3u);
  EXPECT_DOUBLE_EQ(p.segments()[0].duration, 2.4);
  EXPECT_DOUBLE_EQ(p.segments()[1].duration, 3.0);
  EXPECT_NEAR(p.segments()[2].duration, 0.6, 1e-12);
  EXPECT_NEAR(p.sample(2.4).setpoint.opening, 0.0, 1e-12);
  EXPECT_NEAR(p.sample(3.9).setpoint.grip, 15.0, 1e-12);
  EXPECT_THROW(ProgramBuilder(s0).grasp(30.0, 10.0, 3.0), ConfigError);
}

TEST(Program, CarryFlagFollowsGrip) {
  Setpoint s0;
  const TrajectoryProgram p =
      ProgramBuilder(s0).line_by(Vec3::UnitX(), 1.0).grasp(10.0, 10.0, 3.0).line_by(Vec3::UnitY(), 1.0)
          .release(0.01, 1.0).build();
  EXPECT_FALSE(p.sample(0.5).carry);
  EXPECT_TRUE(p.sample(4.5).carry);
  EXPECT_FALSE(p.sample(5.5).carry);
}

TEST(Program, UnreachableCircleThrows) {
  Setpoint s0;
  s0.position = Vec3(0, 0, 0.3);
  // The xz circle starts at its lowest point and climbs to z = 0.7.
  auto below_ceiling = [](const Vec3& p) { return p.z() < 0.6; };
  EXPECT_THROW(ProgramBuilder(s0).circle(CirclePlane::xz, 0.2, 10.0, below_ceiling), Unreachable);
  EXPECT_NO_THROW(ProgramBuilder(s0).circle(CirclePlane::xy, 0.2, 10.0, below_ceiling));
}

TEST(Program, BadInputs) {
  Setpoint s0;
  EXPECT_THROW(ProgramBuilder(s0).line_by(Vec3::UnitX(), 0.0), ConfigError);
  EXPECT_THROW(ProgramBuilder(s0).force_ramp(Vec3::UnitX(), -1.0, 1.0), ConfigError);
  EXPECT_THROW(segment_kind_from_string("spiral"), ConfigError);
  EXPECT_THROW(circle_plane_from_string("zz"), ConfigError);
}

TEST(DoubleTetSuite, AllSevenTrajectoriesBuild) {
  const Scene s = default_scene(build_configuration(ConfigurationId::double_tetrahedron));
  for (const std::string& label : double_tet_trajectories()) {
    const TrajectoryProgram p = double_tet_program(s, label);
    EXPECT_GT(p.duration(), 100.0) << label;
    // Ends where it started.
    EXPECT_LT((p.sample(0).setpoint.position - p.sample(p.duration()).setpoint.position).norm(),
              1e-12)
        << label;
  }
  EXPECT_THROW(double_tet_program(s, "zigzag"), ConfigError);
}

TEST(OctahedronProgram, ElevenStepsAndDuration) {
  const Scene s = default_scene(build_configuration(ConfigurationId::octahedron_internal));
  const TrajectoryProgram p = octahedron_two_box_program(s);
  EXPECT_NEAR(p.duration(), 290.0, 29.0);
  std::size_t carries = 0;
  for (const Segment& seg : p.segments()) carries += seg.label == "carry";
  EXPECT_EQ(carries, 2u);
}
