#include <random>

#include <gtest/gtest.h>

#include "trussforge/actuator.hpp"

using namespace trussforge;

TEST(PiStep, ProportionalPlusIntegral) {
  PiGains g{0.01, 0.1, 0.6};
  ActuatorState s;
  s.measured_force = 4.0;
  s.integrator = 0.05;
  const PiOutput out = pi_step(s, 10.0, 0.01, g);
  // e = 6; I = 0.05 + 0.1 * 6 * 0.01 = 0.056; u = 0.06 + 0.056
  EXPECT_NEAR(out.integrator, 0.056, 1e-15);
  EXPECT_NEAR(out.pwm, 0.116, 1e-15);
}

TEST(PiStep, IntegratorAndOutputClamp) {
  PiGains g{0.5, 10.0, 0.2};
  ActuatorState s;
  const PiOutput out = pi_step(s, 100.0, 1.0, g);
  EXPECT_DOUBLE_EQ(out.integrator, 0.2);
  EXPECT_DOUBLE_EQ(out.pwm, 1.0);
  const PiOutput neg = pi_step(s, -100.0, 1.0, g);
  EXPECT_DOUBLE_EQ(neg.integrator, -0.2);
  EXPECT_DOUBLE_EQ(neg.pwm, -1.0);
}

TEST(DeadZone, InsideBandIsStill) {
  ActuatorModel m;
  EXPECT_EQ(dead_zone(0.0, m), 0.0);
  EXPECT_EQ(dead_zone(0.08, m), 0.0);
  EXPECT_EQ(dead_zone(-0.05, m), 0.0);
}

TEST(DeadZone, LinearBeyondBandThenSaturates) {
  ActuatorModel m;
  EXPECT_NEAR(dead_zone(0.28, m), 0.05 * 0.2, 1e-15);
  EXPECT_NEAR(dead_zone(-0.28, m), -0.05 * 0.2, 1e-15);
  m.velocity_gain = 1.0;
  EXPECT_DOUBLE_EQ(dead_zone(0.9, m), m.max_speed);
}

TEST(AdvanceLength, PositivePwmShortens) {
  ActuatorModel m;
  PiGains g{0.02, 0.0, 0.6};
  ActuatorState s;
  s.length = 1.0;
  const auto r = advance_length(s, 20.0, 0.01, m, g);  // u = 0.4
  EXPECT_NEAR(r.state.pwm, 0.4, 1e-15);
  EXPECT_NEAR(r.state.length, 1.0 - 0.05 * (0.4 - 0.08) * 0.01, 1e-15);
  EXPECT_LT(r.state.velocity, 0.0);
  EXPECT_FALSE(r.saturated);
}

TEST(AdvanceLength, StopsAtStroke) {
  ActuatorModel m;
  PiGains g{1.0, 0.0, 0.6};
  ActuatorState s;
  s.length = m.min_length + 1e-5;
  const auto r = advance_length(s, 50.0, 0.01, m, g);
  EXPECT_DOUBLE_EQ(r.state.length, m.min_length);
  EXPECT_TRUE(r.saturated);
}

TEST(MeasureForce, TrueForceFromStretch) {
  ActuatorModel m = ActuatorModel{}.ideal();
  ActuatorState s;
  s.length = 0.999;
  std::mt19937_64 rng(1);
  measure_force(s, LoadContext{1.0}, m, rng);
  EXPECT_NEAR(s.true_force, 2e4 * 0.001, 1e-9);
  EXPECT_EQ(s.measured_force, s.true_force);
}

TEST(MeasureForce, NoiseIsSeededAndUnbiased) {
  ActuatorModel m;
  std::mt19937_64 a(9), b(9);
  ActuatorState s1, s2;
  s1.length = s2.length = 1.0;
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    measure_force(s1, LoadContext{1.0}, m, a);
    measure_force(s2, LoadContext{1.0}, m, b);
    ASSERT_EQ(s1.measured_force, s2.measured_force);
    sum += s1.measured_force;
    sq += s1.measured_force * s1.measured_force;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n), m.loadcell_noise_sd, 0.01);
}

TEST(ActuatorStep, RigidFixtureConvergesToCommand) {
  ActuatorModel m = ActuatorModel{}.ideal();
  PiGains g;
  ActuatorState s;
  s.length = 1.0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    s = actuator_step(s, 40.0, 0.01, m, g, LoadContext{1.0}, rng).state;
  }
  EXPECT_NEAR(s.true_force, 40.0, 0.05);
}

TEST(ActuatorModel, Validation) {
  ActuatorModel m;
  m.dead_zone = 1.5;
  EXPECT_THROW(m.validate(), ConfigError);
  m = {};
  m.min_length = 4.0;
  EXPECT_THROW(m.validate(), ConfigError);
  PiGains g;
  g.k_p = -1;
  EXPECT_THROW(g.validate(), ConfigError);
}
