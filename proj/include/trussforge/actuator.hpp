#pragma once

// Spiral-zipper member abstraction: a speed-limited length actuator with an
// input dead zone, driven by a PI loop on measured axial force.
//
// Positive PWM means "more tension wanted" and shortens the member.

#include <algorithm>
#include <cmath>
#include <random>

#include "trussforge/common.hpp"

namespace trussforge {

struct ActuatorModel {
  double min_length = 0.3;          // m
  double max_length = 3.0;          // m
  double max_speed = 0.03;          // m/s
  double dead_zone = 0.08;          // PWM, fraction of full scale
  double velocity_gain = 0.05;      // m/s per unit PWM beyond the dead zone
  double force_limit = 200.0;       // N
  double axial_stiffness = 2e4;     // N/m
  double loadcell_noise_sd = 0.2;   // N

  void validate() const {
    if (!(min_length > 0.0 && min_length < max_length)) {
      throw ConfigError("actuator: need 0 < min_length < max_length");
    }
    if (!(max_speed > 0.0)) throw ConfigError("actuator: max_speed must be positive");
    if (!(dead_zone >= 0.0 && dead_zone < 1.0)) {
      throw ConfigError("actuator: dead_zone must lie in [0, 1)");
    }
    if (!(velocity_gain > 0.0)) throw ConfigError("actuator: velocity_gain must be positive");
    if (!(axial_stiffness > 0.0)) throw ConfigError("actuator: axial_stiffness must be positive");
    if (!(force_limit > 0.0)) throw ConfigError("actuator: force_limit must be positive");
    if (!(loadcell_noise_sd >= 0.0)) throw ConfigError("actuator: noise sd must be >= 0");
  }

  /// Same model without dead zone or sensor noise.
  ActuatorModel ideal() const {
    ActuatorModel m = *this;
    m.dead_zone = 0.0;
    m.loadcell_noise_sd = 0.0;
    return m;
  }
};

struct PiGains {
  double k_p = 0.02;               // PWM / N
  double k_i = 0.3;                // PWM / (N s)
  double integrator_limit = 0.6;   // PWM

  void validate() const {
    if (!(k_p >= 0.0 && k_i >= 0.0)) throw ConfigError("pi gains must be non-negative");
    if (!(integrator_limit > 0.0)) throw ConfigError("integrator_limit must be positive");
  }
};

struct ActuatorState {
  double length = 1.0;            // m, the actuator's own (unloaded) length
  double measured_force = 0.0;    // N, loadcell reading
  double integrator = 0.0;        // PWM
  double commanded_force = 0.0;   // N
  double true_force = 0.0;        // N, noise-free axial force
  double velocity = 0.0;          // m/s, last length rate
  double pwm = 0.0;

  friend bool operator==(const ActuatorState&, const ActuatorState&) = default;
};

struct PiOutput {
  double pwm;
  double integrator;
};

/// One PI update on e = cmd - measured. The integrator is clamped before it
/// is added (anti-windup), the output to [-1, 1].
inline PiOutput pi_step(const ActuatorState& state, double commanded_force, double dt,
                        const PiGains& gains) {
  const double error = commanded_force - state.measured_force;
  const double integrator = std::clamp(state.integrator + gains.k_i * error * dt,
                                       -gains.integrator_limit, gains.integrator_limit);
  return {std::clamp(gains.k_p * error + integrator, -1.0, 1.0), integrator};
}

/// PWM to speed magnitude along the "tighten" direction (m/s).
inline double dead_zone(double pwm, const ActuatorModel& model) {
  const double mag = std::abs(pwm);
  if (mag <= model.dead_zone) return 0.0;
  const double v = std::min(model.velocity_gain * (mag - model.dead_zone), model.max_speed);
  return std::copysign(v, pwm);
}

/// What the surrounding structure holds the member at.
struct LoadContext {
  double structural_length;  // m, geometric distance between the end nodes
};

struct ActuatorStepResult {
  ActuatorState state;
  bool saturated = false;  // length hit a limit this step (informational)
};

/// PI -> dead zone -> length integration, without touching the force reading.
inline ActuatorStepResult advance_length(const ActuatorState& state, double commanded_force,
                                         double dt, const ActuatorModel& model,
                                         const PiGains& gains) {
  ActuatorStepResult out{state, false};
  const PiOutput pi = pi_step(state, commanded_force, dt, gains);
  out.state.commanded_force = commanded_force;
  out.state.integrator = pi.integrator;
  out.state.pwm = pi.pwm;
  const double speed = dead_zone(pi.pwm, model);
  double length = state.length - speed * dt;
  if (length <= model.min_length || length >= model.max_length) {
    length = std::clamp(length, model.min_length, model.max_length);
    out.saturated = true;
  }
  out.state.velocity = (length - state.length) / dt;
  out.state.length = length;
  return out;
}

/// Axial force for a given structural length, plus loadcell noise.
template <class Rng>
void measure_force(ActuatorState& state, const LoadContext& load, const ActuatorModel& model,
                   Rng& rng) {
  state.true_force = model.axial_stiffness * (load.structural_length - state.length);
  double noise = 0.0;
  if (model.loadcell_noise_sd > 0.0) {
    std::normal_distribution<double> dist(0.0, model.loadcell_noise_sd);
    noise = dist(rng);
  }
  state.measured_force = state.true_force + noise;
}

/// Full member update against a load that holds the member at a given
/// structural length (e.g. a rigid test fixture).
template <class Rng>
ActuatorStepResult actuator_step(const ActuatorState& state, double commanded_force, double dt,
                                 const ActuatorModel& model, const PiGains& gains,
                                 const LoadContext& load, Rng& rng) {
  ActuatorStepResult out = advance_length(state, commanded_force, dt, model, gains);
  measure_force(out.state, load, model, rng);
  return out;
}

}  // namespace trussforge
