#pragma once

// Vehicle parameters and the simulation motion model: longitudinal force
// balance (power-limited drive, traction cap, braking, quadratic drag with a
// slipstream factor) plus a yaw-rate steering model with a lateral
// acceleration saturation envelope.

#include "racectl/geometry.hpp"
#include "racectl/pointmass.hpp"

namespace racectl {

struct VehicleParams {
  double mass{750.0};          // kg
  double length{5.0};          // m
  double width{2.0};           // m
  double power{480e3};         // W at full throttle
  double c_drag{0.83947};      // N/(m/s)^2, sized so drag balances drive at v_max
  double c_down{1.8394};       // N/(m/s)^2 downforce
  double mu{1.0};              // tire friction coefficient
  double brake_force{11772.0}; // N, ~1.6 g
  double v_max{83.0};          // m/s
  double g{9.81};              // m/s^2

  // Steering/yaw model.
  double steer_gain{0.040};    // (rad/s) per (steer unit * m/s)
  double yaw_tau{0.12};        // s first-order yaw-rate lag

  // Lateral acceleration envelope at speed v (friction + downforce).
  double lat_accel_limit(double v) const { return mu * (g + c_down * v * v / mass); }
  // Traction-limited drive force at speed v.
  double traction_cap(double v) const { return mu * (mass * g + c_down * v * v); }
};

// Longitudinal model handed to maneuver re-timing: full-throttle acceleration
// net of drag, zero at the drag-balance speed. drag_scale < 1 (slipstream)
// raises that balance point accordingly.
AccelModel make_accel_model(const VehicleParams& p, double drag_scale = 1.0);

struct VehicleState {
  Vec2 pos;
  double heading{0.0};  // rad
  double v{0.0};        // m/s ground speed, >= 0
  double omega{0.0};    // rad/s yaw rate
};

struct Commands {
  double throttle{0.0};  // u in [-1, 1]: drive (+) / brake (-)
  double steer{0.0};     // delta in [-1, 1]
};

struct StepInfo {
  bool lat_saturated{false};  // yaw rate clipped by the lateral envelope
};

// Advance one physics tick of dt seconds. slip_factor scales drag (1 = clean
// air). Semi-implicit Euler: speed, then yaw rate, then heading, then
// position.
StepInfo step_vehicle(VehicleState& s, const Commands& cmd, const VehicleParams& p,
                      double slip_factor, double dt);

// Drag reduction from running behind other cars. Kernel decays linearly to
// zero at `long_range` of along-track gap and `lat_range` of lateral offset;
// the strongest leader wins. Returns a factor in [1 - delta, 1].
struct SlipstreamParams {
  bool enabled{true};
  double delta{0.25};      // max drag reduction
  double long_range{30.0}; // m
  double lat_range{2.0};   // m
};

double slipstream_factor(double gap_long, double gap_lat, const SlipstreamParams& p);

}  // namespace racectl
