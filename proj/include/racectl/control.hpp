#pragma once

// Trajectory tracking: pure-pursuit steering toward the selected maneuver and
// proportional speed control with a previewed profile target, plus the
// leader-following override. The VehicleController glues planner and tracker
// together for one vehicle.

#include <optional>
#include <vector>

#include "racectl/planner.hpp"
#include "racectl/track.hpp"
#include "racectl/vehicle.hpp"

namespace racectl {

struct ControlGains {
  double k_lookahead{0.5};   // s: lookahead distance = k * v
  double min_lookahead{5.0}; // m
  double k_omega{1.2};       // steer units per rad/s of yaw-rate error
  double k_steer_ff{1.0};    // share of the steady-state steer feedforward
  double k_v{4.5};           // throttle units per m/s of speed error
  double preview_time{1.0};  // s ahead on the speed profile
  double k_follow{0.25};     // 1/s distance-error feedback in following mode
  double follow_lookahead{12.0};  // m nominal following distance
  double follow_engage{1.5};      // engage when gap < engage * follow_lookahead
};

// Cartesian polyline with per-point speeds and times, the tracker's view of a
// maneuver.
struct TrackedPath {
  std::vector<Vec2> points;
  std::vector<double> speeds;  // m/s
  std::vector<double> times;   // s from plan instant
};

struct PursuitResult {
  double omega_desired{0.0};  // rad/s
  double target_speed{0.0};   // m/s profile speed at the target point
  bool degraded{false};       // ran off the end of the path
};

// Pure pursuit: first path point at the lookahead distance from the vehicle;
// omega_d = 2 v sin(alpha) / l_d with alpha measured from the velocity vector.
PursuitResult pure_pursuit(const Vec2& pos, double heading, double v,
                           const TrackedPath& path, const ControlGains& g);

// Steering command: feedforward omega_d / (steer_gain v) holds the commanded
// rate exactly in steady state; the yaw-rate error term damps transients.
// Clamped to [-1, 1].
double steering_command(double omega_desired, double omega, double v,
                        double steer_gain, const ControlGains& g);

// Desired speed: previewed profile speed, overridden by the following law
// v_f - k_f (L_d - L) when a leader is engaged.
struct FollowTarget {
  double leader_speed{0.0};  // m/s
  double gap{0.0};           // m
};
double desired_speed(const TrackedPath& path, double t_now, const ControlGains& g,
                     const std::optional<FollowTarget>& follow);

// Throttle/brake from the speed error, clamped to [-1, 1].
double throttle_command(double v_desired, double v, const ControlGains& g);

// What the simulator tells each controller about one opponent.
struct SensedVehicle {
  int id{-1};
  Vec2 pos;
  Vec2 vel;
  double omega{0.0};
  double station{0.0};  // absolute station (for gap bookkeeping)
};

struct SensorSnapshot {
  double t{0.0};
  VehicleState ego;
  double ego_station{0.0};
  double ego_slip{1.0};  // current slipstream drag factor, self-measured
  std::vector<SensedVehicle> opponents;  // within sensor range
};

struct ControllerDebug {
  PlanResult plan;
  bool following{false};
  double v_desired{0.0};
};

// Planner + tracker for one vehicle. Owns the planner hysteresis state and
// the latest maneuver; reads only immutable shared data (track, race line).
class VehicleController {
 public:
  VehicleController(const Track& track, const RacelineView& raceline,
                    const PlannerConfig& pcfg, const PredictionParams& pred,
                    const VehicleParams& vparams, const ControlGains& gains);

  // One control cycle at 25 Hz: plan, then track. dt_cycle is the control
  // period (s).
  Commands update(const SensorSnapshot& snap, double dt_cycle, ControllerDebug* dbg = nullptr);

 private:
  const Track* track_;
  Planner planner_;
  ControlGains gains_;
  VehicleParams vparams_;
  SafetyBound bound_;
};

}  // namespace racectl
