#pragma once

// Deterministic fixed-step race simulation: 100 Hz vehicle physics, 25 Hz
// sensing and control with zero-order-held commands, per-vehicle controller
// instances, slipstream coupling, and edge-triggered event logging.

#include <cstdint>
#include <vector>

#include "racectl/control.hpp"
#include "racectl/racelog.hpp"
#include "racectl/raceline.hpp"
#include "racectl/track.hpp"
#include "racectl/vehicle.hpp"

namespace racectl {

struct RaceParams {
  int n_vehicles{6};
  int laps{10};               // flying laps the leader must complete
  std::uint64_t seed{1};
  double t_max{900.0};        // s simulated-time safety cap
  double sensor_range{200.0}; // m along-track visibility
  double start_speed{27.78};  // m/s rolling start (100 km/h)
  double start_gap{20.0};     // m longitudinal grid stagger
  double run_up{15.0};        // m from the last grid slot to the start line
  double lane_offset{2.8};    // m of the two grid columns from the centerline
  double jitter_long{2.0};    // m uniform +- longitudinal grid jitter
  double jitter_lat{0.5};     // m uniform +- lateral grid jitter; kept small
                              // so side-by-side safety bounds clear at spawn
};

struct RaceSetup {
  RaceParams race;
  VehicleParams vehicle;
  PlannerConfig planner;
  PredictionParams prediction;
  ControlGains gains;
  SlipstreamParams slipstream;
  // Evaluate controllers in reverse id order (results must not change; used
  // by the isolation test).
  bool reverse_update_order{false};
};

struct RaceResult {
  std::vector<TickRow> rows;                   // 25 Hz, grouped by instant
  std::vector<RaceEvent> events;               // sorted by t
  std::vector<std::vector<double>> crossings;  // per vehicle: line-crossing times
  double t_end{0.0};
  bool finished{false};  // leader completed the requested laps
  double track_length{0.0};
  int n_vehicles{0};
  int laps{0};
};

// Lap k (1-based) time of a vehicle: crossings[k] - crossings[k-1].
std::vector<double> lap_times_from_crossings(const std::vector<double>& crossings);

RaceResult run_race(const Track& track, const RacelineView& raceline, const RaceSetup& setup);

}  // namespace racectl
