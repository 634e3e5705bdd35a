#pragma once

// On-line maneuver planning: lateral-shift and race-line-merge candidates,
// classification against opponent predictions, speed reduction for blocked
// candidates, cost ranking with a race-line reward and switching hysteresis,
// and a least-bad fallback when everything collides.

#include <limits>
#include <vector>

#include "racectl/collision.hpp"
#include "racectl/pointmass.hpp"
#include "racectl/prediction.hpp"
#include "racectl/raceline.hpp"
#include "racectl/track.hpp"
#include "racectl/vehicle.hpp"

namespace racectl {

struct PlannerConfig {
  int n_shift_targets{7};        // N evenly spaced lateral goals
  double d_min{1.0};             // m boundary standoff for the goal grid
  double shift_dist_per_m{25.0}; // m of lead distance per m of lateral shift
  double shift_dist_base{50.0};  // m minimum lead distance for shifts
  double merge_dist_per_m{25.0}; // m per m, merge-point equation gain
  double merge_dist_base{50.0};  // m, merge-point equation offset
  double x_max{200.0};           // m planning horizon along the track
  double r_opt{0.15};            // s race-line reward
  double r_keep{0.10};           // s switching hysteresis bonus
  double r_decay{0.05};          // s/s hysteresis decay rate
  double dt{0.04};               // s sample spacing
  double sensor_range{200.0};    // m opponent visibility
  double lat_fraction{0.97};     // share of the lateral envelope for caps
  double rl_follow_band{1.0};    // m: within this of the line, its v(s) caps
  double cap_release_dist{80.0}; // m: a speed cap keeps binding this far past
                                 // its section, so exits are not taken early
  double lat_margin{0.0};        // m/s^2 grip reserved for tracking errors
  double guard_x{9.0};           // m: opponents this close longitudinally are
                                 // treated as alongside
  double guard_t{1.5};           // s: lateral clearance to an alongside car is
                                 // required outright this far into a maneuver
  double mass{750.0};            // kg, segment laws
};

// Evenly spaced lateral goals y_i = d_min + i (w - 2 d_min) / (N - 1).
std::vector<double> lateral_shift_targets(double width, int n, double d_min);

// Lateral shift to target_y reached after |target_y - y| * shift_dist_per_m +
// shift_dist_base meters, held to x_max. Throws PlanError("q1 beyond horizon")
// when that lead distance reaches past x_max.
Maneuver build_lateral_shift(const EndPoint& ego, double target_y, const PlannerConfig& cfg);

// Merge onto the race line at the first point satisfying the lead-distance
// equation (bisection), then follow it to x_max.
Maneuver build_raceline_merge(const EndPoint& ego, double ego_station,
                              const RacelineView& view, const PlannerConfig& cfg);

struct CandidateInfo {
  ManeuverKind kind{ManeuverKind::kLateralShift};
  double shift_target{0.0};  // m, shifts only
  bool free_of_traffic{false};
  bool reduced{false};
  bool infeasible{false};
  double traverse_time{0.0};     // s, horizon traversal estimate
  double deviation{0.0};         // m, mean |y - y_raceline|
  double opt_reward{0.0};        // s
  double keep_bonus{0.0};        // s
  double cost{0.0};              // s
  double first_collision_time{std::numeric_limits<double>::infinity()};
  double min_clearance{0.0};     // m
  // First time the maneuver converges laterally on an alongside car; +inf
  // when it never does. Finite values demote a candidate below every
  // non-converging one in the fallback ranking.
  double wall_time{std::numeric_limits<double>::infinity()};
};

struct PlanResult {
  Maneuver maneuver;
  int selected{-1};              // candidate index (0..N-1 shifts, N merge)
  bool fallback{false};          // nothing collision-free: least-bad pick
  std::vector<CandidateInfo> candidates;
};

struct PlannerState {
  int last_selected{-1};
  double time_since_switch{1e9};  // s
};

class Planner {
 public:
  Planner(const Track& track, const RacelineView& raceline, const PlannerConfig& cfg,
          const PredictionParams& pred, const VehicleParams& vehicle);

  // One planning cycle. `ego` is the ego state in its own chart (x = 0),
  // `ego_station` the absolute station, `opponents` in the ego frame.
  // `dt_since_last` advances the hysteresis clock. `drag_scale` is the ego's
  // current slipstream drag factor: candidates are re-timed with it, while
  // opponent predictions stay on the clean-air model (their tow is unknown).
  PlanResult plan(const EndPoint& ego, double ego_station,
                  const std::vector<OpponentState>& opponents, double dt_since_last,
                  double drag_scale = 1.0);

  const PlannerState& state() const { return state_; }
  void reset_state() { state_ = PlannerState{}; }

  // Per-sample speed caps and ground-arc scale for a maneuver planned from
  // ego_station (shared by candidates and opponent predictions).
  PathConstraints chart_constraints(const Maneuver& m, double ego_station) const;

 private:
  const Track* track_;
  const RacelineView* raceline_;
  PlannerConfig cfg_;
  PredictionParams pred_;
  VehicleParams vehicle_;
  AccelModel accel_;
  SafetyBound ego_bound_;
  SafetyBound opp_bound_;
  PlannerState state_;

  // Highest speed whose corner demand plus a_reserve (m/s^2 of planned
  // lateral acceleration) stays inside lat_fraction of the grip envelope.
  double lat_speed_cap(double station, double offset, double a_reserve = 0.0) const;
};

}  // namespace racectl
