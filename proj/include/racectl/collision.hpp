#pragma once

// Safety bounds (margin-inflated oriented rectangles), time-synchronized
// trajectory collision checks, speed reduction against blocking traffic, and
// the fully-blocked-behind test.

#include <vector>

#include "racectl/geometry.hpp"
#include "racectl/pointmass.hpp"

namespace racectl {

// Rectangle around a vehicle, inflated by safety margins. Margins default to
// 30% of the length front and rear and 50% of the width per side.
struct SafetyBound {
  double half_length{0.0};   // m, (length + front + rear margins) / 2
  double half_width{0.0};    // m, (width + 2 * side margin) / 2
  double front_margin{0.0};  // m
  double rear_margin{0.0};   // m
  double side_margin{0.0};   // m

  static SafetyBound from_vehicle(double length, double width,
                                  double front_factor = 0.3, double side_factor = 0.5);
};

struct ObbPose {
  Vec2 center;
  double heading{0.0};
};

// Exact oriented-rectangle overlap via the separating axis test; touching
// counts as overlap.
bool bounds_overlap(const ObbPose& a, const SafetyBound& ba, const ObbPose& b,
                    const SafetyBound& bb);

// Signed separation proxy: the largest projected gap over the four candidate
// axes (> 0 separated, <= 0 overlapping).
double bounds_separation(const ObbPose& a, const SafetyBound& ba, const ObbPose& b,
                         const SafetyBound& bb);

// Time-synchronized sweep over two maneuvers sampled on the same dt grid
// (plus interval midpoints). Positions/headings come from the samples'
// road-aligned states.
CollisionReport trajectories_collide(const Maneuver& c1, const Maneuver& c2,
                                     const SafetyBound& b1, const SafetyBound& b2);

// True when the opponent is behind the ego (x < 0) and its safety-bound
// lateral span fits inside the ego's span inflated by the ego side margin.
bool is_fully_blocked_behind(double ego_y, const SafetyBound& ego_bound, double opp_x,
                             double opp_y, const SafetyBound& opp_bound);

// One blocking opponent's predicted trajectory with its bound.
struct Blocker {
  const Maneuver* prediction;
  const SafetyBound* bound;
};

// Re-time `cand` so it stays behind every laterally-conflicting blocker by the
// combined longitudinal margin; braking-rate limited. Marks the maneuver
// infeasible when even full braking cannot satisfy the constraint. Returns the
// collision report of the adjusted maneuver against the blockers.
CollisionReport reduce_speed_to_avoid(Maneuver& cand, const std::vector<Blocker>& blockers,
                                      const SafetyBound& cand_bound, double v0,
                                      const AccelModel& model,
                                      const PathConstraints& limits = {});

}  // namespace racectl
