#pragma once

// Point-mass maneuver primitives in road-aligned coordinates.
//
// A maneuver segment connects two endpoints that share the same longitudinal
// speed: x advances linearly while y follows a bang-bang lateral force law
// (constant +-F_y with a single switch), the minimum-|F_y| profile that meets
// the endpoint constraints in the implied time T = dx / x_dot.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace racectl {

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Endpoint in road-aligned coordinates.
struct EndPoint {
  double x{0.0};      // m
  double y{0.0};      // m
  double x_dot{0.0};  // m/s
  double y_dot{0.0};  // m/s
};

// Closed-form lateral law for one segment.
struct SegmentLaw {
  double f_y{0.0};      // N, signed bang-bang magnitude (first phase sign)
  double t_switch{0.0}; // s, sign flip instant
  double t_total{0.0};  // s, segment duration
  double mass{0.0};     // kg
  EndPoint start;
};

enum class ManeuverKind { kLateralShift, kRacelineMerge, kPredicted };

struct ManeuverSample {
  double t{0.0};
  EndPoint q;
};

struct CollisionReport {
  bool collides{false};
  double first_time{0.0};      // s, earliest overlap instant
  double min_clearance{0.0};   // m, min separating margin over the horizon
};

struct Maneuver {
  ManeuverKind kind{ManeuverKind::kLateralShift};
  std::vector<SegmentLaw> segments;
  std::vector<ManeuverSample> samples;   // fixed dt grid from t=0, last at t_total
  std::vector<double> speed_profile;     // m/s ground speed at each sample
  double t_total{0.0};                   // s
  double dt{0.0};                        // s, sample spacing
  double shift_target{0.0};              // m, lateral-shift candidates only
  double peak_lat_accel{0.0};            // m/s^2, max |f_y|/m across segments
  bool infeasible{false};                // set by speed reduction when blocked
  CollisionReport collision;             // last collision check result

  // State at segment-law time t (piecewise closed form, 0 <= t <= t_total).
  EndPoint at(double t) const;
};

// Minimum-force bang-bang law from ps to pg with mass m.
// Requires pg.x > ps.x, ps.x_dot > 0 and pg.x_dot == ps.x_dot.
SegmentLaw plan_segment(const EndPoint& ps, const EndPoint& pg, double m);

// Closed-form state on one segment at local time t in [0, t_total].
EndPoint sample_segment(const SegmentLaw& law, double t);

// Chain segments through all waypoints (>= 2, strictly increasing x, equal
// x_dot) and sample the result on a dt grid.
Maneuver connect_points(const std::vector<EndPoint>& pts, double m, double dt);

// Longitudinal model used when re-timing maneuvers: a(v) >= 0 with
// a(v_max) = 0, plus a constant braking limit.
struct AccelModel {
  double v_max{0.0};                      // m/s
  double brake_decel{0.0};                // m/s^2, positive
  std::function<double(double)> accel;    // m/s^2 drive acceleration at speed v
};

// Optional per-sample path constraints for re-timing. Entries align with the
// maneuver's current samples; empty vectors mean "no constraint".
struct PathConstraints {
  std::vector<double> v_cap;      // m/s speed cap at each sample (<= v_max)
  std::vector<double> arc_scale;  // ground-distance factor per unit chart length
};

// Geometry-only view of a maneuver's path, parameterized by ground arc length
// (chart length corrected by the per-sample arc scale). Used by re-timing and
// by speed reduction against traffic.
class PathView {
 public:
  PathView(const Maneuver& m, const PathConstraints& limits);

  double total_arc() const { return arc_.back(); }
  struct Pt {
    double x, y;    // chart point
    double tx, ty;  // unit chart tangent
  };
  Pt at_arc(double a) const;
  double cap_at_arc(double a) const;  // interpolated speed cap (inf when none)
  double x_at_arc(double a) const;
  // Inverse of x(arc); requires strictly increasing chart x along the path.
  double arc_at_x(double x) const;

 private:
  std::vector<double> arc_, x_, y_, cap_;
};

// Builds per-sample constraints for a given maneuver (used where the maneuver
// geometry is not known until after connection).
using ConstraintsFn = std::function<PathConstraints(const Maneuver&)>;

// Re-time a maneuver over its own path: accelerate from v0 under the model
// (forward pass), never exceeding caps, with a braking backward pass so caps
// ahead are honored. Samples are rebuilt on the same dt grid with times
// derived from the new profile; geometry (the path itself) is unchanged.
void replan_velocity(Maneuver& m, double v0, const AccelModel& model,
                     const PathConstraints& limits = {});

// State at time t interpolated on the sample grid (clamped to [0, t_total]).
// Valid for both freshly connected and re-timed maneuvers.
EndPoint sample_maneuver(const Maneuver& m, double t);

}  // namespace racectl
