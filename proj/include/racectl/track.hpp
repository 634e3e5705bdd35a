#pragma once

// Closed-circuit track geometry and the road-aligned coordinate chart.
//
// A track is a directed, C1-continuous sequence of straight and arc segments
// describing the LEFT boundary of the road when facing the driving direction.
// Road width extends to the right of that curve. Road-aligned coordinates of
// a point are (x, y):
//   x  along-track arc length from a reference station, wrapped to (-L/2, L/2]
//   y  lateral offset to the right of the left boundary, 0 <= y <= width on-track
// Velocities are expressed in the local (tangent, right-normal) frame.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "racectl/geometry.hpp"

namespace racectl {

struct TrackError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SegmentKind { kStraight, kArc };

struct SegmentSpec {
  SegmentKind kind{SegmentKind::kStraight};
  double length{0.0};     // m, straight only
  double radius{0.0};     // m, arc only (> 0)
  double sweep_rad{0.0};  // rad, arc only; + turns left, - turns right
};

struct TrackConfig {
  double width{0.0};  // m
  std::vector<SegmentSpec> segments;
};

// Parse the plain-text track format:
//   width <m>
//   straight <length_m>
//   arc <radius_m> <sweep_deg>
// '#' starts a comment; blank lines are ignored. Exactly one width line.
TrackConfig parse_track_config(std::istream& in);
TrackConfig parse_track_config_string(const std::string& text);
TrackConfig load_track_config(const std::string& path);

// A point expressed in road-aligned coordinates.
struct RaPoint {
  double x{0.0};      // m along track, relative to the reference station
  double y{0.0};      // m to the right of the left boundary
  double x_dot{0.0};  // m/s along local tangent
  double y_dot{0.0};  // m/s along local right-normal
};

// A Cartesian kinematic state (position + velocity vector).
struct CartesianState {
  Vec2 pos;
  Vec2 vel;
};

class Track {
 public:
  struct Segment {
    SegmentKind kind;
    double length;     // m of left-boundary arc length
    double radius;     // m, arcs only
    double sweep;      // rad, arcs only, signed (+ left)
    Pose start;        // boundary pose at segment entry
    double s0;         // station at segment entry
    Vec2 center;       // arc center, arcs only
  };

  // Builds the closed track; validates closure (1e-6 m, 1e-8 rad), positive
  // width, positive lengths and arc radius > width.
  static Track build(const TrackConfig& cfg);

  double width() const { return width_; }
  double length() const { return length_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Wrap an absolute station into [0, L).
  double wrap_station(double s) const;
  // Wrap an along-track difference into (-L/2, L/2].
  double wrap_rel(double dx) const;

  // Left-boundary pose at station s (wrapped).
  Pose boundary_pose(double s) const;
  // Signed curvature of the left boundary at station s (+ = left turn).
  double curvature(double s) const;

  // Cartesian position of road-aligned (station, lateral offset).
  Vec2 position(double s, double y) const;

  struct Projection {
    double s;  // station of the foot point, in [0, L)
    double y;  // lateral offset of the query point
  };
  // Project a Cartesian point onto the left boundary. Throws TrackError if
  // the point is further off-track than the smallest arc radius (ambiguous).
  Projection project(const Vec2& p) const;

  // Chart conversions relative to a reference station (usually the ego's).
  RaPoint to_road_aligned(double ref_station, const CartesianState& s) const;
  CartesianState to_cartesian(double ref_station, const RaPoint& q) const;

 private:
  std::vector<Segment> segments_;
  double width_{0.0};
  double length_{0.0};
  double min_radius_{0.0};  // smallest arc radius, projection sanity bound

  const Segment& segment_at(double s, double* local_s) const;
};

}  // namespace racectl
