#include "racectl/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace racectl {

namespace {
constexpr double kClosurePosTol = 1e-6;   // m
constexpr double kClosureAngTol = 1e-8;   // rad

// Left normal of a heading: 90 deg CCW from the tangent.
Vec2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }
// Right normal: 90 deg CW from the tangent; lateral y is measured along this.
Vec2 right_normal(double heading) { return {std::sin(heading), -std::cos(heading)}; }
}  // namespace

TrackConfig parse_track_config(std::istream& in) {
  TrackConfig cfg;
  bool have_width = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank / comment-only line
    auto want = [&](double& out, const char* what) {
      if (!(ls >> out))
        throw TrackError("track config line " + std::to_string(lineno) + ": missing " + what);
    };
    if (tok == "width") {
      if (have_width)
        throw TrackError("track config line " + std::to_string(lineno) + ": duplicate width");
      want(cfg.width, "width value");
      have_width = true;
    } else if (tok == "straight") {
      SegmentSpec seg;
      seg.kind = SegmentKind::kStraight;
      want(seg.length, "straight length");
      cfg.segments.push_back(seg);
    } else if (tok == "arc") {
      SegmentSpec seg;
      seg.kind = SegmentKind::kArc;
      double sweep_deg = 0.0;
      want(seg.radius, "arc radius");
      want(sweep_deg, "arc sweep");
      seg.sweep_rad = sweep_deg * kPi / 180.0;
      cfg.segments.push_back(seg);
    } else {
      throw TrackError("track config line " + std::to_string(lineno) + ": unknown keyword '" +
                       tok + "'");
    }
    std::string extra;
    if (ls >> extra)
      throw TrackError("track config line " + std::to_string(lineno) + ": trailing token '" +
                       extra + "'");
  }
  if (!have_width) throw TrackError("track config: missing width line");
  if (cfg.segments.empty()) throw TrackError("track config: no segments");
  return cfg;
}

TrackConfig parse_track_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_track_config(in);
}

TrackConfig load_track_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TrackError("cannot open track config: " + path);
  return parse_track_config(in);
}

Track Track::build(const TrackConfig& cfg) {
  if (!(cfg.width > 0.0)) throw TrackError("track width must be > 0");
  Track t;
  t.width_ = cfg.width;
  t.min_radius_ = std::numeric_limits<double>::infinity();

  Pose cursor;  // starts at origin, heading +x
  double s = 0.0;
  for (const auto& spec : cfg.segments) {
    Segment seg{};
    seg.kind = spec.kind;
    seg.start = cursor;
    seg.s0 = s;
    if (spec.kind == SegmentKind::kStraight) {
      if (!(spec.length > 0.0)) throw TrackError("straight length must be > 0");
      seg.length = spec.length;
      seg.radius = 0.0;
      seg.sweep = 0.0;
      cursor.pos = cursor.pos + seg.length * heading_dir(cursor.heading);
    } else {
      if (!(spec.radius > 0.0)) throw TrackError("arc radius must be > 0");
      if (spec.radius <= cfg.width)
        throw TrackError("arc radius must exceed track width");
      if (spec.sweep_rad == 0.0) throw TrackError("arc sweep must be nonzero");
      seg.radius = spec.radius;
      seg.sweep = spec.sweep_rad;
      seg.length = spec.radius * std::abs(spec.sweep_rad);
      const double side = (spec.sweep_rad > 0.0) ? 1.0 : -1.0;
      seg.center = cursor.pos + spec.radius * (side > 0 ? left_normal(cursor.heading)
                                                        : right_normal(cursor.heading));
      // Advance the cursor along the arc.
      const double phi0 = std::atan2(cursor.pos.y - seg.center.y, cursor.pos.x - seg.center.x);
      const double phi1 = phi0 + spec.sweep_rad;
      cursor.pos = seg.center + spec.radius * Vec2{std::cos(phi1), std::sin(phi1)};
      cursor.heading = cursor.heading + spec.sweep_rad;
      t.min_radius_ = std::min(t.min_radius_, spec.radius);
    }
    s += seg.length;
    t.segments_.push_back(seg);
  }
  t.length_ = s;

  const double pos_err = (cursor.pos - Vec2{0.0, 0.0}).norm();
  if (pos_err > kClosurePosTol)
    throw TrackError("track does not close: endpoint " + std::to_string(pos_err) +
                     " m from start");
  // Heading must return to the start modulo full turns.
  const double ang_err = std::abs(wrap_angle(cursor.heading));
  if (ang_err > kClosureAngTol)
    throw TrackError("track does not close: heading off by " + std::to_string(ang_err) + " rad");
  if (!std::isfinite(t.min_radius_)) t.min_radius_ = t.length_;  // no arcs: generous bound
  return t;
}

double Track::wrap_station(double s) const {
  s = std::fmod(s, length_);
  if (s < 0.0) s += length_;
  return s;
}

double Track::wrap_rel(double dx) const {
  dx = std::fmod(dx, length_);
  if (dx <= -0.5 * length_) dx += length_;
  if (dx > 0.5 * length_) dx -= length_;
  return dx;
}

const Track::Segment& Track::segment_at(double s, double* local_s) const {
  s = wrap_station(s);
  // Few segments on any realistic circuit: linear scan is the fast path.
  for (size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    if (s < seg.s0 + seg.length || i + 1 == segments_.size()) {
      *local_s = s - seg.s0;
      return seg;
    }
  }
  *local_s = 0.0;
  return segments_.front();  // unreachable
}

Pose Track::boundary_pose(double s) const {
  double u = 0.0;
  const Segment& seg = segment_at(s, &u);
  if (seg.kind == SegmentKind::kStraight) {
    return {seg.start.pos + u * heading_dir(seg.start.heading), seg.start.heading};
  }
  const double dphi = (seg.sweep > 0.0 ? 1.0 : -1.0) * (u / seg.radius);
  const double phi0 =
      std::atan2(seg.start.pos.y - seg.center.y, seg.start.pos.x - seg.center.x);
  const double phi = phi0 + dphi;
  return {seg.center + seg.radius * Vec2{std::cos(phi), std::sin(phi)},
          seg.start.heading + (seg.sweep > 0.0 ? u / seg.radius : -u / seg.radius)};
}

double Track::curvature(double s) const {
  double u = 0.0;
  const Segment& seg = segment_at(s, &u);
  if (seg.kind == SegmentKind::kStraight) return 0.0;
  return (seg.sweep > 0.0 ? 1.0 : -1.0) / seg.radius;
}

Vec2 Track::position(double s, double y) const {
  const Pose b = boundary_pose(s);
  return b.pos + y * right_normal(b.heading);
}

Track::Projection Track::project(const Vec2& p) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  Projection best{0.0, 0.0};
  for (const auto& seg : segments_) {
    double s_loc = 0.0;
    if (seg.kind == SegmentKind::kStraight) {
      const Vec2 t = heading_dir(seg.start.heading);
      s_loc = std::clamp((p - seg.start.pos).dot(t), 0.0, seg.length);
    } else {
      const Vec2 r = p - seg.center;
      if (r.norm() < 1e-12) continue;  // at the arc center: no useful angle
      const double phi0 =
          std::atan2(seg.start.pos.y - seg.center.y, seg.start.pos.x - seg.center.x);
      const double phi = std::atan2(r.y, r.x);
      // Angular progress along the sweep direction, wrapped to [0, 2*pi).
      double prog = (seg.sweep > 0.0) ? (phi - phi0) : (phi0 - phi);
      prog = std::fmod(prog, 2.0 * kPi);
      if (prog < 0.0) prog += 2.0 * kPi;
      const double span = std::abs(seg.sweep);
      if (prog > span) {
        // Outside the angular window: snap to the nearer end.
        prog = (prog - span < 2.0 * kPi - prog) ? span : 0.0;
      }
      s_loc = seg.radius * prog;
    }
    const double s_abs = seg.s0 + s_loc;
    const Pose b = boundary_pose(s_abs);
    // Compare by distance to the boundary foot point; the lateral offset is
    // read off in the foot point's own frame so endpoint-clamped candidates
    // stay consistent.
    const double foot_d2 = (p - b.pos).norm_sq();
    if (foot_d2 < best_d2) {
      best_d2 = foot_d2;
      best = {wrap_station(s_abs), (p - b.pos).dot(right_normal(b.heading))};
    }
  }
  if (std::sqrt(best_d2) > min_radius_)
    throw TrackError("projection ambiguous: point too far off-track");
  return best;
}

RaPoint Track::to_road_aligned(double ref_station, const CartesianState& cs) const {
  const Projection pr = project(cs.pos);
  const Pose b = boundary_pose(pr.s);
  const Vec2 t = heading_dir(b.heading);
  const Vec2 nr = right_normal(b.heading);
  RaPoint q;
  q.x = wrap_rel(pr.s - wrap_station(ref_station));
  q.y = pr.y;
  q.x_dot = cs.vel.dot(t);
  q.y_dot = cs.vel.dot(nr);
  return q;
}

CartesianState Track::to_cartesian(double ref_station, const RaPoint& q) const {
  const double s = wrap_station(ref_station + q.x);
  const Pose b = boundary_pose(s);
  const Vec2 t = heading_dir(b.heading);
  const Vec2 nr = right_normal(b.heading);
  CartesianState cs;
  cs.pos = b.pos + q.y * nr;
  cs.vel = q.x_dot * t + q.y_dot * nr;
  return cs;
}

}  // namespace racectl
