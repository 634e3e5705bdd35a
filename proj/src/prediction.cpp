#include "racectl/prediction.hpp"

#include <algorithm>
#include <cmath>

namespace racectl {

double estimate_curvature(const OpponentState& s) {
  const double speed = std::hypot(s.x_dot, s.y_dot);
  if (!(speed > 1e-9)) throw PlanError("estimate_curvature: speed must be > 0");
  return s.omega / speed;
}

Maneuver extrapolate_constant_curvature(const Track& track, double ego_station,
                                        const OpponentState& s, const PredictionParams& p) {
  if (!(p.dt > 0.0) || !(p.t_max > 0.0))
    throw PlanError("extrapolate: dt and t_max must be > 0");
  const double speed = std::hypot(s.x_dot, s.y_dot);
  if (!(speed > 1e-9)) throw PlanError("extrapolate: speed must be > 0");
  const double kappa = estimate_curvature(s);

  // Opponent state in Cartesian space.
  const CartesianState cs0 =
      track.to_cartesian(ego_station, {s.x, s.y, s.x_dot, s.y_dot});
  const double h0 = std::atan2(cs0.vel.y, cs0.vel.x);

  Maneuver man;
  man.kind = ManeuverKind::kPredicted;
  man.dt = p.dt;
  man.t_total = p.t_max;

  const size_t n = static_cast<size_t>(std::floor(p.t_max / p.dt + 1e-9));
  for (size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * p.dt;
    CartesianState cs;
    if (std::abs(kappa) < 1e-9) {
      cs.pos = cs0.pos + (speed * t) * heading_dir(h0);
      cs.vel = cs0.vel;
    } else {
      // Circle of radius 1/kappa, center on the left of the motion for
      // positive curvature.
      const double r = 1.0 / kappa;  // signed
      const Vec2 center = cs0.pos + r * Vec2{-std::sin(h0), std::cos(h0)};
      const double dphi = kappa * speed * t;
      const double h = h0 + dphi;
      cs.pos = center - r * Vec2{-std::sin(h), std::cos(h)};
      cs.vel = speed * heading_dir(h);
    }
    ManeuverSample smp;
    smp.t = t;
    if (i == 0) {
      // Bitwise-exact start: skip the round trip through Cartesian space.
      smp.q = {s.x, s.y, s.x_dot, s.y_dot};
    } else {
      const RaPoint q = track.to_road_aligned(ego_station, cs);
      smp.q = {q.x, q.y, q.x_dot, q.y_dot};
    }
    man.samples.push_back(smp);
    man.speed_profile.push_back(speed);
  }
  if (man.samples.back().t < p.t_max - 1e-9) {
    // dt does not divide t_max: land the final sample exactly on the horizon.
    const double t = p.t_max;
    CartesianState cs;
    if (std::abs(kappa) < 1e-9) {
      cs.pos = cs0.pos + (speed * t) * heading_dir(h0);
      cs.vel = cs0.vel;
    } else {
      const double r = 1.0 / kappa;
      const Vec2 center = cs0.pos + r * Vec2{-std::sin(h0), std::cos(h0)};
      const double h = h0 + kappa * speed * t;
      cs.pos = center - r * Vec2{-std::sin(h), std::cos(h)};
      cs.vel = speed * heading_dir(h);
    }
    const RaPoint q = track.to_road_aligned(ego_station, cs);
    man.samples.push_back({t, {q.x, q.y, q.x_dot, q.y_dot}});
    man.speed_profile.push_back(speed);
  }
  return man;
}

Maneuver predict(const Track& track, double ego_station, const OpponentState& s,
                 const PredictionParams& p, const AccelModel& model,
                 const ConstraintsFn& limits_fn) {
  Maneuver raw = extrapolate_constant_curvature(track, ego_station, s, p);
  const double w = track.width();

  // First sample that breaches the d_min corridor.
  size_t hit = raw.samples.size();
  for (size_t i = 0; i < raw.samples.size(); ++i) {
    const double y = raw.samples[i].q.y;
    if (y < p.d_min || y > w - p.d_min) {
      hit = i;
      break;
    }
  }
  if (hit == raw.samples.size()) {
    // Boundary-safe: keep the raw arc's shape, re-timed under the
    // maximal-acceleration assumption.
    const PathConstraints limits = limits_fn ? limits_fn(raw) : PathConstraints{};
    replan_velocity(raw, std::hypot(s.x_dot, s.y_dot), model, limits);
    return raw;
  }

  if (!(s.x_dot > 0.0))
    throw PlanError("predict: avoidance construction needs forward motion");

  // Crossing point, interpolated between the last safe sample and the breach.
  double x_hat = raw.samples[hit].q.x;
  double y_hat = std::clamp(raw.samples[hit].q.y, p.d_min, w - p.d_min);
  if (hit > 0) {
    const auto& a = raw.samples[hit - 1].q;
    const auto& b = raw.samples[hit].q;
    const double bound = (b.y < p.d_min) ? p.d_min : (w - p.d_min);
    const double span = b.y - a.y;
    const double u = (std::abs(span) > 1e-12) ? (bound - a.y) / span : 0.0;
    x_hat = a.x + std::clamp(u, 0.0, 1.0) * (b.x - a.x);
    y_hat = bound;
  }

  // Three-point construction: current state, the avoidance point stretched
  // k_ahead times further downrange running parallel to the boundary, and the
  // horizon point at the same offset.
  EndPoint p0{s.x, s.y, s.x_dot, s.y_dot};
  EndPoint p1{p.k_ahead * (x_hat - s.x) + s.x, y_hat, s.x_dot, 0.0};
  EndPoint p2{s.x_dot * p.t_max + s.x, y_hat, s.x_dot, 0.0};

  std::vector<EndPoint> pts{p0};
  const double min_gap = std::max(1e-3, s.x_dot * p.dt);
  if (p1.x > p0.x + min_gap && p1.x < p2.x - min_gap) {
    pts.push_back(p1);
    pts.push_back(p2);
  } else if (p1.x >= p2.x - min_gap) {
    // The avoidance point lands at/beyond the horizon: parallel leg drops out.
    pts.push_back(p1);
  } else {
    // Already inside the standoff band and heading in: go parallel at once.
    pts.push_back(EndPoint{p0.x + std::max(min_gap, s.x_dot * p.dt), y_hat, s.x_dot, 0.0});
    pts.push_back(p2);
  }
  if (pts.size() == 2 && !(pts[1].x > pts[0].x + 1e-9))
    pts[1].x = pts[0].x + min_gap;

  Maneuver man = connect_points(pts, p.mass, p.dt);
  man.kind = ManeuverKind::kPredicted;
  const PathConstraints limits = limits_fn ? limits_fn(man) : PathConstraints{};
  replan_velocity(man, std::hypot(s.x_dot, s.y_dot), model, limits);
  return man;
}

}  // namespace racectl
