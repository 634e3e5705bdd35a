#include "racectl/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace racectl {

SafetyBound SafetyBound::from_vehicle(double length, double width, double front_factor,
                                      double side_factor) {
  SafetyBound b;
  b.front_margin = front_factor * length;
  b.rear_margin = front_factor * length;
  b.side_margin = side_factor * width;
  b.half_length = 0.5 * (length + b.front_margin + b.rear_margin);
  b.half_width = 0.5 * width + b.side_margin;
  return b;
}

namespace {

// Rectangle center after applying asymmetric front/rear margins.
Vec2 bound_center(const ObbPose& p, const SafetyBound& b) {
  const double shift = 0.5 * (b.front_margin - b.rear_margin);
  return p.center + shift * heading_dir(p.heading);
}

// Largest projected gap over the four SAT axes; <= 0 means overlap.
double sat_separation(const ObbPose& pa, const SafetyBound& ba, const ObbPose& pb,
                      const SafetyBound& bb) {
  const Vec2 ca = bound_center(pa, ba);
  const Vec2 cb = bound_center(pb, bb);
  const Vec2 d = cb - ca;
  const Vec2 axes[4] = {heading_dir(pa.heading),
                        {-std::sin(pa.heading), std::cos(pa.heading)},
                        heading_dir(pb.heading),
                        {-std::sin(pb.heading), std::cos(pb.heading)}};
  const Vec2 ea{ba.half_length, ba.half_width};
  const Vec2 eb{bb.half_length, bb.half_width};
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& ax : axes) {
    const double ra = ea.x * std::abs(ax.dot(axes[0])) + ea.y * std::abs(ax.dot(axes[1]));
    const double rb = eb.x * std::abs(ax.dot(axes[2])) + eb.y * std::abs(ax.dot(axes[3]));
    const double gap = std::abs(d.dot(ax)) - (ra + rb);
    best = std::max(best, gap);
  }
  return best;
}

ObbPose pose_from_sample(const ManeuverSample& s, double fallback_heading) {
  const double sp = std::hypot(s.q.x_dot, s.q.y_dot);
  ObbPose p;
  p.center = {s.q.x, s.q.y};
  p.heading = (sp > 1e-9) ? std::atan2(s.q.y_dot, s.q.x_dot) : fallback_heading;
  return p;
}

}  // namespace

double bounds_separation(const ObbPose& a, const SafetyBound& ba, const ObbPose& b,
                         const SafetyBound& bb) {
  return sat_separation(a, ba, b, bb);
}

bool bounds_overlap(const ObbPose& a, const SafetyBound& ba, const ObbPose& b,
                    const SafetyBound& bb) {
  return sat_separation(a, ba, b, bb) <= 0.0;
}

CollisionReport trajectories_collide(const Maneuver& c1, const Maneuver& c2,
                                     const SafetyBound& b1, const SafetyBound& b2) {
  if (std::abs(c1.dt - c2.dt) > 1e-12)
    throw PlanError("trajectories_collide: maneuvers sampled on different grids");
  CollisionReport rep;
  rep.min_clearance = std::numeric_limits<double>::infinity();
  const size_t n = std::min(c1.samples.size(), c2.samples.size());
  if (n == 0) {
    rep.min_clearance = 0.0;
    return rep;
  }
  double h1 = 0.0, h2 = 0.0;
  auto check = [&](const ObbPose& pa, const ObbPose& pb, double t) {
    const double sep = sat_separation(pa, b1, pb, b2);
    rep.min_clearance = std::min(rep.min_clearance, std::max(0.0, sep));
    if (sep <= 0.0 && !rep.collides) {
      rep.collides = true;
      rep.first_time = t;
    }
  };
  ObbPose prev1{}, prev2{};
  for (size_t i = 0; i < n; ++i) {
    const ObbPose p1 = pose_from_sample(c1.samples[i], h1);
    const ObbPose p2 = pose_from_sample(c2.samples[i], h2);
    h1 = p1.heading;
    h2 = p2.heading;
    if (i > 0) {
      // Interval midpoint guard against tunneling between grid points.
      ObbPose m1{(0.5 * (prev1.center + p1.center)),
                 prev1.heading + 0.5 * wrap_angle(p1.heading - prev1.heading)};
      ObbPose m2{(0.5 * (prev2.center + p2.center)),
                 prev2.heading + 0.5 * wrap_angle(p2.heading - prev2.heading)};
      check(m1, m2, 0.5 * (c1.samples[i - 1].t + c1.samples[i].t));
    }
    check(p1, p2, c1.samples[i].t);
    prev1 = p1;
    prev2 = p2;
  }
  if (!std::isfinite(rep.min_clearance)) rep.min_clearance = 0.0;
  return rep;
}

bool is_fully_blocked_behind(double ego_y, const SafetyBound& ego_bound, double opp_x,
                             double opp_y, const SafetyBound& opp_bound) {
  if (opp_x >= 0.0) return false;
  const double ego_lo = ego_y - ego_bound.half_width - ego_bound.side_margin;
  const double ego_hi = ego_y + ego_bound.half_width + ego_bound.side_margin;
  const double opp_lo = opp_y - opp_bound.half_width;
  const double opp_hi = opp_y + opp_bound.half_width;
  return opp_lo >= ego_lo && opp_hi <= ego_hi;
}

CollisionReport reduce_speed_to_avoid(Maneuver& cand, const std::vector<Blocker>& blockers,
                                      const SafetyBound& cand_bound, double v0,
                                      const AccelModel& model, const PathConstraints& limits) {
  if (!(v0 > 0.0)) throw PlanError("reduce_speed_to_avoid: v0 must be > 0");
  if (!model.accel) throw PlanError("reduce_speed_to_avoid: accel model not set");
  const double dt = cand.dt;
  if (!(dt > 0.0)) throw PlanError("reduce_speed_to_avoid: candidate has no dt grid");

  const PathView path(cand, limits);
  const double total_arc = path.total_arc();

  // Following margin: combined half-lengths plus a small buffer so the
  // post-reduction collision check clears with slack.
  constexpr double kFollowEps = 0.5;  // m

  // Max position (as path arc length) permitted at time t against every
  // laterally-conflicting blocker; +inf when unconstrained.
  auto arc_limit_at = [&](double t) {
    double lim = std::numeric_limits<double>::infinity();
    for (const auto& blk : blockers) {
      const Maneuver& pred = *blk.prediction;
      if (pred.samples.empty()) continue;
      const EndPoint q = sample_maneuver(pred, std::min(t, pred.t_total));
      // Candidate lateral position when alongside the blocker.
      const double arc_probe = path.arc_at_x(std::clamp(
          q.x, cand.samples.front().q.x, cand.samples.back().q.x));
      const double y_cand = path.at_arc(arc_probe).y;
      const double lat_gap = std::abs(y_cand - q.y);
      const double lat_need = cand_bound.half_width + blk.bound->half_width;
      if (lat_gap >= lat_need) continue;  // can pass beside this one
      const double margin =
          cand_bound.half_length + blk.bound->half_length + kFollowEps;
      const double x_max = q.x - margin;
      // Only blockers ahead constrain the profile; an overlap that already
      // exists at the start is caught by the SAT verification below.
      if (x_max > cand.samples.front().q.x) lim = std::min(lim, path.arc_at_x(x_max));
    }
    return lim;
  };

  // Brake-smoothed track caps: approaching a lower cap region must start
  // braking early enough.
  const double brake = std::max(model.brake_decel, 1e-3);
  const double cap_step = 1.0;  // m
  const size_t n_cap = std::max<size_t>(2, static_cast<size_t>(total_arc / cap_step) + 2);
  std::vector<double> cap_arc(n_cap), cap_v(n_cap);
  for (size_t i = 0; i < n_cap; ++i) {
    cap_arc[i] = total_arc * static_cast<double>(i) / static_cast<double>(n_cap - 1);
    cap_v[i] = std::min(path.cap_at_arc(cap_arc[i]), model.v_max);
  }
  for (size_t i = n_cap - 1; i-- > 0;) {
    const double d = cap_arc[i + 1] - cap_arc[i];
    cap_v[i] = std::min(cap_v[i], std::sqrt(cap_v[i + 1] * cap_v[i + 1] + 2.0 * brake * d));
  }
  auto eff_cap = [&](double a) {
    a = std::clamp(a, 0.0, total_arc);
    const size_t j = std::min(
        n_cap - 2, static_cast<size_t>(a / total_arc * static_cast<double>(n_cap - 1)));
    const double span = cap_arc[j + 1] - cap_arc[j];
    const double w = (span > 1e-12) ? (a - cap_arc[j]) / span : 0.0;
    return cap_v[j] + w * (cap_v[j + 1] - cap_v[j]);
  };

  // Forward simulation on the dt grid. Against the composite moving wall the
  // speed is held under the safe-following envelope sqrt(v_wall^2 + 2 b gap),
  // so braking is anticipatory; infeasible when the wall is penetrated even
  // at the brake limit.
  std::vector<double> t_grid{0.0};
  std::vector<double> arc_grid{0.0};
  std::vector<double> v_grid{std::min(v0, model.v_max)};
  bool infeasible = false;
  const double t_cap = std::max(60.0, 4.0 * cand.t_total);  // runaway guard
  double ell = 0.0;
  double v = v_grid[0];
  double t = 0.0;
  double wall_prev = arc_limit_at(0.0);
  while (ell < total_arc - 1e-9 && t < t_cap) {
    const double a_drive = std::max(0.0, model.accel(v));
    double v_next = std::min({v + a_drive * dt, model.v_max,
                              eff_cap(ell + 0.5 * v * dt)});
    const double wall = arc_limit_at(t + dt);
    if (std::isfinite(wall)) {
      const double v_wall = std::isfinite(wall_prev)
                                ? std::max(0.0, (wall - wall_prev) / dt)
                                : 0.0;
      const double gap = wall - ell;
      const double v_allow =
          (gap > 0.0) ? std::sqrt(v_wall * v_wall + 2.0 * brake * gap) : v_wall;
      v_next = std::min(v_next, v_allow);
    }
    // Brake-rate limit keeps the profile physical.
    const double v_floor = std::max(0.0, v - brake * dt);
    if (v_next < v_floor) v_next = v_floor;
    double ell_next = ell + 0.5 * (v + v_next) * dt;
    if (std::isfinite(wall) && ell_next > wall + 1e-6) infeasible = true;
    t += dt;
    ell = std::min(ell_next, total_arc);
    v = v_next;
    wall_prev = wall;
    t_grid.push_back(t);
    arc_grid.push_back(ell);
    v_grid.push_back(v);
    if (v <= 1e-6 && ell < total_arc - 1e-9) {
      // Stopped short of the path end behind a blocker; the maneuver simply
      // ends here (the horizon is re-planned every cycle anyway).
      break;
    }
  }

  // Rebuild samples from the simulated trajectory.
  const double dir0x = cand.samples.front().q.x_dot;
  const double dir0y = cand.samples.front().q.y_dot;
  const double dir0n = std::hypot(dir0x, dir0y);
  std::vector<ManeuverSample> new_samples;
  std::vector<double> new_profile;
  new_samples.reserve(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const PathView::Pt c = path.at_arc(arc_grid[i]);
    ManeuverSample smp;
    smp.t = t_grid[i];
    smp.q.x = c.x;
    smp.q.y = c.y;
    smp.q.x_dot = v_grid[i] * c.tx;
    smp.q.y_dot = v_grid[i] * c.ty;
    new_samples.push_back(smp);
    new_profile.push_back(v_grid[i]);
  }
  if (dir0n > 1e-12) {
    new_samples.front().q.x_dot = v_grid[0] * dir0x / dir0n;
    new_samples.front().q.y_dot = v_grid[0] * dir0y / dir0n;
  }
  cand.samples = std::move(new_samples);
  cand.speed_profile = std::move(new_profile);
  cand.t_total = t_grid.back();
  cand.infeasible = cand.infeasible || infeasible;

  // Verify against every blocker.
  CollisionReport worst;
  worst.min_clearance = std::numeric_limits<double>::infinity();
  for (const auto& blk : blockers) {
    const CollisionReport rep =
        trajectories_collide(cand, *blk.prediction, cand_bound, *blk.bound);
    worst.min_clearance = std::min(worst.min_clearance, rep.min_clearance);
    if (rep.collides && (!worst.collides || rep.first_time < worst.first_time)) {
      worst.collides = true;
      worst.first_time = rep.first_time;
    }
  }
  if (!std::isfinite(worst.min_clearance)) worst.min_clearance = 0.0;
  cand.collision = worst;
  if (worst.collides) cand.infeasible = true;
  return worst;
}

}  // namespace racectl
