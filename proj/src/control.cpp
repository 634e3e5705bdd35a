#include "racectl/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace racectl {

PursuitResult pure_pursuit(const Vec2& pos, double heading, double v,
                           const TrackedPath& path, const ControlGains& g) {
  PursuitResult r;
  const double ld = std::max(g.k_lookahead * v, g.min_lookahead);
  if (path.points.size() < 2) {
    r.degraded = true;
    r.target_speed = path.speeds.empty() ? 0.0 : path.speeds.back();
    return r;
  }

  // First path point at (or past) the lookahead radius.
  std::size_t hit = path.points.size();
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    if ((path.points[i] - pos).norm() >= ld) {
      hit = i;
      break;
    }
  }

  Vec2 goal;
  if (hit == path.points.size()) {
    // Path ends inside the lookahead circle: aim at its end.
    goal = path.points.back();
    r.target_speed = path.speeds.back();
    r.degraded = true;
  } else if (hit == 0) {
    goal = path.points.front();
    r.target_speed = path.speeds.front();
  } else {
    // Circle/segment intersection between hit-1 (inside) and hit (outside).
    const Vec2 a = path.points[hit - 1] - pos;
    const Vec2 d = path.points[hit] - path.points[hit - 1];
    const double dd = d.norm_sq();
    double u = 1.0;
    if (dd > 1e-12) {
      const double ad = a.dot(d);
      const double disc = ad * ad + dd * (ld * ld - a.norm_sq());
      if (disc >= 0.0) u = std::clamp((-ad + std::sqrt(disc)) / dd, 0.0, 1.0);
    }
    goal = path.points[hit - 1] + d * u;
    r.target_speed = path.speeds[hit - 1] + u * (path.speeds[hit] - path.speeds[hit - 1]);
  }

  const Vec2 rel = goal - pos;
  const double dist = rel.norm();
  if (dist < 1e-9 || v < 1e-9) {
    r.omega_desired = 0.0;
    return r;
  }
  const double alpha = wrap_angle(std::atan2(rel.y, rel.x) - heading);
  r.omega_desired = 2.0 * v * std::sin(alpha) / std::max(ld, dist);
  return r;
}

double steering_command(double omega_desired, double omega, double v,
                        double steer_gain, const ControlGains& g) {
  const double ff = (steer_gain > 0.0)
                        ? g.k_steer_ff * omega_desired / (steer_gain * std::max(v, 0.5))
                        : 0.0;
  return std::clamp(ff + g.k_omega * (omega_desired - omega), -1.0, 1.0);
}

double desired_speed(const TrackedPath& path, double t_now, const ControlGains& g,
                     const std::optional<FollowTarget>& follow) {
  double v_profile = 0.0;
  if (!path.speeds.empty()) {
    const double t = t_now + g.preview_time;
    if (path.times.size() < 2 || t >= path.times.back()) {
      v_profile = path.speeds.back();
    } else if (t <= path.times.front()) {
      v_profile = path.speeds.front();
    } else {
      const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - path.times.begin());
      const double t0 = path.times[i - 1], t1 = path.times[i];
      const double u = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
      v_profile = path.speeds[i - 1] + u * (path.speeds[i] - path.speeds[i - 1]);
    }
  }
  if (follow) {
    const double v_follow =
        follow->leader_speed - g.k_follow * (g.follow_lookahead - follow->gap);
    return std::max(0.0, std::min(v_profile, v_follow));
  }
  return std::max(0.0, v_profile);
}

double throttle_command(double v_desired, double v, const ControlGains& g) {
  return std::clamp(g.k_v * (v_desired - v), -1.0, 1.0);
}

VehicleController::VehicleController(const Track& track, const RacelineView& raceline,
                                     const PlannerConfig& pcfg, const PredictionParams& pred,
                                     const VehicleParams& vparams, const ControlGains& gains)
    : track_(&track),
      planner_(track, raceline, pcfg, pred, vparams),
      gains_(gains),
      vparams_(vparams),
      bound_(SafetyBound::from_vehicle(vparams.length, vparams.width)) {}

Commands VehicleController::update(const SensorSnapshot& snap, double dt_cycle,
                                   ControllerDebug* dbg) {
  const double ref = snap.ego_station;
  const Vec2 ego_vel = heading_dir(snap.ego.heading) * snap.ego.v;
  const RaPoint ego_ra = track_->to_road_aligned(ref, {snap.ego.pos, ego_vel});

  EndPoint ego_pt{0.0, ego_ra.y, std::max(ego_ra.x_dot, 0.5), ego_ra.y_dot};

  std::vector<OpponentState> opps;
  opps.reserve(snap.opponents.size());
  for (const auto& o : snap.opponents) {
    const RaPoint q = track_->to_road_aligned(ref, {o.pos, o.vel});
    opps.push_back({q.x, q.y, q.x_dot, q.y_dot, o.omega});
  }

  PlanResult plan = planner_.plan(ego_pt, ref, opps, dt_cycle, snap.ego_slip);

  TrackedPath path;
  path.points.reserve(plan.maneuver.samples.size());
  path.speeds.reserve(plan.maneuver.samples.size());
  path.times.reserve(plan.maneuver.samples.size());
  for (std::size_t i = 0; i < plan.maneuver.samples.size(); ++i) {
    const auto& smp = plan.maneuver.samples[i];
    const CartesianState cs =
        track_->to_cartesian(ref, {smp.q.x, smp.q.y, smp.q.x_dot, smp.q.y_dot});
    path.points.push_back(cs.pos);
    path.speeds.push_back(plan.maneuver.speed_profile[i]);
    path.times.push_back(smp.t);
  }

  const PursuitResult pp = pure_pursuit(snap.ego.pos, snap.ego.heading, snap.ego.v, path, gains_);

  // Following override: when the planner is yielding (its selection is speed-
  // reduced or the fallback), a leader sharing the lane the maneuver heads
  // for caps the speed target and station-keeps at the follow distance.
  // While the selection is a certified-free maneuver the planner owns the
  // speed — capping there would bleed off the slipstream surplus that makes
  // a pass possible.
  const bool yielding =
      plan.fallback || plan.candidates[plan.selected].reduced;
  const double goal_y =
      plan.maneuver.samples.empty() ? ego_ra.y : plan.maneuver.samples.back().q.y;
  std::optional<FollowTarget> follow;
  if (yielding) {
    for (std::size_t i = 0; i < snap.opponents.size(); ++i) {
      const auto& q = opps[i];
      const double lane_gap = std::abs(q.y - goal_y);
      if (lane_gap > bound_.half_width + 0.5 * vparams_.width) continue;
      if (q.x <= 0.0 || q.x >= gains_.follow_engage * gains_.follow_lookahead) continue;
      if (!follow || q.x < follow->gap) follow = FollowTarget{q.x_dot, q.x};
    }
  }

  const double v_d = desired_speed(path, 0.0, gains_, follow);

  if (const char* dbg_env = std::getenv("RACE_DBG")) {
    double t0 = 100.0, t1 = 140.0;
    std::sscanf(dbg_env, "%lf:%lf", &t0, &t1);
    if (snap.t >= t0 && snap.t < t1) {
      double gap_ahead = 1e9, lead_v = 0.0, lead_y = 0.0;
      for (const auto& q : opps) {
        if (q.x > 0.0 && q.x < gap_ahead) { gap_ahead = q.x; lead_v = q.x_dot; lead_y = q.y; }
      }
      const auto& ci = plan.candidates[plan.selected];
      std::fprintf(stderr,
                   "t=%.2f s=%7.1f y=%5.2f v=%5.2f vd=%5.2f slip=%.3f gy=%5.2f "
                   "gap=%6.1f lv=%5.2f ly=%5.2f sel=%d kind=%d red=%d free=%d fb=%d foll=%d\n",
                   snap.t, snap.ego_station, ego_ra.y, snap.ego.v, v_d, snap.ego_slip, goal_y,
                   gap_ahead, lead_v, lead_y, plan.selected, static_cast<int>(ci.kind),
                   ci.reduced ? 1 : 0, ci.free_of_traffic ? 1 : 0, plan.fallback ? 1 : 0,
                   follow ? 1 : 0);
    }
  }

  Commands cmd;
  cmd.steer = steering_command(pp.omega_desired, snap.ego.omega, snap.ego.v,
                               vparams_.steer_gain, gains_);
  cmd.throttle = throttle_command(v_d, snap.ego.v, gains_);

  if (dbg) {
    dbg->plan = std::move(plan);
    dbg->following = follow.has_value();
    dbg->v_desired = v_d;
  }
  return cmd;
}

}  // namespace racectl
