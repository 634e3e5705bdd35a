#include "racectl/planner.hpp"

#include <algorithm>
#include <cmath>

namespace racectl {

std::vector<double> lateral_shift_targets(double width, int n, double d_min) {
  if (n < 2) throw PlanError("lateral_shift_targets: need at least two targets");
  if (!(width > 2.0 * d_min))
    throw PlanError("lateral_shift_targets: width must exceed 2 * d_min");
  std::vector<double> ys(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    ys[static_cast<size_t>(i)] =
        d_min + static_cast<double>(i) * (width - 2.0 * d_min) / static_cast<double>(n - 1);
  return ys;
}

Maneuver build_lateral_shift(const EndPoint& ego, double target_y, const PlannerConfig& cfg) {
  if (!(ego.x_dot > 0.0)) throw PlanError("build_lateral_shift: ego x_dot must be > 0");
  const double lead =
      std::abs(target_y - ego.y) * cfg.shift_dist_per_m + cfg.shift_dist_base;
  if (lead >= cfg.x_max) throw PlanError("build_lateral_shift: q1 beyond horizon");
  std::vector<EndPoint> pts;
  pts.push_back(ego);
  pts.push_back({ego.x + lead, target_y, ego.x_dot, 0.0});
  if (lead < cfg.x_max - 1e-6)
    pts.push_back({ego.x + cfg.x_max, target_y, ego.x_dot, 0.0});
  Maneuver man = connect_points(pts, cfg.mass, cfg.dt);
  man.kind = ManeuverKind::kLateralShift;
  man.shift_target = target_y;
  return man;
}

Maneuver build_raceline_merge(const EndPoint& ego, double ego_station,
                              const RacelineView& view, const PlannerConfig& cfg) {
  if (!(ego.x_dot > 0.0)) throw PlanError("build_raceline_merge: ego x_dot must be > 0");

  // First solution of: lead(x) = |y_rl(x) - y_ego| * gain + base == x,
  // scanned then bisected. Falls back to x_max / 2 when no crossing exists
  // inside the horizon.
  auto residual = [&](double x) {
    const double y_rl = view.offset_at(ego_station + x);
    return x - (std::abs(y_rl - ego.y) * cfg.merge_dist_per_m + cfg.merge_dist_base);
  };
  const double scan_step = 2.0;
  double x_merge = -1.0;
  double prev_x = 0.0;
  double prev_f = residual(0.0);
  if (prev_f >= 0.0) x_merge = std::max(cfg.merge_dist_base, scan_step);
  for (double x = scan_step; x <= cfg.x_max && x_merge < 0.0; x += scan_step) {
    const double f = residual(x);
    if (f >= 0.0) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) >= 0.0 ? hi : lo) = mid;
      }
      x_merge = 0.5 * (lo + hi);
      break;
    }
    prev_x = x;
    prev_f = f;
  }
  (void)prev_f;
  if (x_merge < 0.0) x_merge = 0.5 * cfg.x_max;  // documented fallback

  std::vector<EndPoint> pts;
  pts.push_back(ego);
  const double tail_gap = 10.0;  // m, keep a final leg to the horizon
  if (x_merge > cfg.x_max - tail_gap) x_merge = cfg.x_max - tail_gap;
  if (x_merge < 1e-6) x_merge = 1e-6;
  const double y1 = view.offset_at(ego_station + x_merge);
  const double s1 = view.offset_slope_at(ego_station + x_merge);
  pts.push_back({ego.x + x_merge, y1, ego.x_dot, s1 * ego.x_dot});
  const double y2 = view.offset_at(ego_station + cfg.x_max);
  const double s2 = view.offset_slope_at(ego_station + cfg.x_max);
  pts.push_back({ego.x + cfg.x_max, y2, ego.x_dot, s2 * ego.x_dot});

  Maneuver man = connect_points(pts, cfg.mass, cfg.dt);
  man.kind = ManeuverKind::kRacelineMerge;
  return man;
}

Planner::Planner(const Track& track, const RacelineView& raceline, const PlannerConfig& cfg,
                 const PredictionParams& pred, const VehicleParams& vehicle)
    : track_(&track),
      raceline_(&raceline),
      cfg_(cfg),
      pred_(pred),
      vehicle_(vehicle),
      accel_(make_accel_model(vehicle)),
      ego_bound_(SafetyBound::from_vehicle(vehicle.length, vehicle.width)),
      opp_bound_(SafetyBound::from_vehicle(vehicle.length, vehicle.width)) {}

namespace {
constexpr double kMinCapSpeed = 5.0;  // m/s floor so profiles stay drivable
}

double Planner::lat_speed_cap(double station, double offset, double a_reserve) const {
  constexpr double kNoCap = std::numeric_limits<double>::infinity();
  const double kappa_b = track_->curvature(station);
  const double denom = 1.0 + offset * kappa_b;
  const double kappa_path = (std::abs(denom) > 1e-6) ? kappa_b / denom : kappa_b;
  const double k = std::abs(kappa_path);
  const double f = cfg_.lat_fraction;
  const double mu = vehicle_.mu;
  const double cdm = vehicle_.c_down / vehicle_.mass;
  if (k < 1e-9) return kNoCap;
  // Solve v^2 k + a_reserve = f mu (g + cdm v^2) in closed form. Grip caps
  // only; the drag balance limits straights through the longitudinal model.
  const double denom2 = k - f * mu * cdm;
  if (denom2 <= 1e-12) return kNoCap;
  const double budget = f * mu * vehicle_.g - a_reserve;
  if (budget <= 0.0) return kMinCapSpeed;
  return std::max(std::sqrt(budget / denom2), kMinCapSpeed);
}

PathConstraints Planner::chart_constraints(const Maneuver& m, double ego_station) const {
  PathConstraints pc;
  const size_t n = m.samples.size();
  pc.v_cap.resize(n);
  pc.arc_scale.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double x = m.samples[i].q.x;
    const double y = m.samples[i].q.y;
    const double s = track_->wrap_station(ego_station + x);
    double cap = lat_speed_cap(s, y, cfg_.lat_margin);
    // Riding the race line implies riding its speed profile — but only where
    // that profile is grip- or braking-limited. Where the line runs at the
    // clean-air drag ceiling the candidate's own model sets the ceiling, so a
    // towed car may plan above the line speed (that is what starts a pass).
    const double y_rl = raceline_->offset_at(s);
    const double v_rl = raceline_->speed_at(s);
    if (std::abs(y - y_rl) <= cfg_.rl_follow_band && v_rl < accel_.v_max - 0.5)
      cap = std::min(cap, v_rl);
    pc.v_cap[i] = cap;
    pc.arc_scale[i] = std::max(0.1, 1.0 + y * track_->curvature(s));
  }
  // Hold each cap for cap_release_dist beyond where it stops binding, so the
  // profile does not release into acceleration while still inside a corner.
  if (cfg_.cap_release_dist > 0.0 && n > 1) {
    std::vector<double> held(n);
    for (size_t i = 0; i < n; ++i) {
      double cap = pc.v_cap[i];
      for (size_t j = i; j-- > 0;) {
        if (m.samples[i].q.x - m.samples[j].q.x > cfg_.cap_release_dist) break;
        cap = std::min(cap, pc.v_cap[j]);
      }
      held[i] = cap;
    }
    pc.v_cap = std::move(held);
  }
  return pc;
}

PlanResult Planner::plan(const EndPoint& ego, double ego_station,
                         const std::vector<OpponentState>& opponents,
                         double dt_since_last, double drag_scale) {
  if (!(ego.x_dot > 0.0)) throw PlanError("plan: ego must be moving forward");
  state_.time_since_switch += dt_since_last;
  const AccelModel ego_model =
      (drag_scale == 1.0) ? accel_ : make_accel_model(vehicle_, drag_scale);

  const double v0 = std::hypot(ego.x_dot, ego.y_dot);
  const double w = track_->width();

  // Opponent predictions (shared across candidates). Vehicles fully blocked
  // behind the ego and vehicles beyond sensor range are ignored.
  std::vector<Maneuver> predictions;
  for (const auto& opp : opponents) {
    if (std::abs(opp.x) > cfg_.sensor_range) continue;
    if (is_fully_blocked_behind(ego.y, ego_bound_, opp.x, opp.y, opp_bound_)) continue;
    // Traffic strictly behind carries the avoidance burden itself; braking
    // for a predicted overtake from the rear only produces lockstep mutual
    // yielding. Lateral safety against cars close behind is the racing-room
    // wall's job.
    if (opp.x < 0.0) continue;
    if (!(opp.x_dot > 0.0)) continue;  // not making forward progress: ignore
    auto limits_fn = [this, ego_station](const Maneuver& man) {
      return chart_constraints(man, ego_station);
    };
    predictions.push_back(
        predict(*track_, ego_station, opp, pred_, accel_, limits_fn));
  }
  std::vector<Blocker> blockers;
  blockers.reserve(predictions.size());
  for (const auto& p : predictions) blockers.push_back({&p, &opp_bound_});

  // Racing-room wall: a car running alongside must not be converged on
  // laterally, no matter how fast its prediction says it will pull clear.
  // Speed reductions never change a maneuver's geometry, so two cars slowing
  // in lockstep could otherwise sweep into each other while each predicts
  // the other escaping ahead.
  std::vector<const OpponentState*> alongside;
  for (const auto& opp : opponents) {
    if (std::abs(opp.x) <= cfg_.guard_x && opp.x_dot > 0.0) alongside.push_back(&opp);
  }
  const double wall_clear = ego_bound_.half_width + opp_bound_.half_width;
  auto wall_block_time = [&](const Maneuver& man) {
    double first = std::numeric_limits<double>::infinity();
    for (const auto* opp : alongside) {
      // Converging below the clearance is forbidden; holding the current
      // gap or widening it is always allowed, so an escape lane exists even
      // once two cars are already close. The wall sits at the opponent's
      // current lane — extrapolating its lateral rate would let transient
      // wiggles paint phantom walls across half the track — and only binds
      // where the maneuver is longitudinally co-located with the opponent
      // (constant-speed extrapolation), so crossing its lane well ahead of
      // or behind it stays legal.
      // Approach down to the clearance is fine; once inside it (spawn, or a
      // battle that has already closed up) the gap may only be held, never
      // shaved further — a per-replan allowance would ratchet pairs into
      // contact over a long corner.
      const double floor_gap = std::min(wall_clear - 0.05,
                                        std::abs(ego.y - opp->y) - 0.001);
      const double co_located =
          ego_bound_.half_length + opp_bound_.half_length;
      for (const auto& smp : man.samples) {
        if (smp.t > cfg_.guard_t) break;
        const double x_rel = smp.q.x - (opp->x + opp->x_dot * smp.t);
        if (std::abs(x_rel) > co_located) continue;
        if (std::abs(smp.q.y - opp->y) < floor_gap) {
          first = std::min(first, smp.t);
          break;
        }
      }
    }
    return first;
  };

  // Candidate set: N lateral shifts plus the race-line merge.
  const auto targets = lateral_shift_targets(w, cfg_.n_shift_targets, cfg_.d_min);
  std::vector<Maneuver> cands;
  std::vector<CandidateInfo> infos;
  for (double ty : targets) {
    Maneuver man;
    try {
      man = build_lateral_shift(ego, ty, cfg_);
    } catch (const PlanError&) {
      // Lead distance reached past the horizon: steepen the shift so the
      // candidate set keeps its full size.
      PlannerConfig clamped = cfg_;
      clamped.shift_dist_per_m = 0.0;
      clamped.shift_dist_base = cfg_.x_max - 20.0;
      man = build_lateral_shift(ego, ty, clamped);
    }
    CandidateInfo info;
    info.kind = ManeuverKind::kLateralShift;
    info.shift_target = ty;
    cands.push_back(std::move(man));
    infos.push_back(info);
  }
  {
    Maneuver man = build_raceline_merge(ego, ego_station, *raceline_, cfg_);
    CandidateInfo info;
    info.kind = ManeuverKind::kRacelineMerge;
    info.shift_target = std::numeric_limits<double>::quiet_NaN();
    cands.push_back(std::move(man));
    infos.push_back(info);
  }

  // Re-time, classify, reduce.
  for (size_t i = 0; i < cands.size(); ++i) {
    Maneuver& man = cands[i];
    CandidateInfo& info = infos[i];
    replan_velocity(man, v0, ego_model, chart_constraints(man, ego_station));

    CollisionReport rep;
    rep.min_clearance = std::numeric_limits<double>::infinity();
    for (const auto& pred : predictions) {
      const CollisionReport r = trajectories_collide(man, pred, ego_bound_, opp_bound_);
      rep.min_clearance = std::min(rep.min_clearance, r.min_clearance);
      if (r.collides && (!rep.collides || r.first_time < rep.first_time)) {
        rep.collides = true;
        rep.first_time = r.first_time;
      }
    }
    if (!std::isfinite(rep.min_clearance)) rep.min_clearance = 0.0;
    const double wall_t = wall_block_time(man);
    info.wall_time = wall_t;
    if (wall_t < rep.first_time || (std::isfinite(wall_t) && !rep.collides)) {
      rep.collides = true;
      rep.first_time = wall_t;
    }
    man.collision = rep;

    if (rep.collides || man.infeasible) {
      info.reduced = true;
      const CollisionReport after = reduce_speed_to_avoid(
          man, blockers, ego_bound_, v0, ego_model, chart_constraints(man, ego_station));
      info.infeasible = man.infeasible;
      double ft =
          after.collides ? after.first_time : std::numeric_limits<double>::infinity();
      // Slowing down never fixes a lateral convergence; a walled maneuver
      // stays unselectable.
      const double wall_after = wall_block_time(man);
      info.wall_time = std::min(wall_t, wall_after);
      if (std::isfinite(wall_after)) {
        info.infeasible = true;
        ft = std::min(ft, wall_after);
      }
      info.first_collision_time = ft;
      info.min_clearance = after.min_clearance;
    } else {
      info.free_of_traffic = true;
      info.first_collision_time = std::numeric_limits<double>::infinity();
      info.min_clearance = rep.min_clearance;
    }

    // Horizon traversal estimate; truncated maneuvers pay for the remainder
    // at their terminal speed.
    const double target_x = ego.x + cfg_.x_max;
    const double covered_x = man.samples.back().q.x;
    double t_eff = man.t_total;
    if (covered_x < target_x - 1e-6) {
      const double v_end = std::max(man.speed_profile.back(), 1.0);
      t_eff += (target_x - covered_x) / v_end;
    }
    info.traverse_time = t_eff;
  }

  // Race-line reward: the single free candidate closest to the line.
  int opt_idx = -1;
  double best_dev = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cands.size(); ++i) {
    double dev = 0.0;
    size_t cnt = 0;
    for (const auto& smp : cands[i].samples) {
      const double s = ego_station + smp.q.x;
      dev += std::abs(smp.q.y - raceline_->offset_at(s));
      ++cnt;
    }
    dev = (cnt > 0) ? dev / static_cast<double>(cnt) : 0.0;
    infos[i].deviation = dev;
    if (infos[i].free_of_traffic && dev < best_dev) {
      best_dev = dev;
      opt_idx = static_cast<int>(i);
    }
  }
  if (opt_idx >= 0) infos[static_cast<size_t>(opt_idx)].opt_reward = cfg_.r_opt;

  // Hysteresis bonus for the incumbent.
  const double keep =
      std::max(0.0, cfg_.r_keep - cfg_.r_decay * state_.time_since_switch);
  if (state_.last_selected >= 0 &&
      state_.last_selected < static_cast<int>(infos.size()))
    infos[static_cast<size_t>(state_.last_selected)].keep_bonus = keep;

  for (auto& info : infos)
    info.cost = info.traverse_time - info.opt_reward - info.keep_bonus;

  // Selection: cheapest collision-free candidate; when none exists, the one
  // that stays clear the longest (then widest).
  int pick = -1;
  PlanResult result;
  for (size_t i = 0; i < infos.size(); ++i) {
    // A reduced candidate is selectable only when the reduction both stayed
    // within the braking envelope and verified collision-free.
    const bool selectable =
        infos[i].free_of_traffic || (infos[i].reduced && !infos[i].infeasible);
    if (!selectable) continue;
    if (pick < 0 || infos[i].cost < infos[static_cast<size_t>(pick)].cost - 1e-12 ||
        (std::abs(infos[i].cost - infos[static_cast<size_t>(pick)].cost) <= 1e-12 &&
         static_cast<int>(i) == state_.last_selected)) {
      pick = static_cast<int>(i);
    }
  }
  if (pick < 0) {
    result.fallback = true;
    // A maneuver that converges on an alongside car loses to any that does
    // not, however late its first predicted contact: predictions of cars
    // mid-maneuver sweep wide and score lane-crossing dives as "safe
    // longest", while holding station behind the traffic never is worse
    // than steering across it.
    bool best_walled = true;
    double best_t = -1.0;
    double best_cl = -1.0;
    for (size_t i = 0; i < infos.size(); ++i) {
      const bool walled = std::isfinite(infos[i].wall_time);
      const double ft = std::isfinite(infos[i].first_collision_time)
                            ? infos[i].first_collision_time
                            : std::numeric_limits<double>::max();
      const bool better =
          (best_walled && !walled) ||
          (walled == best_walled &&
           (ft > best_t + 1e-12 ||
            (std::abs(ft - best_t) <= 1e-12 && infos[i].min_clearance > best_cl)));
      if (better) {
        best_walled = walled;
        best_t = ft;
        best_cl = infos[i].min_clearance;
        pick = static_cast<int>(i);
      }
    }
  }

  if (pick != state_.last_selected) {
    state_.last_selected = pick;
    state_.time_since_switch = 0.0;
  }
  result.selected = pick;
  result.candidates = std::move(infos);
  result.maneuver = std::move(cands[static_cast<size_t>(pick)]);
  return result;
}

}  // namespace racectl
