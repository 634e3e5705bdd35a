#include "racectl/pointmass.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace racectl {

namespace {
constexpr double kSpeedMatchTol = 1e-9;   // endpoints must share x_dot
constexpr double kZeroMotionTol = 1e-9;   // "no lateral demand" threshold
constexpr double kSwitchSlack = 1e-9;     // tolerated t_switch excursion
constexpr double kTinyAccel = 1e-12;      // treat |a| below this as force-free
}  // namespace

SegmentLaw plan_segment(const EndPoint& ps, const EndPoint& pg, double m) {
  if (!(m > 0.0)) throw PlanError("plan_segment: mass must be > 0");
  if (!(ps.x_dot > 0.0)) throw PlanError("plan_segment: start x_dot must be > 0");
  if (!(pg.x > ps.x)) throw PlanError("plan_segment: goal x must exceed start x");
  if (std::abs(pg.x_dot - ps.x_dot) > kSpeedMatchTol)
    throw PlanError("plan_segment: endpoints must share longitudinal speed");

  const double T = (pg.x - ps.x) / ps.x_dot;
  const double dy = pg.y - ps.y;
  const double v0 = ps.y_dot;
  const double vg = pg.y_dot;

  SegmentLaw law;
  law.mass = m;
  law.t_total = T;
  law.start = ps;

  // Force-free when there is no lateral demand at all.
  if (std::abs(dy) < kZeroMotionTol && std::abs(v0) < kZeroMotionTol &&
      std::abs(vg) < kZeroMotionTol) {
    law.f_y = 0.0;
    law.t_switch = 0.5 * T;
    return law;
  }

  // 2A = (T(v0+vg) - 2dy)^2 + T^2 (vg-v0)^2 >= 0 always; keep the expanded
  // form so the discriminant matches the closed-form derivation exactly.
  const double A = T * T * (v0 * v0 + vg * vg) - 2.0 * T * dy * (v0 + vg) + 2.0 * dy * dy;
  if (A < -1e-12) throw PlanError("plan_segment: negative discriminant");
  const double root = std::sqrt(std::max(0.0, 2.0 * A));

  struct Candidate {
    double a;
    double t_switch;
    bool ok;
  };
  auto evaluate = [&](double sign) -> Candidate {
    const double a = (sign * root - T * (vg + v0) + 2.0 * dy) / (T * T);
    if (std::abs(a) < kTinyAccel) {
      // Zero-force candidate: only valid when the endpoints already lie on a
      // straight constant-velocity line.
      const bool straight =
          std::abs(vg - v0) < kZeroMotionTol && std::abs(dy - v0 * T) < kZeroMotionTol;
      return {0.0, 0.5 * T, straight};
    }
    const double ts = 0.5 * ((vg - v0) / a + T);
    const bool ok = ts >= -kSwitchSlack && ts <= T + kSwitchSlack;
    return {a, std::clamp(ts, 0.0, T), ok};
  };

  const Candidate plus = evaluate(1.0);
  const Candidate minus = evaluate(-1.0);

  const Candidate* pick = nullptr;
  if (plus.ok && minus.ok) {
    if (std::abs(plus.a - minus.a) < kTinyAccel) {
      // Tie: steer toward the shift direction.
      pick = (dy >= 0.0) ? (plus.a >= 0.0 ? &plus : &minus) : (plus.a < 0.0 ? &plus : &minus);
    } else {
      pick = (std::abs(plus.a) <= std::abs(minus.a)) ? &plus : &minus;
    }
  } else if (plus.ok) {
    pick = &plus;
  } else if (minus.ok) {
    pick = &minus;
  } else {
    throw PlanError("plan_segment: switch time outside [0, T] for both root signs");
  }

  law.f_y = m * pick->a;
  law.t_switch = pick->t_switch;
  return law;
}

EndPoint sample_segment(const SegmentLaw& law, double t) {
  if (t < -kSwitchSlack || t > law.t_total + kSwitchSlack)
    throw PlanError("sample_segment: time outside [0, t_total]");
  t = std::clamp(t, 0.0, law.t_total);
  const double a = law.f_y / law.mass;
  const double ts = law.t_switch;
  const EndPoint& s = law.start;
  EndPoint q;
  q.x = s.x + s.x_dot * t;
  q.x_dot = s.x_dot;
  if (t <= ts) {
    q.y = s.y + s.y_dot * t + 0.5 * a * t * t;
    q.y_dot = s.y_dot + a * t;
  } else {
    const double y_ts = s.y + s.y_dot * ts + 0.5 * a * ts * ts;
    const double v_ts = s.y_dot + a * ts;
    const double u = t - ts;
    q.y = y_ts + v_ts * u - 0.5 * a * u * u;
    q.y_dot = s.y_dot + a * (2.0 * ts - t);
  }
  return q;
}

EndPoint Maneuver::at(double t) const {
  if (segments.empty()) throw PlanError("maneuver has no segments");
  t = std::clamp(t, 0.0, t_total);
  double base = 0.0;
  for (const auto& law : segments) {
    if (t <= base + law.t_total || &law == &segments.back())
      return sample_segment(law, std::min(t - base, law.t_total));
    base += law.t_total;
  }
  return sample_segment(segments.back(), segments.back().t_total);
}

Maneuver connect_points(const std::vector<EndPoint>& pts, double m, double dt) {
  if (pts.size() < 2) throw PlanError("connect_points: need at least two points");
  if (!(dt > 0.0)) throw PlanError("connect_points: dt must be > 0");
  for (size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].x > pts[i - 1].x))
      throw PlanError("connect_points: x must be strictly increasing");
  }
  Maneuver man;
  man.dt = dt;
  double total = 0.0;
  double peak = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    SegmentLaw law = plan_segment(pts[i - 1], pts[i], m);
    total += law.t_total;
    peak = std::max(peak, std::abs(law.f_y) / m);
    man.segments.push_back(law);
  }
  man.t_total = total;
  man.peak_lat_accel = peak;

  // dt grid from 0; ensure an exact final sample at t_total.
  const size_t n_full = static_cast<size_t>(std::floor(total / dt + 1e-9));
  for (size_t i = 0; i <= n_full; ++i) {
    const double t = static_cast<double>(i) * dt;
    man.samples.push_back({t, man.at(t)});
  }
  if (man.samples.back().t < total - 1e-9) man.samples.push_back({total, man.at(total)});
  else man.samples.back() = {total, man.at(total)};

  man.speed_profile.reserve(man.samples.size());
  for (const auto& s : man.samples)
    man.speed_profile.push_back(std::hypot(s.q.x_dot, s.q.y_dot));
  return man;
}

EndPoint sample_maneuver(const Maneuver& m, double t) {
  if (m.samples.empty()) throw PlanError("sample_maneuver: no samples");
  t = std::clamp(t, 0.0, m.samples.back().t);
  if (m.samples.size() == 1) return m.samples.front().q;
  // Uniform grid except possibly the last interval.
  size_t i = (m.dt > 0.0) ? static_cast<size_t>(t / m.dt) : 0;
  if (i >= m.samples.size() - 1) i = m.samples.size() - 2;
  while (i + 1 < m.samples.size() - 1 && t > m.samples[i + 1].t) ++i;
  while (i > 0 && t < m.samples[i].t) --i;
  const auto& a = m.samples[i];
  const auto& b = m.samples[i + 1];
  const double span = b.t - a.t;
  const double w = (span > 1e-12) ? (t - a.t) / span : 0.0;
  EndPoint q;
  q.x = a.q.x + w * (b.q.x - a.q.x);
  q.y = a.q.y + w * (b.q.y - a.q.y);
  q.x_dot = a.q.x_dot + w * (b.q.x_dot - a.q.x_dot);
  q.y_dot = a.q.y_dot + w * (b.q.y_dot - a.q.y_dot);
  return q;
}

PathView::PathView(const Maneuver& m, const PathConstraints& limits) {
  if (m.samples.size() < 2) throw PlanError("path view: maneuver too short");
  if (!limits.v_cap.empty() && limits.v_cap.size() != m.samples.size())
    throw PlanError("path view: v_cap size mismatch");
  if (!limits.arc_scale.empty() && limits.arc_scale.size() != m.samples.size())
    throw PlanError("path view: arc_scale size mismatch");
  const size_t n = m.samples.size();
  arc_.resize(n);
  x_.resize(n);
  y_.resize(n);
  cap_.resize(n);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x_[i] = m.samples[i].q.x;
    y_[i] = m.samples[i].q.y;
    cap_[i] = limits.v_cap.empty() ? std::numeric_limits<double>::infinity()
                                   : limits.v_cap[i];
    if (i > 0) {
      const double dx = x_[i] - x_[i - 1];
      const double dy = y_[i] - y_[i - 1];
      const double scale = limits.arc_scale.empty()
                               ? 1.0
                               : 0.5 * (limits.arc_scale[i] + limits.arc_scale[i - 1]);
      acc += std::hypot(scale * dx, dy);
    }
    arc_[i] = acc;
  }
}

namespace {
// Interval lookup with linear interpolation weight; clamps to the table ends.
struct Bracket {
  size_t lo;
  double w;
};
Bracket bracket(const std::vector<double>& grid, double value) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), value);
  size_t j = static_cast<size_t>(std::distance(grid.begin(), it));
  if (j == 0) return {0, 0.0};
  if (j >= grid.size()) return {grid.size() - 2, 1.0};
  const double span = grid[j] - grid[j - 1];
  const double w = (span > 1e-12) ? (value - grid[j - 1]) / span : 0.0;
  return {j - 1, w};
}
}  // namespace

PathView::Pt PathView::at_arc(double a) const {
  const Bracket b = bracket(arc_, std::clamp(a, arc_.front(), arc_.back()));
  const size_t j = b.lo;
  Pt p;
  p.x = x_[j] + b.w * (x_[j + 1] - x_[j]);
  p.y = y_[j] + b.w * (y_[j + 1] - y_[j]);
  double tx = x_[j + 1] - x_[j];
  double ty = y_[j + 1] - y_[j];
  const double tn = std::hypot(tx, ty);
  if (tn > 1e-12) {
    p.tx = tx / tn;
    p.ty = ty / tn;
  } else {
    p.tx = 1.0;
    p.ty = 0.0;
  }
  return p;
}

double PathView::cap_at_arc(double a) const {
  const Bracket b = bracket(arc_, std::clamp(a, arc_.front(), arc_.back()));
  return cap_[b.lo] + b.w * (cap_[b.lo + 1] - cap_[b.lo]);
}

double PathView::x_at_arc(double a) const {
  const Bracket b = bracket(arc_, std::clamp(a, arc_.front(), arc_.back()));
  return x_[b.lo] + b.w * (x_[b.lo + 1] - x_[b.lo]);
}

double PathView::arc_at_x(double x) const {
  const Bracket b = bracket(x_, std::clamp(x, x_.front(), x_.back()));
  return arc_[b.lo] + b.w * (arc_[b.lo + 1] - arc_[b.lo]);
}

void replan_velocity(Maneuver& m, double v0, const AccelModel& model,
                     const PathConstraints& limits) {
  if (!(v0 > 0.0)) throw PlanError("replan_velocity: v0 must be > 0");
  if (!model.accel) throw PlanError("replan_velocity: accel model not set");
  if (m.samples.size() < 2) throw PlanError("replan_velocity: maneuver too short");

  const PathView path(m, limits);
  const double total_arc = path.total_arc();
  if (!(total_arc > 0.0)) throw PlanError("replan_velocity: degenerate path");

  // Integrate v(arc) on a dense grid: forward accelerating pass capped by
  // v_cap, then a backward pass enforcing reachable braking into caps ahead.
  const double step = 0.5;  // m
  const size_t n_dense = std::max<size_t>(2, static_cast<size_t>(total_arc / step) + 2);
  std::vector<double> ds(n_dense);
  std::vector<double> v(n_dense);
  for (size_t i = 0; i < n_dense; ++i)
    ds[i] = total_arc * static_cast<double>(i) / static_cast<double>(n_dense - 1);
  v[0] = std::min(v0, model.v_max);
  for (size_t i = 1; i < n_dense; ++i) {
    const double d = ds[i] - ds[i - 1];
    const double a0 = std::max(0.0, model.accel(v[i - 1]));
    // Midpoint estimate keeps the profile within a fine time-stepped oracle's
    // tolerance band.
    const double v_mid = std::sqrt(std::max(0.0, v[i - 1] * v[i - 1] + a0 * d));
    const double a_mid = std::max(0.0, model.accel(std::min(v_mid, model.v_max)));
    double vn = std::sqrt(std::max(0.0, v[i - 1] * v[i - 1] + 2.0 * a_mid * d));
    v[i] = std::min({vn, path.cap_at_arc(ds[i]), model.v_max});
  }
  if (model.brake_decel > 0.0) {
    for (size_t i = n_dense - 1; i-- > 0;) {
      const double d = ds[i + 1] - ds[i];
      const double v_brake = std::sqrt(v[i + 1] * v[i + 1] + 2.0 * model.brake_decel * d);
      v[i] = std::min(v[i], v_brake);
    }
    // The entry speed is a boundary condition, not a planning variable: if the
    // backward pass clipped it, the caps ahead are unreachable at full brake.
    if (v[0] < std::min(v0, model.v_max) - 1e-6) m.infeasible = true;
    v[0] = std::min(v0, model.v_max);
  }

  // Cumulative time over the dense grid (trapezoid on 1/v).
  std::vector<double> tt(n_dense, 0.0);
  for (size_t i = 1; i < n_dense; ++i) {
    const double d = ds[i] - ds[i - 1];
    const double v_avg = std::max(0.5 * (v[i] + v[i - 1]), 1e-6);
    tt[i] = tt[i - 1] + d / v_avg;
  }
  const double t_new = tt.back();

  auto arc_at_time = [&](double t) {
    const Bracket b = bracket(tt, std::clamp(t, 0.0, t_new));
    return ds[b.lo] + b.w * (ds[b.lo + 1] - ds[b.lo]);
  };
  auto speed_at_arc = [&](double a) {
    const Bracket b = bracket(ds, std::clamp(a, 0.0, total_arc));
    return v[b.lo] + b.w * (v[b.lo + 1] - v[b.lo]);
  };

  // Keep the exact entry velocity direction for sample 0 (chord tangents are
  // approximate there).
  const double dir0x = m.samples.front().q.x_dot;
  const double dir0y = m.samples.front().q.y_dot;
  const double dir0n = std::hypot(dir0x, dir0y);

  std::vector<ManeuverSample> new_samples;
  std::vector<double> new_profile;
  const double dt = m.dt;
  const size_t n_full = static_cast<size_t>(std::floor(t_new / dt + 1e-9));
  for (size_t i = 0; i <= n_full + 1; ++i) {
    const double t = (i <= n_full) ? static_cast<double>(i) * dt : t_new;
    if (i > n_full && !new_samples.empty() && new_samples.back().t >= t_new - 1e-9) break;
    const double a = arc_at_time(t);
    const double sv = speed_at_arc(a);
    const PathView::Pt c = path.at_arc(a);
    ManeuverSample smp;
    smp.t = t;
    smp.q.x = c.x;
    smp.q.y = c.y;
    smp.q.x_dot = sv * c.tx;
    smp.q.y_dot = sv * c.ty;
    new_samples.push_back(smp);
    new_profile.push_back(sv);
  }
  if (!new_samples.empty() && dir0n > 1e-12) {
    new_samples.front().q.x_dot = v[0] * dir0x / dir0n;
    new_samples.front().q.y_dot = v[0] * dir0y / dir0n;
  }
  m.samples = std::move(new_samples);
  m.speed_profile = std::move(new_profile);
  m.t_total = t_new;
}

}  // namespace racectl
