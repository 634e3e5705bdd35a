#include "racectl/vehicle.hpp"

#include <algorithm>
#include <cmath>

namespace racectl {

AccelModel make_accel_model(const VehicleParams& p, double drag_scale) {
  AccelModel m;
  const double c_eff = std::max(1e-9, drag_scale * p.c_drag);
  m.v_max = std::cbrt(p.power / c_eff);  // drag-balance speed P/v = c v^2
  m.brake_decel = p.brake_force / p.mass;
  m.accel = [p, c_eff](double v) {
    const double vv = std::max(v, 0.5);  // power model is singular at rest
    const double drive = std::min(p.power / vv, p.traction_cap(v));
    const double drag = c_eff * v * v;
    return std::max(0.0, (drive - drag) / p.mass);
  };
  return m;
}

StepInfo step_vehicle(VehicleState& s, const Commands& cmd, const VehicleParams& p,
                      double slip_factor, double dt) {
  StepInfo info;
  const double u = std::clamp(cmd.throttle, -1.0, 1.0);
  const double steer = std::clamp(cmd.steer, -1.0, 1.0);
  const double u_pos = std::max(u, 0.0);
  const double u_neg = std::max(-u, 0.0);

  // Longitudinal force balance.
  const double vv = std::max(s.v, 0.5);
  const double drive = u_pos * std::min(p.power / vv, p.traction_cap(s.v));
  const double brake = u_neg * p.brake_force;
  const double drag = slip_factor * p.c_drag * s.v * s.v;
  s.v = std::max(0.0, s.v + (drive - brake - drag) / p.mass * dt);

  // Yaw: first-order lag toward the commanded rate, clipped by the lateral
  // envelope |v * omega| <= mu (g + c_down v^2 / m).
  const double omega_cmd = steer * p.steer_gain * s.v;
  s.omega += (omega_cmd - s.omega) * dt / std::max(p.yaw_tau, dt);
  const double omega_lim = p.lat_accel_limit(s.v) / std::max(s.v, 1e-3);
  if (std::abs(s.omega) > omega_lim) {
    s.omega = std::copysign(omega_lim, s.omega);
    info.lat_saturated = true;
  }

  s.heading = wrap_angle(s.heading + s.omega * dt);
  s.pos = s.pos + (s.v * dt) * heading_dir(s.heading);
  return info;
}

double slipstream_factor(double gap_long, double gap_lat, const SlipstreamParams& p) {
  if (!p.enabled) return 1.0;
  if (gap_long < 0.0) return 1.0;  // only cars ahead give a tow
  const double k_long = std::max(0.0, 1.0 - gap_long / p.long_range);
  const double k_lat = std::max(0.0, 1.0 - std::abs(gap_lat) / p.lat_range);
  return 1.0 - p.delta * k_long * k_lat;
}

}  // namespace racectl
