#pragma once

// Opponent trajectory prediction: constant-curvature extrapolation of the
// observed motion, bent away from the track boundaries through a three-point
// avoidance construction when the raw arc would leave the road.

#include "racectl/pointmass.hpp"
#include "racectl/track.hpp"

namespace racectl {

// Opponent state observed by the ego, in the ego's road-aligned frame.
struct OpponentState {
  double x{0.0};      // m ahead of the ego along the track
  double y{0.0};      // m from the left boundary
  double x_dot{0.0};  // m/s
  double y_dot{0.0};  // m/s
  double omega{0.0};  // rad/s measured yaw rate (Cartesian)
};

struct PredictionParams {
  double t_max{3.0};    // s horizon
  double dt{0.04};      // s sample spacing
  double d_min{1.0};    // m boundary standoff
  double k_ahead{1.5};  // gain stretching the avoidance point downrange
  double mass{750.0};   // kg, for the connecting segment laws
};

// Path curvature implied by the observed yaw rate: kappa = omega / |v|.
double estimate_curvature(const OpponentState& s);

// Constant-curvature, constant-speed arc from the opponent's state, built in
// the Cartesian frame and expressed back in the ego's road-aligned chart.
// Samples run from 0 to t_max on the dt grid.
Maneuver extrapolate_constant_curvature(const Track& track, double ego_station,
                                        const OpponentState& s, const PredictionParams& p);

// Full prediction: returns the raw extrapolation when it keeps d_min to both
// boundaries; otherwise connects {p0, p1, p2} so the trajectory bends parallel
// to the threatened boundary, then re-times it with the opponent's
// longitudinal model (optionally capped per sample via limits_fn).
Maneuver predict(const Track& track, double ego_station, const OpponentState& s,
                 const PredictionParams& p, const AccelModel& model,
                 const ConstraintsFn& limits_fn = {});

}  // namespace racectl
