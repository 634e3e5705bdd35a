#pragma once

// Offline race line: a closed sampled path with a speed profile, generated by
// a corner-apex heuristic over the track and solved against the lateral
// acceleration envelope.

#include <stdexcept>
#include <string>
#include <vector>

#include "racectl/track.hpp"

namespace racectl {

struct RacelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RacelineSample {
  double s{0.0};  // m station along the left boundary, strictly increasing
  double x{0.0};  // m Cartesian
  double y{0.0};  // m Cartesian
  double v{0.0};  // m/s profile speed
};

struct Raceline {
  std::vector<RacelineSample> samples;
  double track_length{0.0};  // wrap period for closed lines
  bool closed{true};
};

// Lateral acceleration envelope used for the speed solve: limit(v) in m/s^2.
struct LatAccelModel {
  double mu{1.0};          // friction coefficient
  double c_down{0.0};      // N/(m/s)^2 downforce coefficient
  double mass{1.0};        // kg
  double g{9.81};          // m/s^2
  double limit(double v) const { return mu * (g + c_down * v * v / mass); }
};

struct RacelineParams {
  double apex_inset{4.5};        // m pulled in from the centerline at apexes
  double entry_fraction{0.40};   // fraction of the approach straight blended
  double exit_fraction{0.40};    // fraction of the departure straight blended
  double sample_spacing{2.0};    // m between emitted samples
  double v_max{83.0};            // m/s straight-line cap
  double lat_fraction{0.97};     // share of the lateral envelope to use
  double a_brake{12.0};          // m/s^2 backward-pass braking
  double a_accel{6.0};           // m/s^2 forward-pass drive cap
  double vehicle_half_width{1.0};// m, feasibility margin to the boundaries
  LatAccelModel lat;
};

// Generate the race line for a track. With apex_inset = 0 and zero blend
// fractions the result is the centerline at the solved speed profile.
Raceline generate_raceline(const Track& track, const RacelineParams& p);

// CSV persistence, header "s,x,y,v". Round-trips doubles exactly.
void save_raceline_csv(const Raceline& line, const std::string& path);
Raceline load_raceline_csv(const std::string& path, const Track& track);

// Fast interpolated lookups against a (closed) race line, plus the lateral
// offset view the planner needs. Offsets are precomputed by projecting each
// sample onto the track.
class RacelineView {
 public:
  RacelineView(const Track& track, const Raceline& line);

  double speed_at(double station) const;   // m/s
  double offset_at(double station) const;  // m lateral offset y(s)
  // d(offset)/d(station), finite-difference on the sample grid.
  double offset_slope_at(double station) const;
  const Raceline& line() const { return line_; }

 private:
  const Track* track_;
  Raceline line_;
  std::vector<double> station_;  // per sample (== sample.s, cached)
  std::vector<double> offset_;   // per sample
  std::vector<double> speed_;    // per sample

  double interp(const std::vector<double>& vals, double station) const;
};

}  // namespace racectl
