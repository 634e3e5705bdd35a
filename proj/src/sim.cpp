#include "racectl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "racectl/collision.hpp"

namespace racectl {

namespace {

constexpr double kPhysicsDt = 0.01;
constexpr int kControlEvery = 4;  // 25 Hz control on the 100 Hz physics grid
constexpr double kOvertakeDebounce = 2.0;  // s

// Platform-independent uniform in [0, 1) from the raw engine stream.
double unit_uniform(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double sym_uniform(std::mt19937_64& rng) { return 2.0 * unit_uniform(rng) - 1.0; }

struct Car {
  VehicleState state;
  Commands held;
  double progress{0.0};      // unwrapped station
  double wrapped{0.0};       // last projected station in [0, L)
  double y_off{0.0};         // last projected lateral offset
  int lap{0};                // floor(progress / L): line crossings so far
  std::vector<double> cross_times;
  double slip{1.0};
  bool out_of_bounds{false};
  bool saturated{false};
};

struct PairState {
  bool body_overlap{false};
  bool bound_overlap{false};
  int sign{0};                // +1 when the lower-id car is ahead
  int pending_sign{0};
  double pending_since{-1.0}; // s, crossing instant awaiting debounce
};

}  // namespace

std::vector<double> lap_times_from_crossings(const std::vector<double>& crossings) {
  std::vector<double> out;
  for (std::size_t i = 1; i < crossings.size(); ++i) out.push_back(crossings[i] - crossings[i - 1]);
  return out;
}

RaceResult run_race(const Track& track, const RacelineView& raceline, const RaceSetup& setup) {
  const RaceParams& rp = setup.race;
  if (rp.n_vehicles < 1) throw std::invalid_argument("run_race: need at least one vehicle");
  if (rp.laps < 1) throw std::invalid_argument("run_race: need at least one lap");
  const double L = track.length();
  const double w = track.width();
  const int n = rp.n_vehicles;

  std::mt19937_64 rng(rp.seed);

  std::vector<Car> cars(n);
  std::vector<VehicleController> ctrls;
  ctrls.reserve(n);

  // Rolling-start grid: side-by-side rows of two, rows staggered start_gap
  // apart, the last row run_up meters before the line, with seeded jitter.
  const int n_rows = (n + 1) / 2;
  const double grid_front = rp.run_up + (n_rows - 1) * rp.start_gap;
  for (int i = 0; i < n; ++i) {
    const double jl = sym_uniform(rng) * rp.jitter_long;
    const double jy = sym_uniform(rng) * rp.jitter_lat;
    const double s0 = std::max(grid_front - (i / 2) * rp.start_gap + jl, 2.0);
    const double y0 =
        std::clamp(w / 2.0 + (i % 2 == 0 ? -rp.lane_offset : rp.lane_offset) + jy, 1.5, w - 1.5);
    Car& c = cars[i];
    c.state.pos = track.position(s0, y0);
    c.state.heading = track.boundary_pose(s0).heading;
    c.state.v = rp.start_speed;
    c.progress = s0;
    c.wrapped = track.wrap_station(s0);
    c.y_off = y0;
    ctrls.emplace_back(track, raceline, setup.planner, setup.prediction, setup.vehicle,
                       setup.gains);
  }

  const SafetyBound body = SafetyBound::from_vehicle(setup.vehicle.length, setup.vehicle.width,
                                                     0.0, 0.0);
  const SafetyBound safety = SafetyBound::from_vehicle(setup.vehicle.length, setup.vehicle.width);

  std::vector<PairState> pairs(static_cast<std::size_t>(n) * n);
  auto pair_at = [&pairs, n](int i, int j) -> PairState& {
    return pairs[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = cars[i].progress - cars[j].progress;
      pair_at(i, j).sign = (d > 0.0) - (d < 0.0);
    }

  RaceResult res;
  res.n_vehicles = n;
  res.laps = rp.laps;
  res.track_length = L;
  res.crossings.resize(n);

  const long max_ticks = std::lround(rp.t_max / kPhysicsDt);
  std::vector<Commands> cmds(n);
  std::vector<SensorSnapshot> snaps(n);
  bool done = false;

  long tick = 0;
  for (; tick < max_ticks && !done; ++tick) {
    const double t = static_cast<double>(tick) / 100.0;

    // Slipstream factors from the current instant (strongest leader wins).
    for (int i = 0; i < n; ++i) {
      double f = 1.0;
      if (setup.slipstream.enabled) {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const double gap = track.wrap_rel(cars[j].wrapped - cars[i].wrapped);
          f = std::min(f, slipstream_factor(gap, cars[j].y_off - cars[i].y_off,
                                            setup.slipstream));
        }
      }
      cars[i].slip = f;
    }

    if (tick % kControlEvery == 0) {
      // All snapshots from the same world instant, then each controller on
      // its own snapshot and private state only.
      for (int i = 0; i < n; ++i) {
        SensorSnapshot& sn = snaps[i];
        sn.t = t;
        sn.ego = cars[i].state;
        sn.ego_station = cars[i].wrapped;
        sn.ego_slip = cars[i].slip;
        sn.opponents.clear();
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const double ds = track.wrap_rel(cars[j].wrapped - cars[i].wrapped);
          if (std::abs(ds) > rp.sensor_range) continue;
          sn.opponents.push_back({j, cars[j].state.pos,
                                  heading_dir(cars[j].state.heading) * cars[j].state.v,
                                  cars[j].state.omega, cars[j].wrapped});
        }
      }
      if (setup.reverse_update_order) {
        for (int i = n - 1; i >= 0; --i) cmds[i] = ctrls[i].update(snaps[i], kPhysicsDt * kControlEvery);
      } else {
        for (int i = 0; i < n; ++i) cmds[i] = ctrls[i].update(snaps[i], kPhysicsDt * kControlEvery);
      }
      for (int i = 0; i < n; ++i) {
        const Car& c = cars[i];
        res.rows.push_back({t, i, c.state.pos.x, c.state.pos.y, c.state.heading, c.state.v,
                            c.state.omega, track.wrap_station(c.progress), c.lap,
                            cmds[i].throttle, cmds[i].steer, c.slip});
        cars[i].held = cmds[i];
      }
    }

    // One physics tick for every vehicle, fixed id order.
    const double t_after = static_cast<double>(tick + 1) / 100.0;
    for (int i = 0; i < n; ++i) {
      Car& c = cars[i];
      const StepInfo info = step_vehicle(c.state, c.held, setup.vehicle, c.slip, kPhysicsDt);

      const Track::Projection proj = track.project(c.state.pos);
      c.progress += track.wrap_rel(proj.s - c.wrapped);
      c.wrapped = proj.s;
      c.y_off = proj.y;

      const int lap_now = static_cast<int>(std::floor(c.progress / L));
      if (lap_now > c.lap) {
        c.lap = lap_now;
        c.cross_times.push_back(t_after);
        const std::size_t k = c.cross_times.size();
        if (k >= 2) {
          const double lap_time = c.cross_times[k - 1] - c.cross_times[k - 2];
          res.events.push_back({t_after, "lap", {i},
                                {{"lap", static_cast<int>(k) - 1}, {"time", lap_time}}});
        }
      }

      const bool outside = proj.y < 0.0 || proj.y > w;
      if (outside && !c.out_of_bounds) {
        res.events.push_back({t_after, "boundary", {i}, {{"y", proj.y}}});
      }
      c.out_of_bounds = outside;

      if (info.lat_saturated && !c.saturated) {
        res.events.push_back({t_after, "lat_sat", {i}, {{"v", c.state.v}}});
      }
      c.saturated = info.lat_saturated;
    }

    // Pairwise checks: collisions (edge-triggered per kind) and overtake
    // debouncing on unwrapped progress.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        PairState& ps = pair_at(i, j);
        const double gap_s = track.wrap_rel(cars[j].wrapped - cars[i].wrapped);
        if (std::abs(gap_s) < 50.0) {
          const ObbPose pa{cars[i].state.pos, cars[i].state.heading};
          const ObbPose pb{cars[j].state.pos, cars[j].state.heading};
          const bool body_now = bounds_overlap(pa, body, pb, body);
          const bool bound_now = bounds_overlap(pa, safety, pb, safety);
          if (body_now && !ps.body_overlap) {
            res.events.push_back({t_after, "collision", {i, j}, {{"kind", "body"}}});
          }
          if (bound_now && !ps.bound_overlap) {
            res.events.push_back({t_after, "collision", {i, j}, {{"kind", "bound"}}});
          }
          ps.body_overlap = body_now;
          ps.bound_overlap = bound_now;
        } else {
          ps.body_overlap = false;
          ps.bound_overlap = false;
        }

        const double d = cars[i].progress - cars[j].progress;
        const int s = (d > 0.0) - (d < 0.0);
        if (s != 0) {
          if (ps.sign == 0) {
            ps.sign = s;
          } else if (s == ps.sign) {
            ps.pending_since = -1.0;
          } else {
            if (ps.pending_since < 0.0) {
              ps.pending_since = t_after;
            } else if (t_after - ps.pending_since >= kOvertakeDebounce) {
              const int winner = s > 0 ? i : j;
              const int loser = s > 0 ? j : i;
              res.events.push_back({ps.pending_since, "overtake", {winner, loser},
                                    nlohmann::json::object()});
              ps.sign = s;
              ps.pending_since = -1.0;
            }
          }
        }
      }
    }

    for (int i = 0; i < n && !done; ++i) {
      if (cars[i].lap >= rp.laps + 1) {
        done = true;
        res.finished = true;
      }
    }
  }

  res.t_end = static_cast<double>(tick) / 100.0;
  for (int i = 0; i < n; ++i) res.crossings[i] = std::move(cars[i].cross_times);
  std::stable_sort(res.events.begin(), res.events.end(),
                   [](const RaceEvent& a, const RaceEvent& b) { return a.t < b.t; });
  return res;
}

}  // namespace racectl
