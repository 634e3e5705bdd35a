#pragma once

// Race metrics from the logs: per-vehicle lap times, first-to-last gap
// series, debounced overtakes, and the safety-event aggregate, plus the
// plotting-friendly file outputs.

#include <map>
#include <string>
#include <vector>

#include "racectl/racelog.hpp"

namespace racectl {

struct Overtake {
  double t{0.0};  // s, crossing instant
  int winner{-1};
  int loser{-1};
};

struct GapPoint {
  double t{0.0};
  double gap{0.0};  // m, first-to-last cumulative progress spread
};

// Per-vehicle lists of completed-lap times, from the lap events.
std::vector<std::vector<double>> lap_times(const std::vector<RaceEvent>& events, int n_vehicles);

// First-to-last gap at each 25 Hz instant; progress = lap * track_length + s.
std::vector<GapPoint> gap_first_to_last(const std::vector<TickRow>& rows, double track_length);

// Pairwise cumulative-progress sign changes persisting >= debounce seconds.
std::vector<Overtake> overtakes(const std::vector<TickRow>& rows, double track_length,
                                double debounce = 2.0);

// Event counts keyed by type; collisions split into collision_body /
// collision_bound.
std::map<std::string, int> safety_report(const std::vector<RaceEvent>& events);

struct RaceMetrics {
  int n_vehicles{0};
  std::vector<std::vector<double>> lap_times;  // per vehicle
  std::vector<double> mean_lap;                // per vehicle (0 when no laps)
  double lap_spread{0.0};                      // (max mean - min mean) / min mean
  std::vector<GapPoint> gap_series;
  double gap_mean{0.0};
  double gap_max{0.0};
  double gap_mean_final{0.0};                  // over the leader's final `final_laps`
  std::vector<Overtake> overtake_list;
  std::map<std::string, int> event_counts;
};

RaceMetrics compute_metrics(const std::vector<TickRow>& rows,
                            const std::vector<RaceEvent>& events, double track_length,
                            int final_laps = 5);

// Writes metrics.json, lap_times.csv, laptime_hist.csv, gap_vs_time.csv and
// gap_hist.csv into dir.
void write_metrics_files(const std::string& dir, const RaceMetrics& m);

}  // namespace racectl
