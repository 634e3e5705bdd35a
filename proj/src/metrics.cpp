#include "racectl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace racectl {

namespace {

// Rows grouped by identical timestamp, in file order.
struct Frame {
  double t{0.0};
  std::vector<const TickRow*> rows;
};

std::vector<Frame> group_frames(const std::vector<TickRow>& rows) {
  std::vector<Frame> frames;
  for (const auto& r : rows) {
    if (frames.empty() || frames.back().t != r.t) frames.push_back({r.t, {}});
    frames.back().rows.push_back(&r);
  }
  return frames;
}

double progress_of(const TickRow& r, double track_length) {
  return r.lap * track_length + r.s;
}

}  // namespace

std::vector<std::vector<double>> lap_times(const std::vector<RaceEvent>& events, int n_vehicles) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(std::max(n_vehicles, 0)));
  for (const auto& e : events) {
    if (e.type != "lap" || e.vehicles.empty()) continue;
    const int id = e.vehicles[0];
    if (id < 0 || id >= n_vehicles) continue;
    out[static_cast<std::size_t>(id)].push_back(e.data.at("time").get<double>());
  }
  return out;
}

std::vector<GapPoint> gap_first_to_last(const std::vector<TickRow>& rows, double track_length) {
  std::vector<GapPoint> out;
  for (const auto& f : group_frames(rows)) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const TickRow* r : f.rows) {
      const double p = progress_of(*r, track_length);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    out.push_back({f.t, f.rows.empty() ? 0.0 : hi - lo});
  }
  return out;
}

std::vector<Overtake> overtakes(const std::vector<TickRow>& rows, double track_length,
                                double debounce) {
  const auto frames = group_frames(rows);
  if (frames.empty()) return {};

  int n = 0;
  for (const auto& r : rows) n = std::max(n, r.vehicle_id + 1);

  struct PairState {
    int sign{0};
    double pending_since{-1.0};
  };
  std::vector<PairState> state(static_cast<std::size_t>(n) * n);
  std::vector<double> prog(static_cast<std::size_t>(n));
  std::vector<Overtake> out;

  bool first = true;
  for (const auto& f : frames) {
    for (const TickRow* r : f.rows) prog[static_cast<std::size_t>(r->vehicle_id)] = progress_of(*r, track_length);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        PairState& ps = state[static_cast<std::size_t>(i) * n + j];
        const double d = prog[static_cast<std::size_t>(i)] - prog[static_cast<std::size_t>(j)];
        const int s = (d > 0.0) - (d < 0.0);
        if (s == 0) continue;
        if (first || ps.sign == 0) {
          ps.sign = s;
        } else if (s == ps.sign) {
          ps.pending_since = -1.0;
        } else if (ps.pending_since < 0.0) {
          ps.pending_since = f.t;
        } else if (f.t - ps.pending_since >= debounce) {
          out.push_back({ps.pending_since, s > 0 ? i : j, s > 0 ? j : i});
          ps.sign = s;
          ps.pending_since = -1.0;
        }
      }
    }
    first = false;
  }
  return out;
}

std::map<std::string, int> safety_report(const std::vector<RaceEvent>& events) {
  std::map<std::string, int> counts;
  for (const auto& e : events) {
    if (e.type == "collision") {
      const std::string kind = e.data.value("kind", std::string("body"));
      ++counts["collision_" + kind];
    } else {
      ++counts[e.type];
    }
  }
  return counts;
}

RaceMetrics compute_metrics(const std::vector<TickRow>& rows,
                            const std::vector<RaceEvent>& events, double track_length,
                            int final_laps) {
  RaceMetrics m;
  for (const auto& r : rows) m.n_vehicles = std::max(m.n_vehicles, r.vehicle_id + 1);
  m.lap_times = lap_times(events, m.n_vehicles);
  m.mean_lap.assign(static_cast<std::size_t>(m.n_vehicles), 0.0);
  double lo_mean = std::numeric_limits<double>::infinity();
  double hi_mean = 0.0;
  for (int i = 0; i < m.n_vehicles; ++i) {
    const auto& laps = m.lap_times[static_cast<std::size_t>(i)];
    if (laps.empty()) continue;
    double sum = 0.0;
    for (double x : laps) sum += x;
    const double mean = sum / static_cast<double>(laps.size());
    m.mean_lap[static_cast<std::size_t>(i)] = mean;
    lo_mean = std::min(lo_mean, mean);
    hi_mean = std::max(hi_mean, mean);
  }
  if (std::isfinite(lo_mean) && lo_mean > 0.0) m.lap_spread = (hi_mean - lo_mean) / lo_mean;

  m.gap_series = gap_first_to_last(rows, track_length);
  if (!m.gap_series.empty()) {
    double sum = 0.0;
    for (const auto& g : m.gap_series) {
      sum += g.gap;
      m.gap_max = std::max(m.gap_max, g.gap);
    }
    m.gap_mean = sum / static_cast<double>(m.gap_series.size());
  }

  // Mean gap over the leader's final `final_laps` laps (whole series when it
  // has fewer).
  const auto frames = group_frames(rows);
  if (!frames.empty()) {
    int leader = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (const TickRow* r : frames.back().rows) {
      const double p = progress_of(*r, track_length);
      if (p > best) {
        best = p;
        leader = r->vehicle_id;
      }
    }
    std::vector<double> cross_times;
    int last_lap = std::numeric_limits<int>::min();
    for (const auto& r : rows) {
      if (r.vehicle_id != leader) continue;
      if (last_lap != std::numeric_limits<int>::min() && r.lap > last_lap) cross_times.push_back(r.t);
      last_lap = r.lap;
    }
    double window_start = frames.front().t;
    if (static_cast<int>(cross_times.size()) > final_laps) {
      window_start = cross_times[cross_times.size() - 1 - static_cast<std::size_t>(final_laps)];
    }
    double sum = 0.0;
    int count = 0;
    for (const auto& g : m.gap_series) {
      if (g.t < window_start) continue;
      sum += g.gap;
      ++count;
    }
    if (count > 0) m.gap_mean_final = sum / count;
  }

  m.overtake_list = overtakes(rows, track_length);
  m.event_counts = safety_report(events);
  return m;
}

namespace {

void write_hist_csv(const std::string& path, const std::vector<double>& values, double bin) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LogError("cannot open for writing: " + path);
  out << "bin_lo,bin_hi,count\n";
  if (values.empty() || bin <= 0.0) return;
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const long b0 = std::lround(std::floor(lo / bin));
  const long b1 = std::lround(std::floor(hi / bin));
  for (long b = b0; b <= b1; ++b) {
    const double blo = static_cast<double>(b) * bin;
    const double bhi = blo + bin;
    int count = 0;
    for (double v : values) {
      if (v >= blo && v < bhi) ++count;
    }
    if (b == b1) {
      for (double v : values) {
        if (v == bhi) ++count;  // closes the top edge
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%d\n", blo, bhi, count);
    out << buf;
  }
}

}  // namespace

void write_metrics_files(const std::string& dir, const RaceMetrics& m) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto in_dir = [&dir](const char* name) { return (fs::path(dir) / name).string(); };

  {
    std::ofstream out(in_dir("lap_times.csv"), std::ios::binary);
    if (!out) throw LogError("cannot open for writing: " + in_dir("lap_times.csv"));
    out << "vehicle,lap,time\n";
    for (int i = 0; i < m.n_vehicles; ++i) {
      const auto& laps = m.lap_times[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < laps.size(); ++k) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.9g\n", i, k + 1, laps[k]);
        out << buf;
      }
    }
  }

  std::vector<double> all_laps;
  for (const auto& v : m.lap_times) all_laps.insert(all_laps.end(), v.begin(), v.end());
  write_hist_csv(in_dir("laptime_hist.csv"), all_laps, 0.5);

  {
    std::ofstream out(in_dir("gap_vs_time.csv"), std::ios::binary);
    if (!out) throw LogError("cannot open for writing: " + in_dir("gap_vs_time.csv"));
    out << "t,gap\n";
    for (const auto& g : m.gap_series) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.2f,%.9g\n", g.t, g.gap);
      out << buf;
    }
  }

  std::vector<double> gaps;
  gaps.reserve(m.gap_series.size());
  for (const auto& g : m.gap_series) gaps.push_back(g.gap);
  write_hist_csv(in_dir("gap_hist.csv"), gaps, 10.0);

  nlohmann::json j;
  j["n_vehicles"] = m.n_vehicles;
  j["lap_times"] = m.lap_times;
  j["mean_lap"] = m.mean_lap;
  j["lap_spread"] = m.lap_spread;
  j["gap_mean"] = m.gap_mean;
  j["gap_max"] = m.gap_max;
  j["gap_mean_final"] = m.gap_mean_final;
  j["overtake_count"] = m.overtake_list.size();
  nlohmann::json ov = nlohmann::json::array();
  for (const auto& o : m.overtake_list) {
    ov.push_back({{"t", o.t}, {"winner", o.winner}, {"loser", o.loser}});
  }
  j["overtakes"] = ov;
  j["events"] = m.event_counts;
  double best = 0.0;
  if (!all_laps.empty()) best = *std::min_element(all_laps.begin(), all_laps.end());
  j["best_lap"] = best;

  std::ofstream out(in_dir("metrics.json"), std::ios::binary);
  if (!out) throw LogError("cannot open for writing: " + in_dir("metrics.json"));
  out << j.dump(2) << '\n';
}

}  // namespace racectl
