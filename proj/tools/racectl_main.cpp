// racectl: race line generation, solo and multi-vehicle race simulation, and
// log metrics, over a plain-text track description.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "racectl/config.hpp"
#include "racectl/metrics.hpp"
#include "racectl/racelog.hpp"
#include "racectl/raceline.hpp"
#include "racectl/sim.hpp"
#include "racectl/track.hpp"
#include "racectl/version.hpp"

namespace fs = std::filesystem;
using namespace racectl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string track_path;
  std::string config_path;
  std::string raceline_path;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool raceline_input) {
  cmd->add_option("--track", o.track_path, "track description file")->required();
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--set", o.sets, "override one setting, key=value (repeatable)");
  if (raceline_input) {
    cmd->add_option("--raceline", o.raceline_path, "race line CSV (generated when absent)");
  }
}

Settings layered_settings(const CommonOpts& o) {
  Settings s;
  if (!o.config_path.empty()) load_settings_file(s, o.config_path);
  for (const std::string& kv : o.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return s;
}

std::string canonical_track_text(const TrackConfig& cfg) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "width %.17g\n", cfg.width);
  out += buf;
  for (const auto& seg : cfg.segments) {
    if (seg.kind == SegmentKind::kStraight) {
      std::snprintf(buf, sizeof(buf), "straight %.17g\n", seg.length);
    } else {
      std::snprintf(buf, sizeof(buf), "arc %.17g %.17g\n", seg.radius,
                    seg.sweep_rad * 180.0 / kPi);
    }
    out += buf;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LogError("cannot open for writing: " + path.string());
  out << text;
}

void write_manifest(const fs::path& path, const Settings& s, const Track& track) {
  std::string text;
  text += "# effective configuration; replayable as --config\n";
  text += std::string("meta.version = ") + kVersion + "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "meta.track_length = %.17g\n", track.length());
  text += buf;
  text += "meta.track_file = track.txt\n";
  text += "meta.raceline_file = raceline.csv\n";
  text += serialize_settings(s);
  write_text(path, text);
}

Raceline make_raceline(const Track& track, const Settings& s, const std::string& path) {
  if (path.empty()) return generate_raceline(track, s.raceline);
  return load_raceline_csv(path, track);
}

// Shared by solo and race: run, write the full log set, print the summary.
int run_and_report(const CommonOpts& o, Settings s, const std::string& out_dir, bool solo) {
  const TrackConfig tcfg = load_track_config(o.track_path);
  const Track track = Track::build(tcfg);
  finalize_settings(s);

  const Raceline line = make_raceline(track, s, o.raceline_path);
  const RacelineView view(track, line);

  const RaceResult res = run_race(track, view, s.setup);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_tick_csv((dir / "ticks.csv").string(), res.rows);
  write_events_jsonl((dir / "events.jsonl").string(), res.events);
  save_raceline_csv(line, (dir / "raceline.csv").string());
  write_text(dir / "track.txt", canonical_track_text(tcfg));
  write_manifest(dir / "manifest", s, track);

  const RaceMetrics m = compute_metrics(res.rows, res.events, track.length());
  write_metrics_files(out_dir, m);

  if (solo) {
    const auto laps = lap_times_from_crossings(res.crossings[0]);
    std::printf("solo: %zu lap(s)\n", laps.size());
    for (std::size_t i = 0; i < laps.size(); ++i) {
      std::printf("  lap %zu: %.2f s\n", i + 1, laps[i]);
    }
  } else {
    std::printf("race: %d vehicles, %d laps, seed %llu\n", s.setup.race.n_vehicles,
                s.setup.race.laps, static_cast<unsigned long long>(s.setup.race.seed));
    std::printf("lap spread: %.2f%%  mean gap: %.1f m  overtakes: %zu\n", 100.0 * m.lap_spread,
                m.gap_mean, m.overtake_list.size());
    std::printf("safety events:");
    if (m.event_counts.empty()) std::printf(" none");
    for (const auto& [type, count] : m.event_counts) {
      if (type == "lap") continue;
      std::printf(" %s=%d", type.c_str(), count);
    }
    std::printf("\n");
  }
  if (!res.finished) {
    std::fprintf(stderr, "error: time cap %.0f s hit before the leader finished\n",
                 s.setup.race.t_max);
    return kExitRuntime;
  }
  std::printf("logs written to %s\n", out_dir.c_str());
  return kExitOk;
}

int cmd_raceline(const CommonOpts& o, const std::string& out_path) {
  const Track track = Track::build(load_track_config(o.track_path));
  Settings s = layered_settings(o);
  finalize_settings(s);
  const Raceline line = generate_raceline(track, s.raceline);
  save_raceline_csv(line, out_path);
  double v_lo = line.samples.front().v, v_hi = v_lo;
  for (const auto& smp : line.samples) {
    v_lo = std::min(v_lo, smp.v);
    v_hi = std::max(v_hi, smp.v);
  }
  std::printf("race line: %zu samples over %.1f m, v in [%.1f, %.1f] m/s -> %s\n",
              line.samples.size(), line.track_length, v_lo, v_hi, out_path.c_str());
  return kExitOk;
}

int cmd_metrics(const std::string& log_dir, const std::string& out_dir) {
  const fs::path dir(log_dir);
  const auto rows = read_tick_csv((dir / "ticks.csv").string());
  const auto events = read_events_jsonl((dir / "events.jsonl").string());
  const double track_length =
      std::stod(read_manifest_meta((dir / "manifest").string(), "track_length"));
  const RaceMetrics m = compute_metrics(rows, events, track_length);
  write_metrics_files(out_dir.empty() ? log_dir : out_dir, m);
  std::printf("metrics: %d vehicles, lap spread %.2f%%, mean gap %.1f m, %zu overtake(s)\n",
              m.n_vehicles, 100.0 * m.lap_spread, m.gap_mean, m.overtake_list.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autonomous racing planner and race simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts solo_opts, race_opts, line_opts;
  std::string solo_out = "out_solo", race_out = "out_race", line_out = "raceline.csv";
  std::string metrics_logs, metrics_out;
  int solo_laps = 1;
  int race_vehicles = 6, race_laps = 10;
  std::uint64_t race_seed = 1;

  CLI::App* solo = app.add_subcommand("solo", "single-vehicle run");
  add_common(solo, solo_opts, true);
  solo->add_option("--laps", solo_laps, "flying laps to run")->check(CLI::PositiveNumber);
  solo->add_option("--out", solo_out, "output directory");

  CLI::App* race = app.add_subcommand("race", "multi-vehicle race");
  add_common(race, race_opts, true);
  race->add_option("--vehicles", race_vehicles, "number of vehicles")->check(CLI::PositiveNumber);
  race->add_option("--laps", race_laps, "flying laps for the leader")->check(CLI::PositiveNumber);
  race->add_option("--seed", race_seed, "grid placement seed");
  race->add_option("--out", race_out, "output directory");

  CLI::App* line = app.add_subcommand("raceline", "generate the race line CSV");
  add_common(line, line_opts, false);
  line->add_option("--out", line_out, "output CSV path");

  CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from logs");
  metrics->add_option("--logs", metrics_logs, "directory with ticks.csv/events.jsonl/manifest")
      ->required();
  metrics->add_option("--out", metrics_out, "output directory (default: --logs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solo->parsed()) {
      Settings s = layered_settings(solo_opts);
      s.setup.race.n_vehicles = 1;
      s.setup.race.laps = solo_laps;
      return run_and_report(solo_opts, std::move(s), solo_out, true);
    }
    if (race->parsed()) {
      Settings s = layered_settings(race_opts);
      if (race->count("--vehicles")) s.setup.race.n_vehicles = race_vehicles;
      if (race->count("--laps")) s.setup.race.laps = race_laps;
      if (race->count("--seed")) s.setup.race.seed = race_seed;
      return run_and_report(race_opts, std::move(s), race_out, false);
    }
    if (line->parsed()) return cmd_raceline(line_opts, line_out);
    if (metrics->parsed()) return cmd_metrics(metrics_logs, metrics_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const TrackError& e) {
    std::fprintf(stderr, "track error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
