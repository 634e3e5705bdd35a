#include "racectl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace racectl {

namespace {

enum class Kind { kDouble, kInt, kBool, kU64 };

struct Binding {
  const char* key;
  Kind kind;
  void* ptr;
};

std::vector<Binding> bindings(Settings& s) {
  auto& v = s.setup.vehicle;
  auto& g = s.setup.gains;
  auto& p = s.setup.planner;
  auto& pr = s.setup.prediction;
  auto& sl = s.setup.slipstream;
  auto& r = s.setup.race;
  auto& rl = s.raceline;
  return {
      {"race.n_vehicles", Kind::kInt, &r.n_vehicles},
      {"race.laps", Kind::kInt, &r.laps},
      {"race.seed", Kind::kU64, &r.seed},
      {"race.t_max", Kind::kDouble, &r.t_max},
      {"race.sensor_range", Kind::kDouble, &r.sensor_range},
      {"race.start_speed", Kind::kDouble, &r.start_speed},
      {"race.start_gap", Kind::kDouble, &r.start_gap},
      {"race.run_up", Kind::kDouble, &r.run_up},
      {"race.lane_offset", Kind::kDouble, &r.lane_offset},
      {"race.jitter_long", Kind::kDouble, &r.jitter_long},
      {"race.jitter_lat", Kind::kDouble, &r.jitter_lat},

      {"vehicle.mass", Kind::kDouble, &v.mass},
      {"vehicle.length", Kind::kDouble, &v.length},
      {"vehicle.width", Kind::kDouble, &v.width},
      {"vehicle.power", Kind::kDouble, &v.power},
      {"vehicle.c_drag", Kind::kDouble, &v.c_drag},
      {"vehicle.c_down", Kind::kDouble, &v.c_down},
      {"vehicle.mu", Kind::kDouble, &v.mu},
      {"vehicle.brake_force", Kind::kDouble, &v.brake_force},
      {"vehicle.v_max", Kind::kDouble, &v.v_max},
      {"vehicle.steer_gain", Kind::kDouble, &v.steer_gain},
      {"vehicle.yaw_tau", Kind::kDouble, &v.yaw_tau},

      {"gains.k_lookahead", Kind::kDouble, &g.k_lookahead},
      {"gains.min_lookahead", Kind::kDouble, &g.min_lookahead},
      {"gains.k_omega", Kind::kDouble, &g.k_omega},
      {"gains.k_steer_ff", Kind::kDouble, &g.k_steer_ff},
      {"gains.k_v", Kind::kDouble, &g.k_v},
      {"gains.preview_time", Kind::kDouble, &g.preview_time},
      {"gains.k_follow", Kind::kDouble, &g.k_follow},
      {"gains.follow_lookahead", Kind::kDouble, &g.follow_lookahead},
      {"gains.follow_engage", Kind::kDouble, &g.follow_engage},

      {"planner.n_shift_targets", Kind::kInt, &p.n_shift_targets},
      {"planner.d_min", Kind::kDouble, &p.d_min},
      {"planner.shift_dist_per_m", Kind::kDouble, &p.shift_dist_per_m},
      {"planner.shift_dist_base", Kind::kDouble, &p.shift_dist_base},
      {"planner.merge_dist_per_m", Kind::kDouble, &p.merge_dist_per_m},
      {"planner.merge_dist_base", Kind::kDouble, &p.merge_dist_base},
      {"planner.x_max", Kind::kDouble, &p.x_max},
      {"planner.r_opt", Kind::kDouble, &p.r_opt},
      {"planner.r_keep", Kind::kDouble, &p.r_keep},
      {"planner.r_decay", Kind::kDouble, &p.r_decay},
      {"planner.dt", Kind::kDouble, &p.dt},
      {"planner.lat_fraction", Kind::kDouble, &p.lat_fraction},
      {"planner.rl_follow_band", Kind::kDouble, &p.rl_follow_band},
      {"planner.cap_release_dist", Kind::kDouble, &p.cap_release_dist},
      {"planner.lat_margin", Kind::kDouble, &p.lat_margin},
      {"planner.guard_x", Kind::kDouble, &p.guard_x},
      {"planner.guard_t", Kind::kDouble, &p.guard_t},

      {"prediction.t_max", Kind::kDouble, &pr.t_max},
      {"prediction.d_min", Kind::kDouble, &pr.d_min},
      {"prediction.k_ahead", Kind::kDouble, &pr.k_ahead},

      {"slipstream.enabled", Kind::kBool, &sl.enabled},
      {"slipstream.delta", Kind::kDouble, &sl.delta},
      {"slipstream.long_range", Kind::kDouble, &sl.long_range},
      {"slipstream.lat_range", Kind::kDouble, &sl.lat_range},

      {"raceline.apex_inset", Kind::kDouble, &rl.apex_inset},
      {"raceline.entry_fraction", Kind::kDouble, &rl.entry_fraction},
      {"raceline.exit_fraction", Kind::kDouble, &rl.exit_fraction},
      {"raceline.sample_spacing", Kind::kDouble, &rl.sample_spacing},
      {"raceline.v_max", Kind::kDouble, &rl.v_max},
      {"raceline.lat_fraction", Kind::kDouble, &rl.lat_fraction},
      {"raceline.a_brake", Kind::kDouble, &rl.a_brake},
      {"raceline.a_accel", Kind::kDouble, &rl.a_accel},
      {"raceline.vehicle_half_width", Kind::kDouble, &rl.vehicle_half_width},
  };
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  double out{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
  return out;
}

long long parse_int(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  long long out{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  std::string t = trim(v);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
  for (const Binding& b : bindings(s)) {
    if (key != b.key) continue;
    switch (b.kind) {
      case Kind::kDouble:
        *static_cast<double*>(b.ptr) = parse_double(value, key);
        return;
      case Kind::kInt: {
        const long long x = parse_int(value, key);
        if (x < INT32_MIN || x > INT32_MAX) throw ConfigError("out of range for " + key);
        *static_cast<int*>(b.ptr) = static_cast<int>(x);
        return;
      }
      case Kind::kBool:
        *static_cast<bool*>(b.ptr) = parse_bool(value, key);
        return;
      case Kind::kU64: {
        const std::string t = trim(value);
        std::uint64_t out{};
        const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
          throw ConfigError("bad integer for " + key + ": '" + value + "'");
        }
        *static_cast<std::uint64_t*>(b.ptr) = out;
        return;
      }
    }
  }
  throw ConfigError("unknown setting: " + key);
}

void apply_settings_text(Settings& s, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.rfind("meta.", 0) == 0) continue;
    try {
      apply_setting(s, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_settings_file(Settings& s, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_settings_text(s, buf.str(), path);
}

std::string serialize_settings(const Settings& s) {
  std::string out;
  for (const Binding& b : bindings(const_cast<Settings&>(s))) {
    out += b.key;
    out += " = ";
    switch (b.kind) {
      case Kind::kDouble:
        out += format_double(*static_cast<const double*>(b.ptr));
        break;
      case Kind::kInt:
        out += std::to_string(*static_cast<const int*>(b.ptr));
        break;
      case Kind::kBool:
        out += *static_cast<const bool*>(b.ptr) ? "true" : "false";
        break;
      case Kind::kU64:
        out += std::to_string(*static_cast<const std::uint64_t*>(b.ptr));
        break;
    }
    out += '\n';
  }
  return out;
}

void finalize_settings(Settings& s) {
  auto& setup = s.setup;
  setup.planner.mass = setup.vehicle.mass;
  setup.prediction.mass = setup.vehicle.mass;
  setup.prediction.dt = setup.planner.dt;
  setup.planner.sensor_range = setup.race.sensor_range;
  s.raceline.lat =
      LatAccelModel{setup.vehicle.mu, setup.vehicle.c_down, setup.vehicle.mass, setup.vehicle.g};

  const auto positive = [](double x, const char* what) {
    if (!(x > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  if (setup.race.n_vehicles < 1) throw ConfigError("race.n_vehicles must be >= 1");
  if (setup.race.laps < 1) throw ConfigError("race.laps must be >= 1");
  if (setup.planner.n_shift_targets < 2) throw ConfigError("planner.n_shift_targets must be >= 2");
  positive(setup.planner.dt, "planner.dt");
  positive(setup.planner.x_max, "planner.x_max");
  positive(setup.race.sensor_range, "race.sensor_range");
  positive(setup.vehicle.mass, "vehicle.mass");
  positive(setup.vehicle.v_max, "vehicle.v_max");
  positive(setup.gains.k_lookahead, "gains.k_lookahead");
  positive(setup.gains.min_lookahead, "gains.min_lookahead");
  positive(setup.gains.k_omega, "gains.k_omega");
  positive(setup.gains.k_v, "gains.k_v");
  positive(setup.gains.k_follow, "gains.k_follow");
  positive(setup.gains.follow_lookahead, "gains.follow_lookahead");
  positive(s.raceline.sample_spacing, "raceline.sample_spacing");
}

std::string read_manifest_meta(const std::string& path, const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  const std::string want = "meta." + key;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    if (trim(line.substr(0, eq)) == want) return trim(line.substr(eq + 1));
  }
  throw ConfigError("manifest " + path + " lacks " + want);
}

}  // namespace racectl
