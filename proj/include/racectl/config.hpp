#pragma once

// Layered run configuration: one Settings struct covering every tunable,
// populated from built-in defaults, then a key = value config file, then
// command-line overrides, and echoed verbatim into each run's manifest.

#include <stdexcept>
#include <string>

#include "racectl/raceline.hpp"
#include "racectl/sim.hpp"

namespace racectl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  RaceSetup setup;
  RacelineParams raceline;
};

// Applies one dotted-key override ("planner.x_max", "race.seed", ...).
// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(Settings& s, const std::string& key, const std::string& value);

// Parses "key = value" lines; '#' starts a comment. Keys under "meta." are
// ignored so a manifest can be replayed as a config file.
void load_settings_file(Settings& s, const std::string& path);
void apply_settings_text(Settings& s, const std::string& text, const std::string& origin);

// Every key in declaration order, round-trip formatted.
std::string serialize_settings(const Settings& s);

// Reconciles fields that exist in several sub-configs (masses, sample dt,
// sensor range) and validates ranges. Call after all layers are applied.
void finalize_settings(Settings& s);

// Reads one "meta.<key> = value" entry from a manifest file; throws
// ConfigError when absent.
std::string read_manifest_meta(const std::string& path, const std::string& key);

}  // namespace racectl
