#pragma once

// Race log records and their on-disk formats: the 25 Hz tick CSV
// (t,vehicle_id,x,y,heading,v,omega,s,lap,u,steer,slip_factor) and the event
// JSONL stream. Decimal points, LF line endings, deterministic field
// formatting.

#include <string>
#include <vector>

#include <json.hpp>

namespace racectl {

struct LogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One vehicle's state row at a 25 Hz control instant.
struct TickRow {
  double t{0.0};        // s
  int vehicle_id{0};
  double x{0.0};        // m Cartesian
  double y{0.0};        // m Cartesian
  double heading{0.0};  // rad
  double v{0.0};        // m/s
  double omega{0.0};    // rad/s
  double s{0.0};        // m wrapped station
  int lap{0};           // line crossings so far (0 = grid run-up)
  double u{0.0};        // throttle/brake command this cycle
  double steer{0.0};    // steering command this cycle
  double slip_factor{1.0};
};

// One event: collision | boundary | lat_sat | overtake | lap.
struct RaceEvent {
  double t{0.0};
  std::string type;
  std::vector<int> vehicles;
  nlohmann::json data;  // type-specific payload (object)
};

void write_tick_csv(const std::string& path, const std::vector<TickRow>& rows);
std::vector<TickRow> read_tick_csv(const std::string& path);

void write_events_jsonl(const std::string& path, const std::vector<RaceEvent>& events);
std::vector<RaceEvent> read_events_jsonl(const std::string& path);

}  // namespace racectl
