#include "racectl/racelog.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace racectl {

namespace {

constexpr char kTickHeader[] = "t,vehicle_id,x,y,heading,v,omega,s,lap,u,steer,slip_factor";

std::string format_row(const TickRow& r) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%.2f,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g,%.9g",
                r.t, r.vehicle_id, r.x, r.y, r.heading, r.v, r.omega, r.s, r.lap, r.u,
                r.steer, r.slip_factor);
  return buf;
}

}  // namespace

void write_tick_csv(const std::string& path, const std::vector<TickRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LogError("cannot open for writing: " + path);
  out << kTickHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  if (!out) throw LogError("write failed: " + path);
}

std::vector<TickRow> read_tick_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw LogError("empty tick log: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTickHeader) throw LogError("unexpected tick CSV header in " + path);

  std::vector<TickRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TickRow r;
    std::istringstream ss(line);
    std::string field;
    double* doubles[] = {&r.t,     nullptr, &r.x, &r.y,     &r.heading, &r.v,
                         &r.omega, &r.s,    nullptr, &r.u, &r.steer,   &r.slip_factor};
    int* ints[] = {nullptr, &r.vehicle_id, nullptr, nullptr, nullptr, nullptr,
                   nullptr, nullptr,       &r.lap,  nullptr, nullptr, nullptr};
    for (int i = 0; i < 12; ++i) {
      if (!std::getline(ss, field, ',')) {
        throw LogError(path + ":" + std::to_string(lineno) + ": expected 12 fields");
      }
      try {
        if (doubles[i]) {
          *doubles[i] = std::stod(field);
        } else {
          *ints[i] = std::stoi(field);
        }
      } catch (const std::exception&) {
        throw LogError(path + ":" + std::to_string(lineno) + ": bad field '" + field + "'");
      }
    }
    rows.push_back(r);
  }
  return rows;
}

void write_events_jsonl(const std::string& path, const std::vector<RaceEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LogError("cannot open for writing: " + path);
  for (const auto& e : events) {
    nlohmann::json j;
    j["t"] = e.t;
    j["type"] = e.type;
    j["vehicles"] = e.vehicles;
    j["data"] = e.data.is_null() ? nlohmann::json::object() : e.data;
    out << j.dump() << '\n';
  }
  if (!out) throw LogError("write failed: " + path);
}

std::vector<RaceEvent> read_events_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open: " + path);
  std::vector<RaceEvent> events;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw LogError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    RaceEvent e;
    try {
      e.t = j.at("t").get<double>();
      e.type = j.at("type").get<std::string>();
      e.vehicles = j.at("vehicles").get<std::vector<int>>();
      e.data = j.value("data", nlohmann::json::object());
    } catch (const nlohmann::json::exception& ex) {
      throw LogError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace racectl
