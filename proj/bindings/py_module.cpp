// Python bindings for the core operations: track charting, race-line
// generation, point-mass maneuver laws, and full race simulation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <string>
#include <vector>

#include "racectl/config.hpp"
#include "racectl/metrics.hpp"
#include "racectl/pointmass.hpp"
#include "racectl/racelog.hpp"
#include "racectl/raceline.hpp"
#include "racectl/sim.hpp"
#include "racectl/track.hpp"
#include "racectl/version.hpp"

namespace py = pybind11;
using namespace racectl;

namespace {

Settings settings_from(const py::dict& overrides) {
  Settings s;
  for (auto item : overrides) {
    apply_setting(s, py::cast<std::string>(py::str(item.first)),
                  py::cast<std::string>(py::str(item.second)));
  }
  finalize_settings(s);
  return s;
}

EndPoint endpoint_from(const py::sequence& q) {
  if (py::len(q) != 4) throw std::invalid_argument("endpoint needs (x, y, x_dot, y_dot)");
  return {py::cast<double>(q[0]), py::cast<double>(q[1]), py::cast<double>(q[2]),
          py::cast<double>(q[3])};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "autonomous racing planner and simulator core";
  m.attr("__version__") = kVersion;

  py::class_<Track>(m, "Track")
      .def_static(
          "from_file",
          [](const std::string& path) { return Track::build(load_track_config(path)); },
          py::arg("path"))
      .def_static(
          "from_text",
          [](const std::string& text) { return Track::build(parse_track_config_string(text)); },
          py::arg("text"))
      .def_property_readonly("length", &Track::length)
      .def_property_readonly("width", &Track::width)
      .def(
          "project",
          [](const Track& t, double x, double y) {
            const auto pr = t.project({x, y});
            return py::make_tuple(pr.s, pr.y);
          },
          py::arg("x"), py::arg("y"), "Cartesian point -> (station, lateral offset)")
      .def(
          "position",
          [](const Track& t, double s, double y) {
            const Vec2 p = t.position(s, y);
            return py::make_tuple(p.x, p.y);
          },
          py::arg("s"), py::arg("y"), "(station, lateral offset) -> Cartesian point");

  m.def(
      "generate_raceline",
      [](const Track& track, const py::dict& overrides) {
        const Settings s = settings_from(overrides);
        const Raceline line = generate_raceline(track, s.raceline);
        py::list out;
        for (const auto& smp : line.samples) {
          out.append(py::make_tuple(smp.s, smp.x, smp.y, smp.v));
        }
        return out;
      },
      py::arg("track"), py::arg("overrides") = py::dict(),
      "Race line as a list of (s, x, y, v) samples");

  m.def(
      "plan_segment",
      [](const py::sequence& ps, const py::sequence& pg, double mass) {
        const SegmentLaw law = plan_segment(endpoint_from(ps), endpoint_from(pg), mass);
        py::dict out;
        out["f_y"] = law.f_y;
        out["t_switch"] = law.t_switch;
        out["t_total"] = law.t_total;
        return out;
      },
      py::arg("start"), py::arg("goal"), py::arg("mass"),
      "Minimum-force bang-bang lateral law between two (x, y, x_dot, y_dot) states");

  m.def(
      "connect_points",
      [](const std::vector<py::sequence>& pts, double mass, double dt) {
        std::vector<EndPoint> eps;
        eps.reserve(pts.size());
        for (const auto& q : pts) eps.push_back(endpoint_from(q));
        const Maneuver man = connect_points(eps, mass, dt);
        py::list out;
        for (const auto& smp : man.samples) {
          out.append(py::make_tuple(smp.t, smp.q.x, smp.q.y, smp.q.x_dot, smp.q.y_dot));
        }
        return out;
      },
      py::arg("points"), py::arg("mass"), py::arg("dt") = 0.04,
      "Chain bang-bang segments through waypoints; list of (t, x, y, x_dot, y_dot)");

  m.def(
      "run_race",
      [](const Track& track, const py::dict& overrides, const std::string& out_dir) {
        const Settings s = settings_from(overrides);
        const Raceline line = generate_raceline(track, s.raceline);
        const RacelineView view(track, line);
        const RaceResult res = run_race(track, view, s.setup);
        if (!out_dir.empty()) {
          std::filesystem::create_directories(out_dir);
          const std::filesystem::path dir(out_dir);
          write_tick_csv((dir / "ticks.csv").string(), res.rows);
          write_events_jsonl((dir / "events.jsonl").string(), res.events);
        }
        const RaceMetrics met = compute_metrics(res.rows, res.events, track.length());
        py::dict out;
        out["finished"] = res.finished;
        out["t_end"] = res.t_end;
        out["lap_times"] = met.lap_times;
        out["lap_spread"] = met.lap_spread;
        out["gap_mean"] = met.gap_mean;
        out["overtakes"] = met.overtake_list.size();
        py::dict counts;
        for (const auto& [type, count] : met.event_counts) counts[py::str(type)] = count;
        out["events"] = counts;
        return out;
      },
      py::arg("track"), py::arg("overrides") = py::dict(), py::arg("out_dir") = std::string(),
      "Run a race; returns a summary dict, optionally writing logs");
}
