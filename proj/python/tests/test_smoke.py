"""End-to-end smoke tests for the Python bindings."""

import math

import pytest

import racectl

OVAL = """
width 12
straight 400
arc 120 90
arc 120 90
straight 400
arc 120 90
arc 120 90
"""


@pytest.fixture(scope="module")
def track():
    return racectl.Track.from_text(OVAL)


def test_track_geometry_roundtrip(track):
    assert track.width == pytest.approx(12.0)
    assert track.length == pytest.approx(2 * 400 + 2 * math.pi * 120, rel=1e-9)
    x, y = track.position(150.0, 4.5)
    s, off = track.project(x, y)
    assert s == pytest.approx(150.0, abs=1e-6)
    assert off == pytest.approx(4.5, abs=1e-6)


def test_raceline_stays_on_track(track):
    samples = racectl.generate_raceline(track)
    assert len(samples) > 100
    for s, x, y, v in samples[:: max(1, len(samples) // 50)]:
        _, off = track.project(x, y)
        assert 0.0 < off < track.width
        assert 0.0 < v <= 83.0 + 1e-9


def test_plan_segment_worked_example():
    law = racectl.plan_segment((0, 0, 80, 0), (100, 4, 80, 0), 750.0)
    assert law["t_total"] == pytest.approx(1.25)
    assert law["t_switch"] == pytest.approx(0.625)
    assert abs(law["f_y"]) / 750.0 == pytest.approx(10.24)


def test_connect_points_hits_waypoints():
    pts = [(0, 2, 60, 0), (90, 8, 60, 0), (180, 8, 60, 0)]
    samples = racectl.connect_points(pts, 750.0, dt=0.05)
    assert samples[0][1:] == pytest.approx((0, 2, 60, 0))
    t_end, x_end, y_end, _, yd_end = samples[-1]
    assert t_end == pytest.approx(180 / 60)
    assert x_end == pytest.approx(180)
    assert y_end == pytest.approx(8, abs=1e-6)
    assert yd_end == pytest.approx(0, abs=1e-6)


def test_short_race_runs_clean(track):
    summary = racectl.run_race(
        track,
        {"race.n_vehicles": 2, "race.laps": 1, "race.seed": 7, "race.t_max": 300},
    )
    assert summary["finished"]
    assert summary["events"].get("collision_body", 0) == 0
    assert any(len(laps) >= 1 for laps in summary["lap_times"])
