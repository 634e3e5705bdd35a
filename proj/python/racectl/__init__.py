"""Autonomous racing planner and race simulator (C++ core bindings)."""

from ._core import (
    Track,
    __version__,
    connect_points,
    generate_raceline,
    plan_segment,
    run_race,
)

__all__ = [
    "Track",
    "__version__",
    "connect_points",
    "generate_raceline",
    "plan_segment",
    "run_race",
]
