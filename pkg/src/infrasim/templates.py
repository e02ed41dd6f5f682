"""Six hazardous-interaction templates staged against the ego vehicle.

Each template turns the ego's state at trigger time into one scripted
actor whose path and speed profile are aimed at the ego's extrapolated
trajectory, so a non-reacting ego meets the hazard. Actors are ordinary
objects once spawned; parameters are user-overridable per injection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .states import DEFAULT_SIZES

TEMPLATE_KINDS = (
    "red_light_runner", "left_turn_across_path", "pedestrian_crossing",
    "rear_end_decel", "lateral_cut_in", "opposite_direction_drift",
)


@dataclass
class ScriptedActor:
    """Path follower with a piecewise-linear speed profile (t is seconds
    since spawn; speed holds after the last breakpoint)."""

    cls: str
    path: list[tuple[float, float]]
    speed_profile: list[tuple[float, float]]
    size: tuple[float, float, float] = field(default=None)

    def __post_init__(self):
        if self.size is None:
            self.size = DEFAULT_SIZES[self.cls]

    def speed_at(self, t_since_spawn: float) -> float:
        profile = self.speed_profile
        if t_since_spawn <= profile[0][0]:
            return profile[0][1]
        for (t0, v0), (t1, v1) in zip(profile, profile[1:]):
            if t_since_spawn <= t1:
                f = (t_since_spawn - t0) / (t1 - t0)
                return v0 + f * (v1 - v0)
        return profile[-1][1]


@dataclass
class EgoSnapshot:
    position: tuple[float, float]
    yaw: float
    speed: float


def _unit(yaw: float) -> tuple[float, float]:
    return (math.cos(yaw), math.sin(yaw))


def _left(yaw: float) -> tuple[float, float]:
    return (-math.sin(yaw), math.cos(yaw))


def _add(p, v, k=1.0):
    return (p[0] + k * v[0], p[1] + k * v[1])


def _polyline_len(pts) -> float:
    return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))


def build_template_actor(kind: str, ego: EgoSnapshot,
                         params: dict) -> ScriptedActor:
    if kind not in TEMPLATE_KINDS:
        raise ValueError(f"unknown template kind '{kind}'")
    builder = {
        "red_light_runner": _red_light_runner,
        "left_turn_across_path": _left_turn_across_path,
        "pedestrian_crossing": _pedestrian_crossing,
        "rear_end_decel": _rear_end_decel,
        "lateral_cut_in": _lateral_cut_in,
        "opposite_direction_drift": _opposite_direction_drift,
    }[kind]
    return builder(ego, params)


def _red_light_runner(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Cross traffic runs the conflicting approach, timed to the ego's
    arrival at the crossing point."""
    speed = params.get("speed", 12.0)
    distance = params.get("distance", 40.0)
    cls = params.get("actor_class", "car")
    side = params.get("side", "left")
    tau = distance / speed
    fwd = _unit(ego.yaw)
    conflict = _add(ego.position, fwd, max(ego.speed, 1.0) * tau)
    lateral = _left(ego.yaw)
    sign = 1.0 if side == "left" else -1.0
    start = _add(conflict, lateral, sign * distance)
    end = _add(conflict, lateral, -sign * 60.0)
    return ScriptedActor(cls=cls, path=[start, conflict, end],
                         speed_profile=[(0.0, speed)])


def _left_turn_across_path(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Oncoming vehicle turns across the ego lane at the ego's arrival point."""
    speed = params.get("speed", 9.0)
    approach = params.get("distance", 45.0)
    lane_offset = params.get("lane_offset", 3.5)
    cls = params.get("actor_class", "car")
    fwd = _unit(ego.yaw)
    left = _left(ego.yaw)
    # path shape is fixed relative to the (yet unknown) crossing point, so
    # its length, and hence the synchronized arrival time, is known first
    rel = [
        _add(_add((0.0, 0.0), fwd, approach), left, lane_offset),
        _add(_add((0.0, 0.0), fwd, 10.0), left, lane_offset),
        (0.0, 0.0),
        _add(_add((0.0, 0.0), fwd, -4.0), left, -8.0),
    ]
    dist_to_cross = _polyline_len(rel[:3])
    tau = dist_to_cross / speed
    conflict = _add(ego.position, fwd, max(ego.speed, 1.0) * tau)
    path = [_add(conflict, p) for p in rel]
    return ScriptedActor(cls=cls, path=path, speed_profile=[(0.0, speed)])


def _pedestrian_crossing(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Pedestrian crosses the ego lane; with a stationary ego the crossing
    point sits ahead of the ego and is never reached."""
    walk_speed = params.get("walk_speed", 1.4)
    roadside = params.get("roadside_offset", 6.0)
    fallback_ahead = params.get("distance", 15.0)
    side = params.get("side", "left")
    tau = roadside / walk_speed
    fwd = _unit(ego.yaw)
    ahead = ego.speed * tau if ego.speed > 0.1 else fallback_ahead
    conflict = _add(ego.position, fwd, ahead)
    lateral = _left(ego.yaw)
    sign = 1.0 if side == "left" else -1.0
    start = _add(conflict, lateral, sign * roadside)
    end = _add(conflict, lateral, -sign * roadside)
    return ScriptedActor(cls="pedestrian", path=[start, conflict, end],
                         speed_profile=[(0.0, walk_speed)])


def _rear_end_decel(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Lead vehicle ahead of the ego brakes hard to a stop."""
    gap = params.get("gap", 18.0)
    decel = params.get("decel", 4.0)
    cruise = params.get("cruise_time", 1.0)
    cls = params.get("actor_class", "car")
    lead_speed = params.get("speed", max(ego.speed, 1.0))
    fwd = _unit(ego.yaw)
    size = DEFAULT_SIZES[cls]
    start = _add(ego.position, fwd, gap + 0.5 * size[0] + 2.25)
    end = _add(start, fwd, 200.0)
    profile = [(0.0, lead_speed), (cruise, lead_speed),
               (cruise + lead_speed / decel, 0.0)]
    return ScriptedActor(cls=cls, path=[start, end], speed_profile=profile)


def _lateral_cut_in(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Adjacent-lane vehicle merges in ahead of the ego at a small gap."""
    ahead = params.get("ahead", 12.0)
    lateral = params.get("lateral", 3.5)
    speed = params.get("speed", max(0.6 * ego.speed, 2.0))
    merge_run = params.get("merge_run", 10.0)
    cls = params.get("actor_class", "car")
    side = params.get("side", "left")
    fwd = _unit(ego.yaw)
    lat = _left(ego.yaw)
    sign = 1.0 if side == "left" else -1.0
    start = _add(_add(ego.position, fwd, ahead), lat, sign * lateral)
    merge_start = _add(start, fwd, 4.0)
    merge_end = _add(_add(start, fwd, 4.0 + merge_run), lat, -sign * lateral)
    end = _add(merge_end, fwd, 150.0)
    return ScriptedActor(cls=cls, path=[start, merge_start, merge_end, end],
                         speed_profile=[(0.0, speed)])


def _opposite_direction_drift(ego: EgoSnapshot, params: dict) -> ScriptedActor:
    """Oncoming vehicle drifts over the centerline into the ego lane."""
    distance = params.get("distance", 60.0)
    speed = params.get("speed", 10.0)
    lane_offset = params.get("lane_offset", 3.5)
    drift_run = params.get("drift_run", 25.0)
    cls = params.get("actor_class", "car")
    fwd = _unit(ego.yaw)
    left = _left(ego.yaw)
    start = _add(_add(ego.position, fwd, distance), left, lane_offset)
    drift_end = _add(ego.position, fwd, distance - drift_run)
    end = _add(ego.position, fwd, -30.0)
    return ScriptedActor(cls=cls, path=[start, drift_end, end],
                         speed_profile=[(0.0, speed)])
