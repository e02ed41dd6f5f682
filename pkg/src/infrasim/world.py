"""Static scene: vector map geometry, intersection regions, signals.

The map file is a JSON document with top-level keys ``lanes``,
``intersections``, ``signals`` and ``ground_z``; coordinates live in a
local metric frame (meters, x east, y north, z up). The full schema is
documented in docs/map_format.md and validated on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .geometry import polyline_length, polyline_point_at, project_to_polyline


class MapFormatError(ValueError):
    """Raised when a map file cannot be parsed; names the offending field."""


class MapValidationError(ValueError):
    """Raised when a parsed map violates invariants; lists all violations."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid map: " + "; ".join(violations))


@dataclass(frozen=True)
class Lane:
    id: str
    centerline: tuple[tuple[float, float], ...]
    width: float
    successors: tuple[str, ...]
    speed_limit: float

    @property
    def length(self) -> float:
        return polyline_length(list(self.centerline))


@dataclass(frozen=True)
class IntersectionRegion:
    """Cylindrical region: radius d_f around the center, a height band above ground.

    z_c is stored for completeness but membership depends only on planar
    distance and the z band.
    """

    id: str
    center: tuple[float, float]
    d_f: float
    z_c: float = 0.0
    ground: float = 0.0
    height_band: float = 4.0


@dataclass(frozen=True)
class TrafficSignal:
    id: str
    intersection_id: str
    phase_durations: tuple[tuple[str, float], ...]
    controlled_lane_ids: tuple[str, ...]

    @property
    def cycle_length(self) -> float:
        return sum(d for _, d in self.phase_durations)


@dataclass(frozen=True)
class VectorMap:
    lanes: tuple[Lane, ...]
    intersections: tuple[IntersectionRegion, ...]
    signals: tuple[TrafficSignal, ...]
    ground_z: float = 0.0

    def lane(self, lane_id: str) -> Lane:
        return self._lane_index[lane_id]

    @property
    def _lane_index(self) -> dict[str, Lane]:
        idx = getattr(self, "_lane_index_cache", None)
        if idx is None:
            idx = {lane.id: lane for lane in self.lanes}
            object.__setattr__(self, "_lane_index_cache", idx)
        return idx

    def entry_lanes(self) -> list[Lane]:
        """Lanes no other lane feeds into (background-traffic spawn points)."""
        fed = {s for lane in self.lanes for s in lane.successors}
        return [lane for lane in self.lanes if lane.id not in fed]

    def signal_for_lane(self, lane_id: str) -> TrafficSignal | None:
        for sig in self.signals:
            if lane_id in sig.controlled_lane_ids:
                return sig
        return None


def point_in_intersection(p: tuple[float, float, float],
                          region: IntersectionRegion) -> bool:
    """Membership in the region cylinder; boundaries are inside."""
    x, y, z = p
    dx, dy = x - region.center[0], y - region.center[1]
    if dx * dx + dy * dy > region.d_f * region.d_f:
        return False
    return region.ground <= z <= region.ground + region.height_band


def traffic_light_phase(signal: TrafficSignal, t: float) -> str:
    """Phase active at time t; a boundary instant belongs to the incoming phase."""
    cycle = signal.cycle_length
    rem = math.fmod(t, cycle)
    for name, dur in signal.phase_durations:
        if rem < dur:
            return name
        rem -= dur
    return signal.phase_durations[0][0]


# ---------------------------------------------------------------------------
# map loading


def _expect(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise MapFormatError(f"{where}: missing field '{key}'")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MapFormatError(f"{where}.{key}: expected number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise MapFormatError(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_xy(value, where: str) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise MapFormatError(f"{where}: expected [x, y], got {value!r}")
    return (float(value[0]), float(value[1]))


def _parse_lane(doc: dict, where: str) -> Lane:
    raw_line = _expect(doc, "centerline", list, where)
    centerline = tuple(_parse_xy(p, f"{where}.centerline[{i}]")
                       for i, p in enumerate(raw_line))
    return Lane(
        id=str(_expect(doc, "id", str, where)),
        centerline=centerline,
        width=_expect(doc, "width", float, where),
        successors=tuple(str(s) for s in doc.get("successors", [])),
        speed_limit=_expect(doc, "speed_limit", float, where),
    )


def _parse_intersection(doc: dict, ground_z: float, where: str) -> IntersectionRegion:
    return IntersectionRegion(
        id=str(_expect(doc, "id", str, where)),
        center=_parse_xy(_expect(doc, "center", list, where), f"{where}.center"),
        d_f=_expect(doc, "d_f", float, where),
        z_c=float(doc.get("z_c", ground_z)),
        ground=float(doc.get("ground", ground_z)),
        height_band=float(doc.get("height_band", 4.0)),
    )


def _parse_signal(doc: dict, where: str) -> TrafficSignal:
    raw_phases = _expect(doc, "phases", list, where)
    phases = []
    for i, item in enumerate(raw_phases):
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not isinstance(item[0], str)
                or not isinstance(item[1], (int, float))):
            raise MapFormatError(
                f"{where}.phases[{i}]: expected [name, seconds], got {item!r}")
        phases.append((item[0], float(item[1])))
    return TrafficSignal(
        id=str(_expect(doc, "id", str, where)),
        intersection_id=str(_expect(doc, "intersection_id", str, where)),
        phase_durations=tuple(phases),
        controlled_lane_ids=tuple(str(s) for s in doc.get("controlled_lane_ids", [])),
    )


def validate_map(m: VectorMap) -> list[str]:
    """All invariant violations, empty when the map is well formed."""
    problems: list[str] = []
    lane_ids: set[str] = set()
    for lane in m.lanes:
        where = f"lane '{lane.id}'"
        if lane.id in lane_ids:
            problems.append(f"{where}: duplicate id")
        lane_ids.add(lane.id)
        if len(lane.centerline) < 2:
            problems.append(f"{where}: centerline needs >= 2 waypoints")
        for i in range(len(lane.centerline) - 1):
            if math.dist(lane.centerline[i], lane.centerline[i + 1]) < 1e-9:
                problems.append(f"{where}: waypoints {i} and {i + 1} coincide")
        if len(lane.centerline) >= 2 and lane.length <= 0.0:
            problems.append(f"{where}: zero arc length")
        if lane.width <= 0.0:
            problems.append(f"{where}: width must be > 0")
        if lane.speed_limit <= 0.0:
            problems.append(f"{where}: speed_limit must be > 0")
    for lane in m.lanes:
        for succ in lane.successors:
            if succ not in lane_ids:
                problems.append(f"lane '{lane.id}': unknown successor '{succ}'")
    seen_regions: set[str] = set()
    for region in m.intersections:
        where = f"intersection '{region.id}'"
        if region.id in seen_regions:
            problems.append(f"{where}: duplicate id")
        seen_regions.add(region.id)
        if region.d_f <= 0.0:
            problems.append(f"{where}: d_f must be > 0")
    for sig in m.signals:
        where = f"signal '{sig.id}'"
        if not sig.phase_durations:
            problems.append(f"{where}: no phases")
        for name, dur in sig.phase_durations:
            if dur <= 0.0:
                problems.append(f"{where}: phase '{name}' duration must be > 0")
        if sig.intersection_id not in seen_regions:
            problems.append(f"{where}: unknown intersection '{sig.intersection_id}'")
        for lane_id in sig.controlled_lane_ids:
            if lane_id not in lane_ids:
                problems.append(f"{where}: unknown controlled lane '{lane_id}'")
    return problems


def map_from_dict(doc: dict) -> VectorMap:
    if not isinstance(doc, dict):
        raise MapFormatError("map: top level must be a JSON object")
    ground_z = float(doc.get("ground_z", 0.0))
    lanes = tuple(_parse_lane(d, f"lanes[{i}]")
                  for i, d in enumerate(_expect(doc, "lanes", list, "map")))
    intersections = tuple(
        _parse_intersection(d, ground_z, f"intersections[{i}]")
        for i, d in enumerate(doc.get("intersections", [])))
    signals = tuple(_parse_signal(d, f"signals[{i}]")
                    for i, d in enumerate(doc.get("signals", [])))
    m = VectorMap(lanes=lanes, intersections=intersections,
                  signals=signals, ground_z=ground_z)
    problems = validate_map(m)
    if problems:
        raise MapValidationError(problems)
    return m


def map_to_dict(m: VectorMap) -> dict:
    return {
        "ground_z": m.ground_z,
        "lanes": [
            {"id": l.id, "centerline": [list(p) for p in l.centerline],
             "width": l.width, "successors": list(l.successors),
             "speed_limit": l.speed_limit}
            for l in m.lanes
        ],
        "intersections": [
            {"id": r.id, "center": list(r.center), "d_f": r.d_f, "z_c": r.z_c,
             "ground": r.ground, "height_band": r.height_band}
            for r in m.intersections
        ],
        "signals": [
            {"id": s.id, "intersection_id": s.intersection_id,
             "phases": [[n, d] for n, d in s.phase_durations],
             "controlled_lane_ids": list(s.controlled_lane_ids)}
            for s in m.signals
        ],
    }


def load_map(path) -> VectorMap:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"map {path}: invalid JSON at line {exc.lineno}") from exc
    return map_from_dict(doc)


# ---------------------------------------------------------------------------
# waypoint graph


@dataclass
class WaypointGraph:
    """Directed graph of resampled centerline points.

    Node ids are "<lane_id>:<index>" so lexicographic order is deterministic.
    """

    nodes: dict[str, tuple[float, float]] = field(default_factory=dict)
    edges: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def add_edge(self, a: str, b: str, w: float) -> None:
        self.edges.setdefault(a, []).append((b, w))

    def neighbors(self, node: str) -> list[tuple[str, float]]:
        return self.edges.get(node, [])

    def nearest_node(self, p: tuple[float, float]) -> str:
        return min(self.nodes,
                   key=lambda n: (math.dist(self.nodes[n], p), n))


def resample_polyline(pts: list[tuple[float, float]],
                      spacing: float) -> list[tuple[float, float]]:
    """Points along a polyline at intervals <= spacing, endpoints included."""
    total = polyline_length(pts)
    n_seg = max(1, math.ceil(total / spacing - 1e-12))
    out = []
    for i in range(n_seg + 1):
        pt, _ = polyline_point_at(pts, total * i / n_seg)
        out.append(pt)
    return out


def build_waypoint_graph(m: VectorMap, spacing: float) -> WaypointGraph:
    if spacing <= 0.0:
        raise ValueError("spacing must be > 0")
    g = WaypointGraph()
    first_node: dict[str, str] = {}
    last_node: dict[str, str] = {}
    for lane in m.lanes:
        samples = resample_polyline(list(lane.centerline), spacing)
        ids = [f"{lane.id}:{i}" for i in range(len(samples))]
        for node_id, pt in zip(ids, samples):
            g.nodes[node_id] = pt
        for a, b in zip(ids, ids[1:]):
            g.add_edge(a, b, math.dist(g.nodes[a], g.nodes[b]))
        first_node[lane.id] = ids[0]
        last_node[lane.id] = ids[-1]
    for lane in m.lanes:
        for succ in lane.successors:
            a, b = last_node[lane.id], first_node[succ]
            g.add_edge(a, b, math.dist(g.nodes[a], g.nodes[b]))
    return g


def nearest_lane(m: VectorMap, p: tuple[float, float]) -> tuple[str, float, float]:
    """(lane id, arc offset, lateral offset) of the closest lane centerline.

    Ties in perpendicular distance break toward the smallest lane id.
    """
    if not m.lanes:
        raise ValueError("map has no lanes")
    best: tuple[float, str, float] | None = None
    for lane in sorted(m.lanes, key=lambda l: l.id):
        arc, dist = project_to_polyline(list(lane.centerline), p)
        if best is None or dist < best[0] - 1e-9:
            best = (dist, lane.id, arc)
    assert best is not None
    return (best[1], best[2], best[0])
