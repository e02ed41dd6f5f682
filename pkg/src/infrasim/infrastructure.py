"""Infrastructure units: sensor clustering, agent groups, coverage.

A unit is a clique of co-located sensors sharing one processing unit:
every pair within 2 m planar distance, within 4 m vertically, same
processor. Clustering is greedy over sensors sorted by id so the
partition is deterministic and permutation-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .geometry import angle_diff, segment_rect_entry
from .states import ObjectState
from .world import VectorMap, point_in_intersection

SENSOR_KINDS = ("lidar", "camera", "radar")

# clique constraints for one unit
MAX_PLANAR_SEP = 2.0
MAX_VERTICAL_SEP = 4.0

DEFAULT_FOV = {"lidar": 2.0 * math.pi, "camera": math.pi / 3.0,
               "radar": math.pi / 2.0}
DEFAULT_RANGE = {"lidar": 100.0, "camera": 80.0, "radar": 120.0}


@dataclass(frozen=True)
class SensorSpec:
    id: str
    kind: str
    position: tuple[float, float, float]
    yaw: float = 0.0
    fov: float | None = None
    range_m: float | None = None
    processing_unit: str = "p0"
    noise: str | None = None

    @property
    def fov_rad(self) -> float:
        return self.fov if self.fov is not None else DEFAULT_FOV[self.kind]

    @property
    def range_max(self) -> float:
        return self.range_m if self.range_m is not None else DEFAULT_RANGE[self.kind]

    def validate(self) -> None:
        if self.kind not in SENSOR_KINDS:
            raise ValueError(f"sensor '{self.id}': unknown kind '{self.kind}'")
        if not 0.0 < self.fov_rad <= 2.0 * math.pi + 1e-12:
            raise ValueError(f"sensor '{self.id}': fov must be in (0, 2*pi]")
        if self.range_max <= 0.0:
            raise ValueError(f"sensor '{self.id}': range must be > 0")


@dataclass(frozen=True)
class InfrastructureUnit:
    id: str
    sensors: tuple[SensorSpec, ...]
    processing_unit: str
    intersection_id: str | None = None


@dataclass(frozen=True)
class IntersectionAgentGroup:
    intersection_id: str
    units: tuple[str, ...]


@dataclass(frozen=True)
class PlacementLayout:
    name: str
    sensors: tuple[SensorSpec, ...]


def _pair_ok(a: SensorSpec, b: SensorSpec) -> bool:
    if a.processing_unit != b.processing_unit:
        return False
    dx = a.position[0] - b.position[0]
    dy = a.position[1] - b.position[1]
    if math.hypot(dx, dy) > MAX_PLANAR_SEP:
        return False
    return abs(a.position[2] - b.position[2]) <= MAX_VERTICAL_SEP


def cluster_sensors_into_ius(sensors: list[SensorSpec]) -> list[InfrastructureUnit]:
    """Partition sensors into units (greedy first-fit cliques by sorted id)."""
    ids = [s.id for s in sensors]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate sensor ids: {dupes}")
    groups: list[list[SensorSpec]] = []
    for sensor in sorted(sensors, key=lambda s: s.id):
        for group in groups:
            if all(_pair_ok(sensor, member) for member in group):
                group.append(sensor)
                break
        else:
            groups.append([sensor])
    return [
        InfrastructureUnit(id=f"iu_{i}", sensors=tuple(group),
                           processing_unit=group[0].processing_unit)
        for i, group in enumerate(groups)
    ]


def group_ius_by_intersection(units: list[InfrastructureUnit],
                              m: VectorMap) -> list[IntersectionAgentGroup]:
    """Assign each unit to the region containing all its sensors.

    Units inside several overlapping regions go to the one with the nearest
    center (ties to the smallest region id); units inside none stay ungrouped.
    """
    assignment: dict[str, list[str]] = {}
    for unit in units:
        candidates = []
        for region in m.intersections:
            if all(point_in_intersection(s.position, region) for s in unit.sensors):
                cx = sum(s.position[0] for s in unit.sensors) / len(unit.sensors)
                cy = sum(s.position[1] for s in unit.sensors) / len(unit.sensors)
                dist = math.hypot(cx - region.center[0], cy - region.center[1])
                candidates.append((dist, region.id))
        if candidates:
            candidates.sort()
            assignment.setdefault(candidates[0][1], []).append(unit.id)
    return [IntersectionAgentGroup(intersection_id=rid, units=tuple(uids))
            for rid, uids in sorted(assignment.items())]


def sensor_visibility(sensor: SensorSpec,
                      objects: list[ObjectState]) -> list[str]:
    """Ids of objects within range and aperture and not occluded.

    Occlusion is 2D: the ray from the sensor to the object's footprint
    center must not pass through any other object's footprint rectangle.
    """
    sx, sy = sensor.position[0], sensor.position[1]
    visible: list[str] = []
    for obj in objects:
        ox, oy = obj.xy
        dist = math.hypot(ox - sx, oy - sy)
        if dist > sensor.range_max:
            continue
        if sensor.fov_rad < 2.0 * math.pi - 1e-12 and dist > 1e-9:
            bearing = math.atan2(oy - sy, ox - sx)
            if angle_diff(bearing, sensor.yaw) > 0.5 * sensor.fov_rad + 1e-12:
                continue
        occluded = False
        for other in objects:
            if other is obj:
                continue
            t = segment_rect_entry((sx, sy), (ox, oy), other.footprint())
            if t is not None and t < 1.0 - 1e-9:
                occluded = True
                break
        if not occluded:
            visible.append(obj.track_id)
    return visible


def _covers(sensor: SensorSpec, x: float, y: float) -> bool:
    sx, sy = sensor.position[0], sensor.position[1]
    dist = math.hypot(x - sx, y - sy)
    if dist > sensor.range_max:
        return False
    if sensor.fov_rad >= 2.0 * math.pi - 1e-12 or dist <= 1e-9:
        return True
    bearing = math.atan2(y - sy, x - sx)
    return angle_diff(bearing, sensor.yaw) <= 0.5 * sensor.fov_rad + 1e-12


@dataclass
class CoverageMap:
    grid: float
    cells: list[tuple[float, float, int]] = field(default_factory=list)

    @property
    def covered_fraction(self) -> float:
        if not self.cells:
            return 0.0
        return sum(1 for _, _, n in self.cells if n >= 1) / len(self.cells)

    @property
    def redundancy_fraction(self) -> float:
        if not self.cells:
            return 0.0
        return sum(1 for _, _, n in self.cells if n >= 2) / len(self.cells)


def placement_coverage(layout: PlacementLayout, m: VectorMap,
                       grid: float) -> CoverageMap:
    """Sensor count per grid cell center inside any intersection region."""
    if grid <= 0.0:
        raise ValueError("grid must be > 0")
    cov = CoverageMap(grid=grid)
    if not m.intersections:
        return cov
    x_min = min(r.center[0] - r.d_f for r in m.intersections)
    x_max = max(r.center[0] + r.d_f for r in m.intersections)
    y_min = min(r.center[1] - r.d_f for r in m.intersections)
    y_max = max(r.center[1] + r.d_f for r in m.intersections)
    nx = math.ceil((x_max - x_min) / grid)
    ny = math.ceil((y_max - y_min) / grid)
    for iy in range(ny):
        cy = y_min + (iy + 0.5) * grid
        for ix in range(nx):
            cx = x_min + (ix + 0.5) * grid
            inside = any(
                point_in_intersection((cx, cy, r.ground), r)
                for r in m.intersections)
            if not inside:
                continue
            count = sum(1 for s in layout.sensors if _covers(s, cx, cy))
            cov.cells.append((cx, cy, count))
    return cov


# ---------------------------------------------------------------------------
# sensor configuration files


def sensor_from_dict(doc: dict, where: str = "sensor") -> SensorSpec:
    try:
        pos = doc["position"]
        spec = SensorSpec(
            id=str(doc["id"]),
            kind=str(doc["kind"]),
            position=(float(pos[0]), float(pos[1]), float(pos[2])),
            yaw=float(doc.get("yaw", 0.0)),
            fov=None if doc.get("fov") is None else float(doc["fov"]),
            range_m=None if doc.get("range") is None else float(doc["range"]),
            processing_unit=str(doc.get("processing_unit", "p0")),
            noise=doc.get("noise"),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ValueError(f"{where}: bad sensor record ({exc})") from exc
    spec.validate()
    return spec


def sensor_to_dict(s: SensorSpec) -> dict:
    return {
        "id": s.id, "kind": s.kind, "position": list(s.position),
        "yaw": s.yaw, "fov": s.fov, "range": s.range_m,
        "processing_unit": s.processing_unit, "noise": s.noise,
    }


def load_sensor_config(path) -> list[SensorSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError(f"sensor config {path}: expected a JSON list")
    return [sensor_from_dict(d, f"sensors[{i}]") for i, d in enumerate(doc)]
