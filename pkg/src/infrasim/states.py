"""Shared moving-object vocabulary: object states, frames, clock, conflicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import Rect

OBJECT_CLASSES = ("car", "truck", "bus", "pedestrian", "cyclist")
VEHICLE_CLASSES = ("car", "truck", "bus")

# default (length, width, height) per class, meters
DEFAULT_SIZES: dict[str, tuple[float, float, float]] = {
    "car": (4.5, 1.8, 1.5),
    "truck": (8.0, 2.5, 3.0),
    "bus": (11.0, 2.5, 3.2),
    "pedestrian": (0.5, 0.5, 1.7),
    "cyclist": (1.8, 0.6, 1.7),
}


@dataclass
class ObjectState:
    """One object at one timestamp: pose, size, class, id, speed."""

    track_id: str | None
    cls: str
    position: tuple[float, float, float]
    yaw: float
    size: tuple[float, float, float]
    speed: float
    timestamp: float
    conf: float = 1.0

    @property
    def xy(self) -> tuple[float, float]:
        return (self.position[0], self.position[1])

    def velocity(self) -> tuple[float, float]:
        return (self.speed * math.cos(self.yaw), self.speed * math.sin(self.yaw))

    def footprint(self) -> Rect:
        return (self.position[0], self.position[1],
                self.size[0], self.size[1], self.yaw)

    def moved(self, dt: float) -> "ObjectState":
        """Constant-velocity extrapolation by dt seconds."""
        vx, vy = self.velocity()
        x, y, z = self.position
        return replace(self, position=(x + vx * dt, y + vy * dt, z),
                       timestamp=self.timestamp + dt)


@dataclass
class DetectionFrame:
    """Timestamped set of object states from one source."""

    timestamp: float
    source_id: str
    objects: list[ObjectState] = field(default_factory=list)
    # fused output records contributing (source, id) pairs per object id
    provenance: dict[str, list[tuple[str, str]]] = field(default_factory=dict)


@dataclass
class SimClock:
    """Fixed-timestep clock; t is derived, never accumulated."""

    dt: float
    step_index: int = 0

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    def advance(self) -> None:
        self.step_index += 1


@dataclass(frozen=True)
class ConflictEvent:
    """A detected interaction risk between two objects at one instant."""

    time: float
    pair: tuple[str, str]
    kind: str  # "ttc_breach" | "overlap_collision"
    ttc: float | None
    min_distance: float
