"""Simulated perception and cooperative late fusion.

Per-agent detections are ground truth filtered by sensor visibility and
perturbed by a configurable noise model; messages travel over a lossy,
delayed channel; late fusion clusters boxes across sources and collapses
each cluster to a confidence-weighted consensus.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .geometry import circular_mean, wrap_angle
from .infrastructure import SensorSpec, sensor_visibility
from .states import DetectionFrame, ObjectState
from .tracking import solve_assignment

import numpy as np

DEFAULT_FUSE_GATE = 2.0
DEFAULT_STALENESS = 0.5  # seconds; ten frames at dt = 0.05


@dataclass(frozen=True)
class NoiseModel:
    pos_sigma: float = 0.0
    yaw_sigma: float = 0.0
    size_sigma: float = 0.0
    miss_rate: float = 0.0
    false_positive_rate: float = 0.0  # expected count per frame
    conf_floor: float = 0.05

    def confidence(self, dist: float, sensor_range: float) -> float:
        """Decreasing in distance, clipped to [conf_floor, 1]."""
        return max(self.conf_floor, min(1.0, 1.0 - dist / sensor_range))


@dataclass(frozen=True)
class ChannelModel:
    base_latency: float = 0.0
    jitter: float = 0.0       # uniform extra delay in [0, jitter]
    drop_rate: float = 0.0
    range_limit: float | None = None


@dataclass(frozen=True)
class V2XMessage:
    sender: str
    send_time: float
    payload: DetectionFrame
    mode: str = "I2I"  # V2V | V2I | I2V | I2I


def _nearest_sensor_dist(sensors: list[SensorSpec], xy) -> tuple[float, float]:
    best = math.inf
    rng_of_best = 1.0
    for s in sensors:
        d = math.hypot(xy[0] - s.position[0], xy[1] - s.position[1])
        if d < best:
            best = d
            rng_of_best = s.range_max
    return best, rng_of_best


def simulate_detections(sensors: list[SensorSpec], truth: DetectionFrame,
                        noise: NoiseModel, rng: random.Random,
                        source_id: str) -> DetectionFrame:
    """Noisy detections of the ground-truth objects visible to any sensor."""
    visible: list[str] = []
    for sensor in sensors:
        for oid in sensor_visibility(sensor, truth.objects):
            if oid not in visible:
                visible.append(oid)
    out: list[ObjectState] = []
    for obj in truth.objects:
        if obj.track_id not in visible:
            continue
        if rng.random() < noise.miss_rate:
            continue
        x = obj.position[0] + rng.gauss(0.0, noise.pos_sigma)
        y = obj.position[1] + rng.gauss(0.0, noise.pos_sigma)
        yaw = wrap_angle(obj.yaw + rng.gauss(0.0, noise.yaw_sigma))
        size = tuple(max(0.1, dim + rng.gauss(0.0, noise.size_sigma))
                     for dim in obj.size)
        dist, sensor_range = _nearest_sensor_dist(sensors, obj.xy)
        out.append(replace(
            obj, position=(x, y, obj.position[2]), yaw=yaw, size=size,
            conf=noise.confidence(dist, sensor_range)))
    n_fp = _poisson(noise.false_positive_rate, rng)
    for k in range(n_fp):
        sensor = sensors[rng.randrange(len(sensors))] if sensors else None
        if sensor is None:
            break
        r = sensor.range_max * math.sqrt(rng.random())
        half = 0.5 * sensor.fov_rad
        theta = sensor.yaw + rng.uniform(-half, half)
        x = sensor.position[0] + r * math.cos(theta)
        y = sensor.position[1] + r * math.sin(theta)
        out.append(ObjectState(
            track_id=f"{source_id}/fp{k}", cls="car",
            position=(x, y, 0.0), yaw=rng.uniform(-math.pi, math.pi),
            size=(4.5, 1.8, 1.5), speed=0.0, timestamp=truth.timestamp,
            conf=rng.uniform(noise.conf_floor, 0.5)))
    return DetectionFrame(timestamp=truth.timestamp, source_id=source_id,
                          objects=out)


def _poisson(lam: float, rng: random.Random) -> int:
    """Knuth sampling; fine for the small per-frame rates used here."""
    if lam <= 0.0:
        return 0
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def transmit(msg: V2XMessage, channel: ChannelModel, rng: random.Random,
             distance: float | None = None) -> float | None:
    """Delivery time, or None when the message is dropped."""
    if (channel.range_limit is not None and distance is not None
            and distance > channel.range_limit):
        return None
    if channel.drop_rate > 0.0 and rng.random() < channel.drop_rate:
        return None
    delay = channel.base_latency
    if channel.jitter > 0.0:
        delay += rng.uniform(0.0, channel.jitter)
    return msg.send_time + delay


def no_fusion(local: DetectionFrame) -> DetectionFrame:
    """Identity; the no-cooperation baseline shares the evaluation path."""
    return local


@dataclass
class _Cluster:
    cls: str
    members: list[tuple[str, ObjectState]] = field(default_factory=list)
    local_id: str | None = None

    def center(self) -> tuple[float, float]:
        w = sum(m.conf for _, m in self.members)
        x = sum(m.conf * m.position[0] for _, m in self.members) / w
        y = sum(m.conf * m.position[1] for _, m in self.members) / w
        return (x, y)

    def collapse(self, track_id: str, timestamp: float) -> ObjectState:
        if len(self.members) == 1:
            only = self.members[0][1]
            return replace(only, track_id=track_id, timestamp=timestamp)
        objs = [m for _, m in self.members]
        w = [o.conf for o in objs]
        total = sum(w)
        x = sum(wi * o.position[0] for wi, o in zip(w, objs)) / total
        y = sum(wi * o.position[1] for wi, o in zip(w, objs)) / total
        z = sum(wi * o.position[2] for wi, o in zip(w, objs)) / total
        size = tuple(
            sum(wi * o.size[k] for wi, o in zip(w, objs)) / total
            for k in range(3))
        yaw = circular_mean([o.yaw for o in objs], w)
        speed = sum(wi * o.speed for wi, o in zip(w, objs)) / total
        conf = 1.0
        for o in objs:
            conf *= 1.0 - o.conf
        conf = 1.0 - conf
        return ObjectState(track_id=track_id, cls=self.cls,
                           position=(x, y, z), yaw=yaw, size=size,
                           speed=speed, timestamp=timestamp, conf=conf)


def _align_to(frame: DetectionFrame, t: float) -> list[ObjectState]:
    """Constant-velocity extrapolation of every object to time t."""
    age = t - frame.timestamp
    return [o.moved(age) for o in frame.objects]


def late_fuse(local: DetectionFrame, received: list[DetectionFrame],
              fuse_gate: float = DEFAULT_FUSE_GATE,
              staleness: float = DEFAULT_STALENESS) -> DetectionFrame:
    """Cross-source late fusion against the local frame.

    Received payloads older than the staleness bound are discarded; the
    rest are time-aligned by constant-velocity extrapolation. Same-class
    boxes within the gate cluster greedily (minimum-cost assignment per
    source against the running fused set) and collapse to a
    confidence-weighted consensus box. Output ids live in the local
    namespace; provenance lists the contributing (source, id) pairs.
    """
    t = local.timestamp
    clusters: list[_Cluster] = []
    for obj in local.objects:
        clusters.append(_Cluster(cls=obj.cls,
                                 members=[(local.source_id, obj)],
                                 local_id=obj.track_id))

    usable = [f for f in received if 0.0 <= t - f.timestamp <= staleness]
    for frame in sorted(usable, key=lambda f: f.source_id):
        aligned = _align_to(frame, t)
        if not aligned:
            continue
        if clusters:
            cost = np.zeros((len(aligned), len(clusters)))
            for i, obj in enumerate(aligned):
                for j, cluster in enumerate(clusters):
                    if obj.cls != cluster.cls:
                        cost[i, j] = 1e9
                    else:
                        cx, cy = cluster.center()
                        cost[i, j] = math.hypot(obj.position[0] - cx,
                                                obj.position[1] - cy)
            pairs = solve_assignment(cost, gate=fuse_gate)
        else:
            pairs = []
        matched = {i for i, _ in pairs}
        for i, j in pairs:
            clusters[j].members.append((frame.source_id, aligned[i]))
        for i, obj in enumerate(aligned):
            if i not in matched:
                clusters.append(_Cluster(cls=obj.cls,
                                         members=[(frame.source_id, obj)]))

    clusters = _merge_close_clusters(clusters, fuse_gate)

    objects: list[ObjectState] = []
    provenance: dict[str, list[tuple[str, str]]] = {}
    next_aux = 0
    for cluster in clusters:
        if cluster.local_id is not None:
            oid = cluster.local_id
        else:
            oid = f"{local.source_id}/fused{next_aux:03d}"
            next_aux += 1
        objects.append(cluster.collapse(oid, t))
        provenance[oid] = [(src, m.track_id) for src, m in cluster.members]
    objects.sort(key=lambda o: o.track_id)
    return DetectionFrame(timestamp=t, source_id=local.source_id,
                          objects=objects, provenance=provenance)


def _merge_close_clusters(clusters: list[_Cluster],
                          fuse_gate: float) -> list[_Cluster]:
    """Collapse same-class clusters that ended up closer than the gate."""
    merged = True
    while merged:
        merged = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                a, b = clusters[i], clusters[j]
                if a.cls != b.cls:
                    continue
                if math.dist(a.center(), b.center()) < fuse_gate:
                    a.members.extend(b.members)
                    if a.local_id is None:
                        a.local_id = b.local_id
                    del clusters[j]
                    merged = True
                    break
            if merged:
                break
    return clusters
