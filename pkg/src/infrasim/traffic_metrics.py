"""Traffic-level metrics over a run log: throughput, delay, average speed.

Discrete semantics (uniform frame spacing dt):
- a vehicle *enters* at its first frame inside the region and *exits* at
  the first later frame outside; a crossing is complete at the exit frame;
- waiting time is dt per frame spent inside the region slower than
  ``stop_speed``;
- average speed is the per-frame mean over in-region vehicles, averaged
  over frames that contain at least one;
- the log duration is n_frames * dt, and throughput is crossings per
  minute over that duration.

Only vehicle classes (car, truck, bus) count; pedestrians and cyclists
are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .states import DetectionFrame, VEHICLE_CLASSES
from .world import IntersectionRegion, VectorMap, nearest_lane, point_in_intersection

DEFAULT_STOP_SPEED = 0.5  # m/s; slower counts as waiting


@dataclass
class TrafficMetrics:
    throughput: float            # completed crossings per minute
    delay_avg: float             # mean waiting seconds over entered vehicles
    delay_max: float
    avg_speed: float             # m/s over in-region vehicle states
    crossings: int
    entered: int
    count_series: list[tuple[float, int]] = field(default_factory=list)
    speed_series: list[tuple[float, float]] = field(default_factory=list)
    throughput_series: list[tuple[float, float]] = field(default_factory=list)
    per_group: dict[str, "TrafficMetrics"] = field(default_factory=dict)

    def as_dict(self) -> dict:
        doc = {
            "throughput_per_min": self.throughput,
            "delay_avg_s": self.delay_avg,
            "delay_max_s": self.delay_max,
            "avg_speed_mps": self.avg_speed,
            "crossings": self.crossings,
            "entered": self.entered,
        }
        if self.per_group:
            doc["per_group"] = {k: v.as_dict() for k, v in self.per_group.items()}
        return doc


@dataclass
class _Presence:
    cls: str
    enter_t: float | None = None
    exit_t: float | None = None
    waiting: float = 0.0
    entry_xy: tuple[float, float] | None = None


def _frame_dt(frames: list[DetectionFrame]) -> float:
    if len(frames) < 2:
        return 1.0
    return frames[1].timestamp - frames[0].timestamp


def traffic_metrics(frames: list[DetectionFrame], region: IntersectionRegion,
                    window: float,
                    stop_speed: float = DEFAULT_STOP_SPEED,
                    lane_groups: dict[str, list[str]] | None = None,
                    vector_map: VectorMap | None = None) -> TrafficMetrics:
    """Throughput / delay / average-speed figures for one region.

    ``window`` is the sub-window length for the throughput time series;
    scalar figures cover the whole log. With ``lane_groups`` (name -> lane
    ids) and a map, per-approach figures are attributed by the nearest
    lane at each vehicle's entry point.
    """
    if window <= 0.0:
        raise ValueError("window must be > 0")
    dt = _frame_dt(frames)
    duration = len(frames) * dt

    presence: dict[str, _Presence] = {}
    count_series: list[tuple[float, int]] = []
    speed_series: list[tuple[float, float]] = []
    for frame in frames:
        inside_speeds: list[float] = []
        for obj in frame.objects:
            if obj.cls not in VEHICLE_CLASSES:
                continue
            rec = presence.setdefault(obj.track_id, _Presence(cls=obj.cls))
            inside = point_in_intersection(obj.position, region)
            if inside:
                inside_speeds.append(obj.speed)
                if rec.enter_t is None:
                    rec.enter_t = frame.timestamp
                    rec.entry_xy = obj.xy
                if rec.enter_t is not None and rec.exit_t is None \
                        and obj.speed < stop_speed:
                    rec.waiting += dt
            elif rec.enter_t is not None and rec.exit_t is None:
                rec.exit_t = frame.timestamp
        count_series.append((frame.timestamp, len(inside_speeds)))
        if inside_speeds:
            speed_series.append(
                (frame.timestamp, sum(inside_speeds) / len(inside_speeds)))

    entered = [p for p in presence.values() if p.enter_t is not None]
    crossings = [p for p in entered if p.exit_t is not None]

    throughput = 60.0 * len(crossings) / duration if duration > 0 else 0.0
    delays = [p.waiting for p in entered]
    delay_avg = sum(delays) / len(delays) if delays else 0.0
    delay_max = max(delays) if delays else 0.0
    avg_speed = (sum(v for _, v in speed_series) / len(speed_series)
                 if speed_series else 0.0)

    t0 = frames[0].timestamp if frames else 0.0
    throughput_series: list[tuple[float, float]] = []
    n_windows = max(1, int(duration / window + 1e-9))
    for w in range(n_windows):
        lo = t0 + w * window
        hi = lo + window
        n = sum(1 for p in crossings if lo <= p.exit_t < hi)
        throughput_series.append((lo, 60.0 * n / window))

    metrics = TrafficMetrics(
        throughput=throughput, delay_avg=delay_avg, delay_max=delay_max,
        avg_speed=avg_speed, crossings=len(crossings), entered=len(entered),
        count_series=count_series, speed_series=speed_series,
        throughput_series=throughput_series)

    if lane_groups and vector_map is not None:
        lane_to_group = {lane: name for name, lanes in lane_groups.items()
                         for lane in lanes}
        group_ids: dict[str, set[str]] = {name: set() for name in lane_groups}
        for tid, rec in presence.items():
            if rec.entry_xy is None:
                continue
            lane_id, _, _ = nearest_lane(vector_map, rec.entry_xy)
            group = lane_to_group.get(lane_id)
            if group is not None:
                group_ids[group].add(tid)
        for name, ids in sorted(group_ids.items()):
            sub = [
                DetectionFrame(f.timestamp, f.source_id,
                               [o for o in f.objects if o.track_id in ids])
                for f in frames
            ]
            metrics.per_group[name] = traffic_metrics(
                sub, region, window, stop_speed)
    return metrics
