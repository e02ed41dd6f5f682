"""Scalability profiling: tile a base scenario to N intersections and
measure kernel stepping rate and a live-object memory proxy.

Wall-clock figures naturally vary between runs; everything else in a
record is deterministic for a fixed (config, seed).
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field, replace as dc_replace

from .engine import Engine
from .scenario import ScenarioConfig
from .world import IntersectionRegion, Lane, TrafficSignal, VectorMap, load_map

TILE_SPACING = 250.0  # meters between tiled intersection centers


@dataclass
class ScalabilityRecord:
    intersections: int
    steps_per_second: float
    peak_objects: int
    step_time_p50: float
    step_time_p95: float
    steps: int
    step_times: list[float] = field(default_factory=list, repr=False)


def tile_map(m: VectorMap, count: int,
             spacing: float = TILE_SPACING) -> VectorMap:
    """`count` offset copies of a single-site map along the x axis."""
    if count < 1:
        raise ValueError("count must be >= 1")
    lanes: list[Lane] = []
    regions: list[IntersectionRegion] = []
    signals: list[TrafficSignal] = []
    for k in range(count):
        dx = k * spacing
        suffix = f"@{k}"
        for lane in m.lanes:
            lanes.append(Lane(
                id=lane.id + suffix,
                centerline=tuple((x + dx, y) for x, y in lane.centerline),
                width=lane.width,
                successors=tuple(s + suffix for s in lane.successors),
                speed_limit=lane.speed_limit))
        for region in m.intersections:
            regions.append(IntersectionRegion(
                id=region.id + suffix,
                center=(region.center[0] + dx, region.center[1]),
                d_f=region.d_f, z_c=region.z_c, ground=region.ground,
                height_band=region.height_band))
        for sig in m.signals:
            signals.append(TrafficSignal(
                id=sig.id + suffix,
                intersection_id=sig.intersection_id + suffix,
                phase_durations=sig.phase_durations,
                controlled_lane_ids=tuple(l + suffix
                                          for l in sig.controlled_lane_ids)))
    return VectorMap(lanes=tuple(lanes), intersections=tuple(regions),
                     signals=tuple(signals), ground_z=m.ground_z)


def profile_scalability(base_cfg: ScenarioConfig,
                        counts: list[int]) -> list[ScalabilityRecord]:
    """Run the base scenario tiled to each intersection count.

    Per-approach traffic is kept constant, so total traffic scales with
    the count. Counts must be ascending.
    """
    if not counts:
        raise ValueError("counts must be non-empty")
    if list(counts) != sorted(counts):
        raise ValueError("counts must be ascending")
    base_map = load_map(base_cfg.map_path)
    records: list[ScalabilityRecord] = []
    for count in counts:
        tiled = tile_map(base_map, count)
        cfg = dc_replace(base_cfg, ego=None, injections=[], perception=None,
                         replay_path=None)
        cfg.background = dc_replace(base_cfg.background, lanes=None)
        engine = Engine(cfg, vector_map=tiled)
        step_times: list[float] = []
        while engine.clock.step_index < engine.n_steps:
            t0 = time.perf_counter()
            engine.step()
            step_times.append(time.perf_counter() - t0)
        total = sum(step_times)
        quantiles = statistics.quantiles(step_times, n=20) \
            if len(step_times) >= 2 else [step_times[0]] * 19
        records.append(ScalabilityRecord(
            intersections=count,
            steps_per_second=len(step_times) / total if total > 0 else math.inf,
            peak_objects=engine.result.peak_objects,
            step_time_p50=statistics.median(step_times),
            step_time_p95=quantiles[18],
            steps=len(step_times),
            step_times=step_times))
    return records


def scalability_csv_rows(records: list[ScalabilityRecord]) -> list[list[str]]:
    """Rows with per-row percentage deltas relative to the previous row."""
    rows = [["intersections", "steps_per_second", "delta_pct", "peak_objects"]]
    prev: float | None = None
    for rec in records:
        if prev is None or prev == 0.0:
            delta = ""
        else:
            delta = f"{100.0 * (rec.steps_per_second - prev) / prev:+.1f}%"
        rows.append([str(rec.intersections), f"{rec.steps_per_second:.2f}",
                     delta, str(rec.peak_objects)])
        prev = rec.steps_per_second
    return rows
