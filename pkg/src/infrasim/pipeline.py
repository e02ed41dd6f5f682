"""Offline/online data pipeline: log ingestion, trajectory refinement,
fragment stitching, asset size matching, unified export.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .states import DetectionFrame, ObjectState
from .tracking import TrackRecord
from .wire import WireFormatError, frame_from_line, frame_to_line


class StreamOrderError(ValueError):
    """Timestamps within one stream must be strictly increasing."""


class ExportError(ValueError):
    """Frames must be associated (every object carries a track id)."""


@dataclass
class IngestResult:
    frames: list[DetectionFrame] = field(default_factory=list)
    skipped: int = 0
    errors: list[str] = field(default_factory=list)


def ingest_stream(path) -> IngestResult:
    """Read a frame log; malformed lines are reported and skipped.

    Non-monotone timestamps within a source are an error naming both
    timestamps.
    """
    result = IngestResult()
    last_t: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                frame = frame_from_line(line)
            except WireFormatError as exc:
                result.skipped += 1
                result.errors.append(f"line {lineno}: {exc}")
                continue
            prev = last_t.get(frame.source_id)
            if prev is not None and frame.timestamp <= prev:
                raise StreamOrderError(
                    f"line {lineno}: timestamp {frame.timestamp} after {prev} "
                    f"in stream '{frame.source_id}'")
            last_t[frame.source_id] = frame.timestamp
            result.frames.append(frame)
    result.frames.sort(key=lambda f: (f.timestamp, f.source_id))
    return result


def export_unified(frames: list[DetectionFrame], path) -> None:
    """Write associated frames in the wire format; ingest(export(x)) == x."""
    for frame in frames:
        for obj in frame.objects:
            if obj.track_id is None:
                raise ExportError(
                    f"frame t={frame.timestamp}: object without track id")
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(frame_to_line(frame))
            fh.write("\n")


# ---------------------------------------------------------------------------
# trajectory refinement


@dataclass
class RefineParams:
    window: int = 5          # centered median window, odd
    jump_threshold: float = 3.0  # meters
    gap_max: int = 10        # frames bridgeable when stitching
    stitch_gate: float = 2.0  # meters


def _window_median(values: list[float], i: int, half: int) -> float:
    lo = max(0, i - half)
    hi = min(len(values), i + half + 1)
    window = sorted(values[lo:hi])
    n = len(window)
    mid = n // 2
    if n % 2 == 1:
        return window[mid]
    return 0.5 * (window[mid - 1] + window[mid])


def _repair_positions(states: list[ObjectState],
                      params: RefineParams) -> list[ObjectState]:
    half = params.window // 2
    xs = [s.position[0] for s in states]
    ys = [s.position[1] for s in states]
    out = []
    for i, state in enumerate(states):
        mx = _window_median(xs, i, half)
        my = _window_median(ys, i, half)
        if math.hypot(xs[i] - mx, ys[i] - my) > params.jump_threshold:
            out.append(replace(state, position=(mx, my, state.position[2])))
        else:
            out.append(state)
    return out


def _smooth_yaw(states: list[ObjectState],
                params: RefineParams) -> list[ObjectState]:
    if len(states) < 2:
        return states
    # unwrap so the median filter never straddles the +/- pi seam
    unwrapped = [states[0].yaw]
    for state in states[1:]:
        prev = unwrapped[-1]
        delta = math.remainder(state.yaw - prev, 2.0 * math.pi)
        unwrapped.append(prev + delta)
    half = params.window // 2
    return [replace(s, yaw=_window_median(unwrapped, i, half))
            for i, s in enumerate(states)]


def _median_frame_dt(track: TrackRecord) -> float:
    times = [s.timestamp for s in track.states]
    gaps = sorted(b - a for a, b in zip(times, times[1:]) if b > a)
    if not gaps:
        return 0.1
    return gaps[len(gaps) // 2]


def _stitch(tracks: list[TrackRecord], params: RefineParams) -> list[TrackRecord]:
    """Merge same-class fragments a constant-velocity bridge connects."""
    tracks = sorted(tracks, key=lambda t: t.states[0].timestamp)
    merged_into: dict[int, int] = {}
    for j in range(len(tracks)):
        later = tracks[j]
        start = later.states[0]
        for i in range(len(tracks)):
            if i == j or i in merged_into:
                continue
            earlier = tracks[i]
            if earlier.cls != later.cls:
                continue
            end = earlier.states[-1]
            gap = start.timestamp - end.timestamp
            if gap <= 0.0:
                continue
            frame_dt = _median_frame_dt(earlier)
            if gap > params.gap_max * frame_dt + 1e-9:
                continue
            if len(earlier.states) >= 2:
                prev = earlier.states[-2]
                span = end.timestamp - prev.timestamp
                vx = (end.position[0] - prev.position[0]) / span
                vy = (end.position[1] - prev.position[1]) / span
            else:
                vx, vy = end.velocity()
            px = end.position[0] + vx * gap
            py = end.position[1] + vy * gap
            if math.hypot(px - start.position[0],
                          py - start.position[1]) <= params.stitch_gate:
                merged_into[j] = i
                break
    out: list[TrackRecord] = []
    for i, track in enumerate(tracks):
        if i in merged_into:
            continue
        states = list(track.states)
        for j, target in merged_into.items():
            root = target
            while root in merged_into:
                root = merged_into[root]
            if root == i:
                states.extend(tracks[j].states)
        states.sort(key=lambda s: s.timestamp)
        states = [replace(s, track_id=track.track_id) for s in states]
        out.append(replace(track, states=states))
    return out


def refine_trajectories(tracks: list[TrackRecord],
                        params: RefineParams | None = None) -> list[TrackRecord]:
    """Outlier repair, yaw smoothing and fragment stitching, in that order.

    State count is preserved: points are modified or relabeled, never
    invented or dropped. Applying the refinement twice equals applying it
    once on well-formed inputs.
    """
    params = params or RefineParams()
    stitched = _stitch(tracks, params)
    out = []
    for track in stitched:
        states = _repair_positions(track.states, params)
        states = _smooth_yaw(states, params)
        out.append(replace(track, states=states))
    return out


# ---------------------------------------------------------------------------
# asset catalog


class AssetCatalog:
    """Class + name -> (length, width, height) entries for size matching."""

    def __init__(self, entries: dict[str, dict[str, tuple[float, float, float]]]):
        for cls, bucket in entries.items():
            for name, dims in bucket.items():
                if min(dims) <= 0.0:
                    raise ValueError(
                        f"asset {cls}/{name}: dimensions must be > 0")
        self.entries = entries

    @classmethod
    def load(cls, path) -> "AssetCatalog":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls({c: {n: tuple(v) for n, v in bucket.items()}
                    for c, bucket in doc.items()})


def match_asset(size: tuple[float, float, float], catalog: AssetCatalog,
                cls: str) -> str:
    """Closest catalog entry in (l, w, h) space; ties break by name."""
    bucket = catalog.entries.get(cls)
    if not bucket:
        raise ValueError(f"no assets for class '{cls}'")
    best_name = None
    best_d = math.inf
    for name in sorted(bucket):
        dims = bucket[name]
        d = math.dist(size, dims)
        if d < best_d - 1e-12:
            best_d = d
            best_name = name
    return best_name
