"""Conflict and collision detection over object frames.

Current-frame overlaps come from exact rectangle intersection. Future
contact uses constant-velocity extrapolation sampled at dt resolution, so
a reported TTC overestimates the true first-contact time by at most one
dt. A quadratic circumradius bound prunes pairs (and sample windows) that
can never touch within the horizon.
"""

from __future__ import annotations

import math

from .geometry import rect_intersection_area, rects_intersect
from .states import ConflictEvent, ObjectState

DEFAULT_SAMPLE_DT = 0.05
OVERLAP_AREA_EPS = 1e-9


def _contact_window(ax: float, ay: float, avx: float, avy: float,
                    bx: float, by: float, bvx: float, bvy: float,
                    radius: float, horizon: float) -> tuple[float, float] | None:
    """Time window within [0, horizon] where center distance can be <= radius."""
    px, py = bx - ax, by - ay
    vx, vy = bvx - avx, bvy - avy
    c = px * px + py * py - radius * radius
    a = vx * vx + vy * vy
    b = 2.0 * (px * vx + py * vy)
    if a < 1e-12:
        return (0.0, horizon) if c <= 0.0 else None
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    t0 = (-b - root) / (2.0 * a)
    t1 = (-b + root) / (2.0 * a)
    lo, hi = max(t0, 0.0), min(t1, horizon)
    if lo > hi:
        return None
    return lo, hi


def detect_conflicts(frame: list[ObjectState], horizon: float,
                     dt: float = DEFAULT_SAMPLE_DT) -> list[ConflictEvent]:
    """Overlap collisions now plus TTC breaches within the horizon.

    Symmetric in pair order: objects are processed sorted by track id and
    the event pair is always (smaller id, larger id).
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be > 0")
    objs = sorted(frame, key=lambda o: o.track_id)
    events: list[ConflictEvent] = []
    for i in range(len(objs)):
        a = objs[i]
        ar = 0.5 * math.hypot(a.size[0], a.size[1])
        avx, avy = a.velocity()
        for j in range(i + 1, len(objs)):
            b = objs[j]
            br = 0.5 * math.hypot(b.size[0], b.size[1])
            bvx, bvy = b.velocity()
            center_dist = math.dist(a.xy, b.xy)

            if (center_dist <= ar + br
                    and rect_intersection_area(a.footprint(), b.footprint())
                    > OVERLAP_AREA_EPS):
                events.append(ConflictEvent(
                    time=a.timestamp, pair=(a.track_id, b.track_id),
                    kind="overlap_collision", ttc=None,
                    min_distance=center_dist))
                continue

            window = _contact_window(a.xy[0], a.xy[1], avx, avy,
                                     b.xy[0], b.xy[1], bvx, bvy,
                                     ar + br, horizon)
            if window is None:
                continue
            lo, hi = window
            k = max(1, math.ceil(lo / dt - 1e-9))
            min_dist = center_dist
            ttc = None
            while k * dt <= hi + 1e-9:
                tau = k * dt
                axp, ayp = a.xy[0] + avx * tau, a.xy[1] + avy * tau
                bxp, byp = b.xy[0] + bvx * tau, b.xy[1] + bvy * tau
                min_dist = min(min_dist, math.hypot(bxp - axp, byp - ayp))
                fa = (axp, ayp, a.size[0], a.size[1], a.yaw)
                fb = (bxp, byp, b.size[0], b.size[1], b.yaw)
                if rects_intersect(fa, fb):
                    ttc = tau
                    break
                k += 1
            if ttc is not None:
                events.append(ConflictEvent(
                    time=a.timestamp, pair=(a.track_id, b.track_id),
                    kind="ttc_breach", ttc=ttc, min_distance=min_dist))
    return events


class ConflictLogger:
    """Per-run episode deduplication of conflict events.

    A (pair, kind) episode is recorded once when it begins and re-arms
    after a step with no event for that pair and kind, so a sustained
    breach does not spam one row per step.
    """

    def __init__(self):
        self.events: list[ConflictEvent] = []
        self._active: set[tuple[str, str, str]] = set()

    def record_step(self, step_events: list[ConflictEvent]) -> None:
        now: set[tuple[str, str, str]] = set()
        for ev in step_events:
            key = (ev.pair[0], ev.pair[1], ev.kind)
            now.add(key)
            if key not in self._active:
                self.events.append(ev)
        self._active = now
