"""Route planning and control primitives: A*, natural cubic splines, PID."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .world import WaypointGraph


class NoPathError(ValueError):
    """Goal unreachable from start in the waypoint graph."""


def plan_route(g: WaypointGraph, start: str, goal: str) -> tuple[list[str], float]:
    """Minimum-weight path via A* with the Euclidean heuristic.

    Equal-cost frontier entries pop in lexicographic node-id order, so the
    result is deterministic.
    """
    if start not in g.nodes:
        raise NoPathError(f"unknown start node '{start}'")
    if goal not in g.nodes:
        raise NoPathError(f"unknown goal node '{goal}'")
    gx, gy = g.nodes[goal]

    def h(node: str) -> float:
        x, y = g.nodes[node]
        return math.hypot(x - gx, y - gy)

    dist: dict[str, float] = {start: 0.0}
    parent: dict[str, str] = {}
    heap: list[tuple[float, str]] = [(h(start), start)]
    done: set[str] = set()
    while heap:
        f, node = heapq.heappop(heap)
        if node in done:
            continue
        if node == goal:
            path = [node]
            while node in parent:
                node = parent[node]
                path.append(node)
            path.reverse()
            return path, dist[goal]
        done.add(node)
        base = dist[node]
        for nbr, w in g.neighbors(node):
            if nbr in done:
                continue
            cand = base + w
            old = dist.get(nbr)
            if old is None or cand < old - 1e-12 or (
                    abs(cand - old) <= 1e-12 and node < parent.get(nbr, node)):
                dist[nbr] = cand
                parent[nbr] = node
                heapq.heappush(heap, (cand + h(nbr), nbr))
    raise NoPathError(f"no path from '{start}' to '{goal}'")


class NaturalCubicSpline:
    """Interpolating cubic spline with zero second derivative at both ends."""

    def __init__(self, knots, values):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.size < 3:
            raise ValueError("need at least 3 knots")
        if np.any(np.diff(knots) <= 0.0):
            raise ValueError("knots must be strictly increasing")
        self._spline = CubicSpline(knots, values, bc_type="natural")
        self.knots = knots

    def __call__(self, t):
        return float(self._spline(t))

    def derivative(self, t, order: int = 1) -> float:
        return float(self._spline(t, nu=order))


class PathSpline:
    """2D path smoothed by per-coordinate natural splines over chord length."""

    def __init__(self, points: list[tuple[float, float]]):
        if len(points) < 3:
            raise ValueError("need at least 3 points")
        s = [0.0]
        for a, b in zip(points, points[1:]):
            step = math.dist(a, b)
            if step < 1e-12:
                raise ValueError("consecutive points must be distinct")
            s.append(s[-1] + step)
        self.length = s[-1]
        self._sx = NaturalCubicSpline(s, [p[0] for p in points])
        self._sy = NaturalCubicSpline(s, [p[1] for p in points])

    def point(self, s: float) -> tuple[float, float]:
        return (self._sx(s), self._sy(s))

    def heading(self, s: float) -> float:
        return math.atan2(self._sy.derivative(s), self._sx.derivative(s))


def smooth_path(points: list[tuple[float, float]]) -> PathSpline:
    """Natural cubic spline through the points, parameterized by chord length."""
    return PathSpline(points)


@dataclass
class PIDGains:
    kp: float = 1.0
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = 5.0
    output_limit: float = 3.0  # |acceleration| bound, m/s^2


@dataclass
class PIDState:
    integral: float = 0.0
    prev_error: float | None = None


def pid_speed_control(target: float, current: float, state: PIDState,
                      gains: PIDGains, dt: float) -> float:
    """Acceleration command tracking a speed target (anti-windup, clamped)."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    error = target - current
    state.integral += error * dt
    state.integral = max(-gains.integral_limit,
                         min(gains.integral_limit, state.integral))
    derivative = 0.0
    if state.prev_error is not None:
        derivative = (error - state.prev_error) / dt
    state.prev_error = error
    u = gains.kp * error + gains.ki * state.integral + gains.kd * derivative
    return max(-gains.output_limit, min(gains.output_limit, u))


@dataclass
class SpeedController:
    """Stateful PID wrapper used by the ego stack."""

    gains: PIDGains = field(default_factory=PIDGains)
    state: PIDState = field(default_factory=PIDState)

    def step(self, target: float, current: float, dt: float) -> float:
        return pid_speed_control(target, current, self.state, self.gains, dt)

    def reset(self) -> None:
        self.state = PIDState()
