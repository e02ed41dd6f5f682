import itertools
import math
import random

import pytest

from infrasim.planning import (
    NaturalCubicSpline,
    NoPathError,
    PIDGains,
    PIDState,
    pid_speed_control,
    plan_route,
    smooth_path,
)
from infrasim.world import WaypointGraph


def make_graph(nodes, edges):
    g = WaypointGraph()
    g.nodes.update(nodes)
    for a, b, w in edges:
        g.add_edge(a, b, w)
    return g


def brute_force_shortest(g, start, goal):
    """Exhaustive simple-path enumeration (oracle for small graphs)."""
    best = None

    def walk(node, cost, seen):
        nonlocal best
        if node == goal:
            if best is None or cost < best:
                best = cost
            return
        for nbr, w in g.neighbors(node):
            if nbr not in seen:
                walk(nbr, cost + w, seen | {nbr})

    walk(start, 0.0, {start})
    return best


class TestAStar:
    def test_start_equals_goal(self):
        g = make_graph({"a": (0, 0)}, [])
        path, cost = plan_route(g, "a", "a")
        assert path == ["a"]
        assert cost == 0.0

    def test_diamond(self):
        g = make_graph(
            {"a": (0, 0), "b": (1, 0), "c": (1, -1), "d": (2, 0)},
            [("a", "b", 1.0), ("b", "d", 1.0), ("a", "c", 1.0), ("c", "d", 2.0)])
        path, cost = plan_route(g, "a", "d")
        assert path == ["a", "b", "d"]
        assert cost == 2.0

    def test_unreachable(self):
        g = make_graph({"a": (0, 0), "b": (5, 0)}, [])
        with pytest.raises(NoPathError):
            plan_route(g, "a", "b")

    def test_matches_brute_force_on_random_graphs(self):
        rng = random.Random(21)
        for _ in range(40):
            n = rng.randint(4, 9)
            names = [f"n{i}" for i in range(n)]
            nodes = {name: (rng.uniform(0, 10), rng.uniform(0, 10))
                     for name in names}
            edges = []
            for a, b in itertools.permutations(names, 2):
                if rng.random() < 0.35:
                    w = math.dist(nodes[a], nodes[b]) * rng.uniform(1.0, 1.5)
                    edges.append((a, b, w))
            g = make_graph(nodes, edges)
            expected = brute_force_shortest(g, names[0], names[-1])
            if expected is None:
                with pytest.raises(NoPathError):
                    plan_route(g, names[0], names[-1])
            else:
                _, cost = plan_route(g, names[0], names[-1])
                assert abs(cost - expected) < 1e-9


class TestSpline:
    def test_interpolates_knots(self):
        s = NaturalCubicSpline([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        assert abs(s(1.0) - 1.0) < 1e-12

    def test_hand_solved_midpoint(self):
        # tridiagonal solve by hand: M1 = -3, S(0.5) = 1.5*0.5 - 0.5*0.125
        s = NaturalCubicSpline([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        assert abs(s(0.5) - 0.6875) < 1e-12

    def test_natural_boundary_conditions(self):
        rng = random.Random(2)
        knots = sorted(rng.uniform(0, 10) for _ in range(6))
        values = [rng.uniform(-5, 5) for _ in range(6)]
        s = NaturalCubicSpline(knots, values)
        assert abs(s.derivative(knots[0], order=2)) < 1e-9
        assert abs(s.derivative(knots[-1], order=2)) < 1e-9

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            NaturalCubicSpline([0.0, 1.0], [0.0, 1.0])

    def test_repeated_parameter(self):
        with pytest.raises(ValueError):
            NaturalCubicSpline([0.0, 1.0, 1.0], [0.0, 1.0, 2.0])

    def test_collinear_points_stay_on_line(self):
        pts = [(0.0, 0.0), (1.0, 1.0), (2.5, 2.5), (4.0, 4.0)]
        path = smooth_path(pts)
        for f in (0.0, 0.21, 0.5, 0.77, 1.0):
            x, y = path.point(f * path.length)
            assert abs(y - x) < 1e-9

    def test_path_spline_hits_waypoints(self):
        pts = [(0.0, 0.0), (5.0, 2.0), (10.0, -1.0)]
        path = smooth_path(pts)
        s = math.dist(pts[0], pts[1])
        x, y = path.point(s)
        assert abs(x - 5.0) < 1e-9
        assert abs(y - 2.0) < 1e-9


class TestPID:
    def test_proportional_only(self):
        u = pid_speed_control(10.0, 8.0, PIDState(), PIDGains(kp=1.0), dt=0.1)
        assert abs(u - 2.0) < 1e-12

    def test_zero_error_zero_output(self):
        u = pid_speed_control(5.0, 5.0, PIDState(), PIDGains(kp=1.0, ki=0.5),
                              dt=0.1)
        assert u == 0.0

    def test_output_saturates(self):
        gains = PIDGains(kp=1.0, output_limit=3.0)
        u = pid_speed_control(10.0, 0.0, PIDState(), gains, dt=0.1)
        assert u == 3.0

    def test_integral_clamped(self):
        gains = PIDGains(kp=0.0, ki=1.0, integral_limit=2.0, output_limit=100.0)
        state = PIDState()
        for _ in range(100):
            u = pid_speed_control(10.0, 0.0, state, gains, dt=1.0)
        assert state.integral == 2.0
        assert u == 2.0
