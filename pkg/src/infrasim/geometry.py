"""Planar geometry for BEV footprints: oriented rectangles, clipping, rays.

All rectangles are (cx, cy, length, width, yaw) with length along the
heading direction and yaw in radians (x east, y north, CCW positive).
"""

from __future__ import annotations

import math

Point = tuple[float, float]
Rect = tuple[float, float, float, float, float]  # cx, cy, length, width, yaw


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def angle_diff(a: float, b: float) -> float:
    """Absolute angular difference in [0, pi]."""
    return abs(wrap_angle(a - b))


def circular_mean(angles: list[float], weights: list[float] | None = None) -> float:
    if weights is None:
        weights = [1.0] * len(angles)
    sx = sum(w * math.cos(a) for a, w in zip(angles, weights))
    sy = sum(w * math.sin(a) for a, w in zip(angles, weights))
    return math.atan2(sy, sx)


def rect_corners(rect: Rect) -> list[Point]:
    """Counter-clockwise corners of an oriented rectangle."""
    cx, cy, length, width, yaw = rect
    c, s = math.cos(yaw), math.sin(yaw)
    hl, hw = 0.5 * length, 0.5 * width
    out = []
    for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)):
        out.append((cx + dx * c - dy * s, cy + dx * s + dy * c))
    return out


def polygon_area(pts: list[Point]) -> float:
    """Shoelace area (absolute) of a simple polygon."""
    n = len(pts)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * abs(acc)


def clip_polygon(subject: list[Point], clip: list[Point]) -> list[Point]:
    """Sutherland-Hodgman clip of `subject` by convex `clip` (both CCW)."""
    output = list(subject)
    if not output:
        return []
    cx1, cy1 = clip[-1]
    for cx2, cy2 in clip:
        if not output:
            return []
        inputs = output
        output = []
        ex, ey = cx2 - cx1, cy2 - cy1
        sx, sy = inputs[-1]
        s_in = ex * (sy - cy1) - ey * (sx - cx1) >= 0.0
        for px, py in inputs:
            p_in = ex * (py - cy1) - ey * (px - cx1) >= 0.0
            if p_in != s_in:
                # segment crosses the clip edge: append intersection point
                dx, dy = px - sx, py - sy
                denom = ex * dy - ey * dx
                if abs(denom) > 1e-15:
                    t = (ex * (cy1 - sy) - ey * (cx1 - sx)) / denom
                    output.append((sx + t * dx, sy + t * dy))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
        cx1, cy1 = cx2, cy2
    return output


def rect_intersection_area(a: Rect, b: Rect) -> float:
    inter = clip_polygon(rect_corners(a), rect_corners(b))
    return polygon_area(inter)


def oriented_iou(a: Rect, b: Rect) -> float:
    """Exact intersection-over-union of two oriented rectangles."""
    area_a = a[2] * a[3]
    area_b = b[2] * b[3]
    inter = rect_intersection_area(a, b)
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def rects_intersect(a: Rect, b: Rect) -> bool:
    """Separating-axis test; touching boundaries count as intersecting."""
    ca = rect_corners(a)
    cb = rect_corners(b)
    for yaw in (a[4], b[4]):
        for axis in ((math.cos(yaw), math.sin(yaw)),
                     (-math.sin(yaw), math.cos(yaw))):
            pa = [axis[0] * x + axis[1] * y for x, y in ca]
            pb = [axis[0] * x + axis[1] * y for x, y in cb]
            if max(pa) < min(pb) or max(pb) < min(pa):
                return False
    return True


def point_in_rect(p: Point, rect: Rect) -> bool:
    cx, cy, length, width, yaw = rect
    c, s = math.cos(yaw), math.sin(yaw)
    dx, dy = p[0] - cx, p[1] - cy
    lx = dx * c + dy * s
    ly = -dx * s + dy * c
    return abs(lx) <= 0.5 * length and abs(ly) <= 0.5 * width


def segment_rect_entry(p0: Point, p1: Point, rect: Rect) -> float | None:
    """Parameter t in [0, 1] where segment p0->p1 first enters `rect`.

    Returns None when the segment misses the rectangle. Uses slab clipping
    in the rectangle's local frame.
    """
    cx, cy, length, width, yaw = rect
    c, s = math.cos(yaw), math.sin(yaw)

    def local(p: Point) -> Point:
        dx, dy = p[0] - cx, p[1] - cy
        return (dx * c + dy * s, -dx * s + dy * c)

    (x0, y0), (x1, y1) = local(p0), local(p1)
    dx, dy = x1 - x0, y1 - y0
    t_lo, t_hi = 0.0, 1.0
    for start, delta, half in ((x0, dx, 0.5 * length), (y0, dy, 0.5 * width)):
        if abs(delta) < 1e-15:
            if abs(start) > half:
                return None
            continue
        ta = (-half - start) / delta
        tb = (half - start) / delta
        if ta > tb:
            ta, tb = tb, ta
        t_lo = max(t_lo, ta)
        t_hi = min(t_hi, tb)
        if t_lo > t_hi:
            return None
    return t_lo


def polyline_length(pts: list[Point]) -> float:
    return sum(math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


def polyline_point_at(pts: list[Point], arc: float) -> tuple[Point, float]:
    """Point and tangent heading at arc length `arc` along a polyline.

    Clamps to the endpoints outside [0, length].
    """
    if arc <= 0.0:
        hx, hy = pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]
        return pts[0], math.atan2(hy, hx)
    remaining = arc
    for i in range(len(pts) - 1):
        seg = math.dist(pts[i], pts[i + 1])
        if remaining <= seg or i == len(pts) - 2:
            if seg < 1e-12:
                continue
            f = min(remaining / seg, 1.0)
            x = pts[i][0] + f * (pts[i + 1][0] - pts[i][0])
            y = pts[i][1] + f * (pts[i + 1][1] - pts[i][1])
            heading = math.atan2(pts[i + 1][1] - pts[i][1],
                                 pts[i + 1][0] - pts[i][0])
            return (x, y), heading
        remaining -= seg
    hx = pts[-1][0] - pts[-2][0]
    hy = pts[-1][1] - pts[-2][1]
    return pts[-1], math.atan2(hy, hx)


def project_to_polyline(pts: list[Point], p: Point) -> tuple[float, float]:
    """(arc offset, perpendicular distance) of the closest point on a polyline."""
    best_d2 = math.inf
    best_arc = 0.0
    acc = 0.0
    for i in range(len(pts) - 1):
        ax, ay = pts[i]
        bx, by = pts[i + 1]
        vx, vy = bx - ax, by - ay
        seg2 = vx * vx + vy * vy
        if seg2 < 1e-24:
            continue
        t = ((p[0] - ax) * vx + (p[1] - ay) * vy) / seg2
        t = min(1.0, max(0.0, t))
        qx, qy = ax + t * vx, ay + t * vy
        d2 = (p[0] - qx) ** 2 + (p[1] - qy) ** 2
        if d2 < best_d2 - 1e-15:
            best_d2 = d2
            best_arc = acc + t * math.sqrt(seg2)
        acc += math.sqrt(seg2)
    return best_arc, math.sqrt(best_d2)
