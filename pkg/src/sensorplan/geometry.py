"""Planar primitives used by the planners.

Points are plain ``Point(x, y)`` named tuples so they hash, compare and
unpack like ordinary coordinate pairs. Every tolerance comparison goes
through :data:`EPS`.
"""
from __future__ import annotations

import math
from itertools import combinations
from typing import Callable, Hashable, Iterable, NamedTuple, Sequence

import numpy as np

EPS = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point
    radius: float


class GeometryError(ValueError):
    pass


class DegeneratePairError(GeometryError):
    """Two circles share a center, so their intersection is not a point set."""


class DegenerateTripleError(GeometryError):
    """A triple contains repeated points."""


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def circle_pair_intersections(c1: Circle, c2: Circle) -> list[Point]:
    """Intersection points of two equal-radius circles, sorted by (x, y).

    Returns one point at tangency (within EPS) and an empty list when the
    circles are disjoint.
    """
    if abs(c1.radius - c2.radius) > EPS:
        raise GeometryError("only equal radii are supported")
    if c1.radius <= 0:
        raise GeometryError("radius must be positive")
    r = c1.radius
    (x1, y1), (x2, y2) = c1.center, c2.center
    d = math.hypot(x2 - x1, y2 - y1)
    if d <= EPS:
        raise DegeneratePairError(f"coincident centers at {c1.center}")
    if d > 2 * r + EPS:
        return []
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    if abs(d - 2 * r) <= EPS:
        return [Point(mx, my)]
    h = math.sqrt(r * r - (d / 2) ** 2)
    ux, uy = -(y2 - y1) / d, (x2 - x1) / d
    pts = [Point(mx + h * ux, my + h * uy), Point(mx - h * ux, my - h * uy)]
    return sorted(pts)


def covered_targets(
    p: Sequence[float], targets: Iterable[tuple[Sequence[float], Hashable]], rs: float
) -> frozenset:
    """Ids of the targets within ``rs`` (inclusive, EPS-tolerant) of ``p``."""
    return frozenset(tid for pos, tid in targets if distance(p, pos) <= rs + EPS)


def _angle_cos(vertex, a, b) -> float:
    ax, ay = a[0] - vertex[0], a[1] - vertex[1]
    bx, by = b[0] - vertex[0], b[1] - vertex[1]
    return (ax * bx + ay * by) / (math.hypot(ax, ay) * math.hypot(bx, by))


def _line_intersection(p1, p2, q1, q2) -> Point:
    # p1 + s (p2 - p1) == q1 + u (q2 - q1)
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    den = rx * sy - ry * sx
    s = ((q1[0] - p1[0]) * sy - (q1[1] - p1[1]) * sx) / den
    return Point(p1[0] + s * rx, p1[1] + s * ry)


def _outer_apex(a, b, opposite) -> Point:
    """Apex of the equilateral triangle on segment ab, away from ``opposite``."""
    mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    dx, dy = b[0] - a[0], b[1] - a[1]
    k = math.sqrt(3) / 2
    c1 = Point(mx - k * dy, my + k * dx)
    c2 = Point(mx + k * dy, my - k * dx)
    return c1 if distance(c1, opposite) > distance(c2, opposite) else c2


def fermat_point(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> Point:
    """Point minimizing the summed distance to three vertices.

    A vertex whose interior angle is at least 120 degrees is the answer
    itself; collinear triples therefore return the middle vertex.
    Otherwise the classical construction is used: lines from two
    outward equilateral apexes to the opposite vertices meet at the point.
    """
    a, b, c = Point(*a), Point(*b), Point(*c)
    for u, v in ((a, b), (b, c), (a, c)):
        if distance(u, v) <= EPS:
            raise DegenerateTripleError(f"repeated point {u}")
    for vertex, p, q in ((a, b, c), (b, a, c), (c, a, b)):
        if _angle_cos(vertex, p, q) <= -0.5 + 1e-12:
            return vertex
    apex_bc = _outer_apex(b, c, a)
    apex_ca = _outer_apex(c, a, b)
    f = _line_intersection(a, apex_bc, b, apex_ca)
    # a few Weiszfeld steps polish the construction's rounding error
    for _ in range(3):
        ws = [1.0 / max(distance(f, v), 1e-300) for v in (a, b, c)]
        tot = sum(ws)
        f = Point(
            sum(w * v.x for w, v in zip(ws, (a, b, c))) / tot,
            sum(w * v.y for w, v in zip(ws, (a, b, c))) / tot,
        )
    return f


def delaunay_index_triples(points: Sequence[Sequence[float]]) -> list[tuple[int, int, int]]:
    """Index triples whose circumcircle has no other point strictly inside.

    Collinear triples are skipped. Cocircular ties keep every candidate
    triangle, so a cocircular quad yields both of its triangulations.
    """
    n = len(points)
    if n < 3:
        return []
    pts = np.asarray(points, dtype=float)
    tri = np.array(list(combinations(range(n), 3)), dtype=int)
    A, B, C = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    bx, by = B[:, 0] - A[:, 0], B[:, 1] - A[:, 1]
    cx, cy = C[:, 0] - A[:, 0], C[:, 1] - A[:, 1]
    d = 2.0 * (bx * cy - by * cx)
    ok = np.abs(d) > EPS
    tri, A, bx, by, cx, cy, d = tri[ok], A[ok], bx[ok], by[ok], cx[ok], cy[ok], d[ok]
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ox = (cy * b2 - by * c2) / d
    oy = (bx * c2 - cx * b2) / d
    centers = A + np.stack([ox, oy], axis=1)
    radius = np.hypot(ox, oy)
    dist = np.hypot(
        pts[None, :, 0] - centers[:, None, 0], pts[None, :, 1] - centers[:, None, 1]
    )
    inside = dist < radius[:, None] - EPS
    rows = np.arange(len(tri))
    for k in range(3):
        inside[rows, tri[:, k]] = False
    empty = ~inside.any(axis=1)
    return [tuple(int(i) for i in t) for t in tri[empty]]


def voronoi_neighbor_triples(points: Sequence[Sequence[float]]) -> list[tuple[Point, Point, Point]]:
    """Triples of mutually Voronoi-adjacent points (Delaunay triangles)."""
    pts = [Point(*p) for p in points]
    return [(pts[i], pts[j], pts[k]) for i, j, k in delaunay_index_triples(pts)]


StopRule = Callable[[Point], bool]


def chain_points(
    start: Sequence[float], end: Sequence[float], rt: float, stop: StopRule | None = None
) -> list[Point]:
    """Points every ``rt`` along start->end, excluding ``start``.

    The step that would pass ``end`` is clamped onto it. ``stop`` is
    checked after each emitted point; ``None`` means "stop at the
    destination". An infinite ``rt`` yields the destination alone.
    """
    start, end = Point(*start), Point(*end)
    d = distance(start, end)
    if d <= EPS:
        return []
    out: list[Point] = []
    k = 1
    while True:
        s = k * rt
        if s >= d - EPS:
            out.append(end)
            return out
        t = s / d
        p = Point(start.x + t * (end.x - start.x), start.y + t * (end.y - start.y))
        out.append(p)
        if stop is not None and stop(p):
            return out
        k += 1
