"""Sensor-to-point assignment with the Hungarian method."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .geometry import Point


class InvalidMatrixError(ValueError):
    pass


class BudgetError(ValueError):
    pass


class ColumnKind(str, Enum):
    INTERSECTION = "intersection"
    TARGET_LOCATION = "target-location"
    POTENTIAL = "potential"
    DUMMY = "dummy"


@dataclass
class CostMatrix:
    entries: np.ndarray
    kinds: list[ColumnKind]
    points: list[Point | None]

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def hungarian(costs) -> tuple[list[int], float]:
    """Minimum-cost perfect assignment of a square matrix.

    Returns ``(cols, total)`` with ``cols[row]`` the column given to each
    row. Shortest augmenting paths with row/column potentials, O(n^3).
    """
    c = np.asarray(costs.entries if isinstance(costs, CostMatrix) else costs, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidMatrixError(f"expected a square matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise InvalidMatrixError("entries must be finite and non-negative")
    n = c.shape[0]
    if n == 0:
        return [], 0.0
    # 1-based columns; column 0 is the virtual start of every search
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    owner = np.zeros(n + 1, dtype=int)  # owner[j]: row (1-based) holding column j
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            free = ~used[1:]
            cur = c[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[owner[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    cols = [0] * n
    for j in range(1, n + 1):
        cols[owner[j] - 1] = j - 1
    total = float(sum(c[r, cols[r]] for r in range(n)))
    return cols, total


def _check_budget(sensors, points):
    if len(points) > len(sensors):
        raise BudgetError(f"{len(points)} points but only {len(sensors)} sensors")


def _distances(sensors, points) -> np.ndarray:
    s = np.asarray(sensors, dtype=float).reshape(-1, 2)
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.hypot(s[:, None, 0] - p[None, :, 0], s[:, None, 1] - p[None, :, 1])


def build_wmcba_costs(
    sensors: Sequence[Point], points: Sequence[tuple[Point, ColumnKind]], rs: float
) -> CostMatrix:
    """Distance to intersection points; distance minus ``rs`` (floored at 0)
    to target-location points; zero dummy columns pad to square."""
    _check_budget(sensors, points)
    n = len(sensors)
    entries = np.zeros((n, n))
    if points:
        dist = _distances(sensors, [p for p, _ in points])
        for j, (_, kind) in enumerate(points):
            if kind is ColumnKind.TARGET_LOCATION:
                entries[:, j] = np.maximum(0.0, dist[:, j] - rs)
            elif kind is ColumnKind.INTERSECTION:
                entries[:, j] = dist[:, j]
            else:
                raise ValueError(f"unexpected column kind {kind}")
    kinds = [k for _, k in points] + [ColumnKind.DUMMY] * (n - len(points))
    pts = [Point(*p) for p, _ in points] + [None] * (n - len(points))
    return CostMatrix(entries, kinds, pts)


def build_stba_costs(sensors: Sequence[Point], points: Sequence[Point]) -> CostMatrix:
    """Plain distances to every point, zero dummy columns pad to square."""
    _check_budget(sensors, points)
    n = len(sensors)
    entries = np.zeros((n, n))
    if points:
        entries[:, : len(points)] = _distances(sensors, points)
    kinds = [ColumnKind.POTENTIAL] * len(points) + [ColumnKind.DUMMY] * (n - len(points))
    return CostMatrix(entries, kinds, [Point(*p) for p in points] + [None] * (n - len(points)))


def stop_short(origin: Point, target: Point, rs: float) -> Point:
    """Where a sensor heading for ``target`` stops once it is within ``rs``."""
    d = math.hypot(target[0] - origin[0], target[1] - origin[1])
    travel = max(0.0, d - rs)
    if travel == 0.0:
        return Point(*origin)
    t = travel / d
    return Point(origin[0] + t * (target[0] - origin[0]), origin[1] + t * (target[1] - origin[1]))
