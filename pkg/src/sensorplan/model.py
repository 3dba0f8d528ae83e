"""Problem instance, reference points, and deployment plans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .geometry import Point


class ValidationError(ValueError):
    """An instance or plan violates its invariants. Names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _finite_point(name: str, p) -> Point:
    try:
        x, y = p
        x, y = float(x), float(y)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected an [x, y] pair, got {p!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(name, f"non-finite coordinate {p!r}")
    return Point(x, y)


@dataclass(frozen=True)
class Target:
    pos: Point
    weight: float


@dataclass(frozen=True)
class Instance:
    """Sensing range, transmission range (``math.inf`` when unbounded),
    sink location, sensor start positions, and weighted targets."""

    rs: float
    rt: float
    sink: Point
    sensors: tuple[Point, ...]
    targets: tuple[Target, ...]

    def __post_init__(self):
        if not (isinstance(self.rs, (int, float)) and math.isfinite(self.rs) and self.rs > 0):
            raise ValidationError("rs", f"must be a finite number > 0, got {self.rs!r}")
        if not (isinstance(self.rt, (int, float)) and self.rt > 0 and not math.isnan(self.rt)):
            raise ValidationError("rt", f"must be > 0 or unbounded, got {self.rt!r}")
        object.__setattr__(self, "sink", _finite_point("sink", self.sink))
        object.__setattr__(
            self, "sensors", tuple(_finite_point(f"sensors[{i}]", s) for i, s in enumerate(self.sensors))
        )
        targets = []
        for i, t in enumerate(self.targets):
            pos, w = (t.pos, t.weight) if isinstance(t, Target) else t
            pos = _finite_point(f"targets[{i}].pos", pos)
            if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0):
                raise ValidationError(f"targets[{i}].w", f"weight must be finite and > 0, got {w!r}")
            targets.append(Target(pos, float(w)))
        object.__setattr__(self, "targets", tuple(targets))
        if not self.sensors:
            raise ValidationError("sensors", "at least one sensor is required")
        if not self.targets:
            raise ValidationError("targets", "at least one target is required")

    @property
    def n(self) -> int:
        return len(self.sensors)

    @property
    def m(self) -> int:
        return len(self.targets)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.rt)


class RefKind(str, Enum):
    TARGET_LOCATION = "target-location"
    INTERSECTION = "intersection"


@dataclass(frozen=True)
class ReferencePoint:
    """Candidate sensor location.

    ``covers`` is every target within sensing range of ``location``;
    ``source`` holds the target index (location points) or the target
    pair whose sensing circles meet here.
    """

    location: Point
    kind: RefKind
    covers: frozenset
    source: tuple[int, ...]
    index: int

    def target_set(self, full_location_sets: bool = False) -> frozenset:
        """Targets this point is responsible for during selection."""
        if self.kind is RefKind.TARGET_LOCATION and not full_location_sets:
            return frozenset(self.source)
        return self.covers


@dataclass(frozen=True)
class Assignment:
    sensor: int
    dest: Optional[Point] = None
    dist: float = 0.0
    point: Optional[int] = None

    @property
    def idle(self) -> bool:
        return self.dest is None


@dataclass
class DeploymentPlan:
    algorithm: str
    points: list[Point]
    assignments: list[Assignment]
    selected: list[ReferencePoint] = field(default_factory=list)

    def active(self) -> list[Assignment]:
        return [a for a in self.assignments if not a.idle]


@dataclass(frozen=True)
class PlanMetrics:
    covered_weight: float
    covered_target_ids: frozenset
    total_movement: float
    sensors_used: int
    connected: bool
