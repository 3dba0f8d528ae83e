"""Weighted maximum coverage: greedy selection and an exhaustive oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

BRUTE_FORCE_MAX_SETS = 20


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class WmcInstance:
    """Universe with weights, a collection of subsets, and a budget ``k``."""

    weights: dict[Hashable, float]
    sets: tuple[frozenset, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        for eid, w in self.weights.items():
            if not (math.isfinite(w) and w >= 0):
                raise ValueError(f"element {eid!r} has invalid weight {w}")
        for i, s in enumerate(self.sets):
            missing = s - self.weights.keys()
            if missing:
                raise ValueError(f"set {i} references unknown elements {sorted(map(repr, missing))}")

    def union_weight(self, chosen: Sequence[int]) -> float:
        covered = set().union(*(self.sets[i] for i in chosen)) if chosen else set()
        return sum(self.weights[e] for e in covered)


@dataclass(frozen=True)
class WmcSolution:
    chosen: list[int]
    covered_weight: float
    gains: list[float] = field(default_factory=list)


def greedy_wmc(inst: WmcInstance) -> WmcSolution:
    """Pick the set with the largest uncovered weight until the budget runs out.

    Ties go to the lowest set index; a set adding no weight ends the loop.
    """
    covered: set = set()
    chosen: list[int] = []
    gains: list[float] = []
    n_elements = len(inst.weights)
    while len(chosen) < inst.budget and len(covered) < n_elements:
        best, best_gain = -1, 0.0
        for i, s in enumerate(inst.sets):
            gain = sum(inst.weights[e] for e in s if e not in covered)
            if gain > best_gain:
                best, best_gain = i, gain
        if best < 0:
            break
        chosen.append(best)
        gains.append(best_gain)
        covered |= inst.sets[best]
    return WmcSolution(chosen, sum(inst.weights[e] for e in covered), gains)


def brute_force_wmc(inst: WmcInstance) -> WmcSolution:
    """Exhaustive optimum over all sub-collections of size <= budget.

    Among optimal selections the lexicographically least index tuple wins.
    """
    r = len(inst.sets)
    if r > BRUTE_FORCE_MAX_SETS:
        raise SizeLimitError(f"{r} sets exceeds the brute-force limit of {BRUTE_FORCE_MAX_SETS}")
    best: tuple[int, ...] = ()
    best_w = 0.0
    for size in range(1, min(inst.budget, r) + 1):
        for combo in combinations(range(r), size):
            w = inst.union_weight(combo)
            if w > best_w or (w == best_w and combo < best):
                best, best_w = combo, w
    return WmcSolution(list(best), best_w)
