"""Node-weighted Steiner trees on Euclidean complete graphs (Klein-Ravi).

Node weights are zero and edge weights are Euclidean lengths, so the
cheapest connection from a node into a tree is a single direct edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .geometry import EPS, Point, distance


class Variant(str, Enum):
    ORIGINAL = "original"
    MODIFIED = "modified"


@dataclass
class CompleteGraph:
    """Complete graph; edge weights default to Euclidean distances between
    ``points`` but an explicit symmetric ``dist`` matrix may be supplied."""

    points: list[Point]
    terminal: list[bool]
    node_weight: list[float] = field(default_factory=list)
    dist: np.ndarray | None = None

    def __post_init__(self):
        if not self.node_weight:
            self.node_weight = [0.0] * len(self.terminal)
        if self.dist is None:
            p = np.asarray(self.points, dtype=float).reshape(-1, 2)
            self.dist = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])
        else:
            self.dist = np.asarray(self.dist, dtype=float)

    def __len__(self):
        return len(self.terminal)

    @property
    def terminals(self) -> list[int]:
        return [i for i, t in enumerate(self.terminal) if t]

    def edge_count(self) -> int:
        n = len(self)
        return n * (n - 1) // 2


@dataclass
class SteinerTree:
    nodes: list[int]
    edges: list[tuple[int, int]]

    def length(self, graph: CompleteGraph) -> float:
        return float(sum(graph.dist[a, b] for a, b in self.edges))


def build_terminal_graph(terminals: Sequence[Point], candidates: Sequence[Point]) -> CompleteGraph:
    """Complete graph over terminals then candidates, collapsing duplicates.

    A candidate within EPS of an earlier node is merged into it, so a
    candidate sitting on a terminal becomes that terminal.
    """
    if not terminals:
        raise ValueError("at least one terminal is required")
    pts: list[Point] = []
    flags: list[bool] = []
    for p, is_terminal in [(t, True) for t in terminals] + [(c, False) for c in candidates]:
        if any(distance(p, q) <= EPS for q in pts):
            continue
        pts.append(Point(*p))
        flags.append(is_terminal)
    return CompleteGraph(pts, flags)


def _node_tree_distances(graph: CompleteGraph, trees: list[list[int]]) -> np.ndarray:
    return np.stack([graph.dist[:, t].min(axis=1) for t in trees], axis=1)


def _best_prefix(xi_row: np.ndarray, kappa: float, variant: Variant) -> tuple[float, np.ndarray]:
    order = np.argsort(xi_row, kind="stable")
    sums = kappa + np.cumsum(xi_row[order])
    sizes = np.arange(1, len(order) + 1)
    denom = sizes if variant is Variant.ORIGINAL else sizes - 1
    q = np.full(len(order), np.inf)
    q[1:] = sums[1:] / denom[1:]
    best = int(np.argmin(q))
    return float(q[best]), order[: best + 1]


def quotient_cost(
    graph: CompleteGraph, v: int, trees: list[list[int]], variant: Variant | str = Variant.MODIFIED
) -> float:
    """Cheapest ratio of connection cost to (number of trees joined).

    ``original`` divides by the number of trees joined, ``modified`` by
    one less. Sorting trees by connection cost and scanning prefixes is
    exact because each prefix is the cheapest collection of its size.
    """
    if len(trees) < 2:
        raise ValueError("quotient cost needs at least two trees")
    xi = _node_tree_distances(graph, trees)[v]
    return _best_prefix(xi, graph.node_weight[v], Variant(variant))[0]


def klein_ravi(graph: CompleteGraph, variant: Variant | str = Variant.MODIFIED) -> SteinerTree:
    """Grow a tree spanning every terminal by repeated quotient-cost merges.

    Each round picks the node with the smallest quotient cost (lowest index
    on ties) and joins it to its best collection of trees.
    """
    variant = Variant(variant)
    terminals = graph.terminals
    if not terminals:
        raise ValueError("graph has no terminals")
    trees: list[list[int]] = [[t] for t in terminals]
    edges: list[tuple[int, int]] = []
    kappa = np.asarray(graph.node_weight, dtype=float)
    while len(trees) > 1:
        xi = _node_tree_distances(graph, trees)
        best_v, best_q, best_sel = -1, np.inf, None
        for v in range(len(graph)):
            q, sel = _best_prefix(xi[v], kappa[v], variant)
            if q < best_q:
                best_v, best_q, best_sel = v, q, sel
        sel = sorted(int(s) for s in best_sel)
        merged: list[int] = [] if any(best_v in trees[s] for s in sel) else [best_v]
        for s in sel:
            tree = trees[s]
            if best_v not in tree:
                nearest = tree[int(np.argmin(graph.dist[best_v, tree]))]
                edges.append((best_v, nearest))
            merged.extend(tree)
        trees = [t for i, t in enumerate(trees) if i not in sel]
        trees.insert(sel[0], merged)
    return SteinerTree(sorted(trees[0]), edges)


def is_spanning_tree(tree: SteinerTree, graph: CompleteGraph) -> bool:
    """Connected, acyclic, and covering every terminal."""
    nodes = set(tree.nodes)
    if not set(graph.terminals) <= nodes or len(tree.edges) != len(nodes) - 1:
        return False
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for a, b in tree.edges:
        if a not in nodes or b not in nodes:
            return False
        adj[a].append(b)
        adj[b].append(a)
    seen = {tree.nodes[0]}
    stack = [tree.nodes[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == nodes
