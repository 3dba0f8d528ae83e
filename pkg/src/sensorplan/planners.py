"""Deployment planners: WMCBA, STBA and the GBA baseline, plus plan checks.

All three planners choose a list of potential points and then dispatch
sensors to them with the Hungarian method; they differ in how the points
are chosen.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from . import assignment as asg
from .geometry import (
    EPS,
    DegeneratePairError,
    DegenerateTripleError,
    Circle,
    Point,
    chain_points,
    circle_pair_intersections,
    delaunay_index_triples,
    distance,
    fermat_point,
)
from .model import (
    Assignment,
    DeploymentPlan,
    Instance,
    PlanMetrics,
    ReferencePoint,
    RefKind,
)
from .nwst import Variant, build_terminal_graph, klein_ravi
from .wmc import WmcInstance, greedy_wmc


def _xy(points) -> np.ndarray:
    return np.asarray(points, dtype=float).reshape(-1, 2)


def _pairwise(a, b) -> np.ndarray:
    a, b = _xy(a), _xy(b)
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def steps_needed(length: float, rt: float) -> int:
    """Relay hops of size ``rt`` needed to span ``length`` (0 when nothing to span)."""
    if length <= EPS:
        return 0
    if math.isinf(rt):
        return 1
    return max(1, math.ceil((length - EPS) / rt))


# --------------------------------------------------------------------------
# reference points

def build_reference_points(inst: Instance) -> list[ReferencePoint]:
    """Target locations first, then both circle intersections of every
    intersecting target pair, pairs in lexicographic order."""
    tpos = _xy([t.pos for t in inst.targets])
    locs: list[tuple[Point, RefKind, tuple[int, ...]]] = [
        (t.pos, RefKind.TARGET_LOCATION, (z,)) for z, t in enumerate(inst.targets)
    ]
    reach = 2 * inst.rs + EPS
    for i in range(inst.m):
        ci = Circle(inst.targets[i].pos, inst.rs)
        for j in range(i + 1, inst.m):
            if math.hypot(*(tpos[j] - tpos[i])) > reach:
                continue
            try:
                pts = circle_pair_intersections(ci, Circle(inst.targets[j].pos, inst.rs))
            except DegeneratePairError:
                continue
            locs.extend((p, RefKind.INTERSECTION, (i, j)) for p in pts)
    within = _pairwise([p for p, _, _ in locs], tpos) <= inst.rs + EPS
    return [
        ReferencePoint(p, kind, frozenset(np.flatnonzero(within[k]).tolist()), src, k)
        for k, (p, kind, src) in enumerate(locs)
    ]


# --------------------------------------------------------------------------
# selection metrics

def eta(p: Sequence[float], network: Sequence[Sequence[float]]) -> float:
    """Distance from ``p`` to the closest point of ``network``."""
    if len(network) == 0:
        raise ValueError("network must contain at least one point")
    return float(_pairwise([p], network).min())


def _sensing_points(network, inst: Instance):
    return [q for q in network if Point(*q) != inst.sink]


def omega(ids: Iterable[int], network: Sequence[Sequence[float]], inst: Instance) -> float:
    """Weight of the targets in ``ids`` that no potential point in ``network``
    covers. The sink does not sense."""
    ids = sorted(ids)
    if not ids:
        return 0.0
    sensing = _sensing_points(network, inst)
    if not sensing:
        return float(sum(inst.targets[t].weight for t in ids))
    d = _pairwise([inst.targets[t].pos for t in ids], sensing).min(axis=1)
    return float(sum(inst.targets[t].weight for t, dt in zip(ids, d) if dt > inst.rs + EPS))


def phi(
    ref: ReferencePoint,
    network: Sequence[Sequence[float]],
    inst: Instance,
    full_location_sets: bool = False,
) -> int:
    """Additional potential points needed to cover ``ref``'s targets while
    staying connected to ``network``.

    Target-location points get an ``rs`` head start since any point of the
    sensing disc will do. A zero answer is only kept when the targets are
    already sensed; being near the sink alone still costs one point.
    """
    d = eta(ref.location, network)
    if ref.kind is RefKind.TARGET_LOCATION:
        d -= inst.rs
    k = steps_needed(d, inst.rt)
    if k == 0 and omega(ref.target_set(full_location_sets), network, inst) > 0:
        k = 1
    return k


def rho(
    ref: ReferencePoint,
    network: Sequence[Sequence[float]],
    inst: Instance,
    full_location_sets: bool = False,
) -> float:
    """Uncovered weight per additional point; infinite when no point is needed."""
    k = phi(ref, network, inst, full_location_sets)
    if k == 0:
        return math.inf
    return omega(ref.target_set(full_location_sets), network, inst) / k


# --------------------------------------------------------------------------
# sensor dispatch

def _dispatch(inst: Instance, cost: asg.CostMatrix) -> list[Assignment]:
    cols, _ = asg.hungarian(cost)
    out = []
    for s, col in enumerate(cols):
        kind = cost.kinds[col]
        if kind is asg.ColumnKind.DUMMY:
            out.append(Assignment(s))
            continue
        origin = inst.sensors[s]
        target = cost.points[col]
        dest = asg.stop_short(origin, target, inst.rs) if kind is asg.ColumnKind.TARGET_LOCATION else target
        out.append(Assignment(s, dest, distance(origin, dest), col))
    return out


# --------------------------------------------------------------------------
# WMCBA

def wmcba_collection(inst: Instance, refs: list[ReferencePoint] | None = None):
    """The weighted max-coverage instance for ``inst`` together with the
    reference point behind each of its sets."""
    refs = build_reference_points(inst) if refs is None else refs
    weights = {z: t.weight for z, t in enumerate(inst.targets)}
    owners = [r for r in refs if r.kind is RefKind.TARGET_LOCATION]
    owners += [r for r in refs if r.kind is RefKind.INTERSECTION]
    sets = [r.target_set(False) for r in owners]
    return WmcInstance(weights, tuple(sets), inst.n), owners


def wmcba(inst: Instance) -> DeploymentPlan:
    """Greedy weighted max coverage over the reference sets, then dispatch.

    Sensors sent to a target location stop as soon as the target is in
    sensing range. Connectivity is not enforced, so finite ``rt`` plans
    may come out disconnected.
    """
    wmc, owners = wmcba_collection(inst)
    sol = greedy_wmc(wmc)
    chosen = [owners[i] for i in sol.chosen]
    columns = [
        (
            r.location,
            asg.ColumnKind.TARGET_LOCATION if r.kind is RefKind.TARGET_LOCATION else asg.ColumnKind.INTERSECTION,
        )
        for r in chosen
    ]
    cost = asg.build_wmcba_costs(inst.sensors, columns, inst.rs)
    return DeploymentPlan("wmcba", [r.location for r in chosen], _dispatch(inst, cost), chosen)


# --------------------------------------------------------------------------
# STBA

class _Coverage:
    """Running record of which targets the current potential points sense."""

    def __init__(self, inst: Instance, points: Sequence[Point] = ()):
        self.inst = inst
        self.tpos = _xy([t.pos for t in inst.targets])
        self.mask = np.zeros(inst.m, dtype=bool)
        for p in points:
            self.add(p)

    def add(self, p) -> None:
        d = np.hypot(self.tpos[:, 0] - p[0], self.tpos[:, 1] - p[1])
        self.mask |= d <= self.inst.rs + EPS

    def all(self, ids: Iterable[int]) -> bool:
        return all(self.mask[t] for t in ids)


def _chain_to_cover(start, dest, ids, cov: _Coverage, rt: float) -> list[Point]:
    """Relay points from ``start`` toward ``dest`` until ``ids`` are sensed
    or ``dest`` is reached. Updates ``cov`` in place."""

    def stop(q):
        cov.add(q)
        return cov.all(ids)

    pts = chain_points(start, dest, rt, stop)
    if pts:
        cov.add(pts[-1])
    elif not cov.all(ids):
        # start sits on dest but cannot sense (the sink)
        pts = [Point(*dest)]
        cov.add(dest)
    return pts


def regenerate_potential_points(
    selected: Sequence[ReferencePoint],
    inst: Instance,
    full_location_sets: bool = False,
    variant: Variant | str = Variant.MODIFIED,
) -> list[Point]:
    """Rebuild the potential points along a Steiner tree over the selected
    reference points and the sink.

    Fermat points of Voronoi-adjacent triples are offered as Steiner
    candidates. The tree is walked outward from the sink; every edge lays
    relay points from its parent's anchor. Toward a reference point the
    chain stops once that point's targets are sensed; toward a Fermat point
    it stops once within transmission range of it.
    """
    if not selected:
        return []
    terminals = [inst.sink] + [r.location for r in selected]
    fermats = []
    for i, j, k in delaunay_index_triples(terminals):
        try:
            fermats.append(fermat_point(terminals[i], terminals[j], terminals[k]))
        except DegenerateTripleError:
            continue
    graph = build_terminal_graph(terminals, fermats)
    node_targets: dict[int, set] = {}
    for r in selected:
        node = next(v for v, q in enumerate(graph.points) if distance(q, r.location) <= EPS)
        node_targets.setdefault(node, set()).update(r.target_set(full_location_sets))
    tree = klein_ravi(graph, variant)

    adj: dict[int, list[int]] = {v: [] for v in tree.nodes}
    for a, b in tree.edges:
        adj[a].append(b)
        adj[b].append(a)
    root = 0
    anchor: dict[int, Point] = {root: inst.sink}
    cov = _Coverage(inst)
    out: list[Point] = []
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v in anchor:
                continue
            start, dest = anchor[u], graph.points[v]
            if graph.terminal[v]:
                pts = _chain_to_cover(start, dest, node_targets.get(v, ()), cov, inst.rt)
            else:
                pts = chain_points(start, dest, inst.rt, lambda q: distance(q, dest) <= inst.rt + EPS)
                for q in pts:
                    cov.add(q)
            out.extend(pts)
            anchor[v] = pts[-1] if pts else start
            queue.append(v)
    return out


def stba(
    inst: Instance,
    full_location_sets: bool = False,
    variant: Variant | str = Variant.MODIFIED,
    trace: list | None = None,
) -> DeploymentPlan:
    """Steiner-tree-based planner.

    Repeatedly adds the reference point with the best uncovered weight per
    extra potential point (ties: nearer to the network, then lower index)
    and lays a relay chain to it from the closest network point. When the
    budget blocks further additions the points are rebuilt along a
    Steiner tree and the rebuild is kept only if it needs fewer points.
    Each rebuild appends ``(points before, points rebuilt)`` to ``trace``.
    """
    refs = build_reference_points(inst)
    n = inst.n
    target_sets = [r.target_set(full_location_sets) for r in refs]
    member = np.zeros((len(refs), inst.m), dtype=bool)
    for k, ids in enumerate(target_sets):
        member[k, list(ids)] = True
    weights = np.array([t.weight for t in inst.targets])
    ref_xy = _xy([r.location for r in refs])
    is_loc = np.array([r.kind is RefKind.TARGET_LOCATION for r in refs])
    order = np.arange(len(refs))

    points: list[Point] = []
    chosen: list[int] = []

    while True:
        cov = _Coverage(inst, points)
        if cov.mask.all():
            break
        net = [inst.sink] + points
        eta_arr = _pairwise(ref_xy, net).min(axis=1)
        claimed = np.zeros(inst.m, dtype=bool)
        for k in chosen:
            claimed |= member[k]
        while not cov.mask.all():
            budget = n - len(points)
            open_ = (member & ~claimed).any(axis=1)
            uncovered_w = (member * (weights * ~cov.mask)).sum(axis=1)
            gap = np.where(is_loc, eta_arr - inst.rs, eta_arr)
            steps = np.array([steps_needed(g, inst.rt) for g in gap])
            steps[(steps == 0) & (uncovered_w > 0)] = 1
            feasible = open_ & (steps <= budget)
            if not feasible.any():
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                score = np.where(steps == 0, np.inf, uncovered_w / np.maximum(steps, 1))
            cand = order[feasible]
            best = min(cand, key=lambda k: (-score[k], eta_arr[k], k))
            ids = target_sets[best]
            chosen.append(int(best))
            claimed |= member[best]
            if cov.all(ids):
                continue
            net_d = _pairwise(ref_xy[best : best + 1], net)[0]
            start = net[int(np.argmin(net_d))]
            new = _chain_to_cover(start, refs[best].location, ids, cov, inst.rt)
            if len(new) > budget:
                # only reachable with full location sets, where one target's
                # neighbours may need more hops than the estimate
                new = new[:budget]
                cov = _Coverage(inst, points + new)
            points.extend(new)
            net.extend(new)
            eta_arr = np.minimum(eta_arr, _pairwise(ref_xy, new).min(axis=1))
        rebuilt = regenerate_potential_points([refs[k] for k in chosen], inst, full_location_sets, variant)
        if trace is not None:
            trace.append((len(points), len(rebuilt)))
        if len(rebuilt) < len(points):
            points = rebuilt
            continue
        break

    cost = asg.build_stba_costs(inst.sensors, points)
    return DeploymentPlan("stba", list(points), _dispatch(inst, cost), [refs[k] for k in chosen])


# --------------------------------------------------------------------------
# GBA

def gba(inst: Instance) -> DeploymentPlan:
    """Greedy baseline: repeatedly connect the target with the best weight
    per relay hop, splitting the segment from the closest already-selected
    target (or sink) into equal hops that end on the target itself."""
    tpos = _xy([t.pos for t in inst.targets])
    weights = np.array([t.weight for t in inst.targets])
    net: list[Point] = [inst.sink]
    points: list[Point] = []
    selected = np.zeros(inst.m, dtype=bool)
    while not selected.all():
        budget = inst.n - len(points)
        d = _pairwise(tpos, net)
        eta_arr = d.min(axis=1)
        steps = np.array([max(1, steps_needed(e, inst.rt)) for e in eta_arr])
        feasible = ~selected & (steps <= budget)
        if not feasible.any():
            break
        score = weights / steps
        best = min(np.flatnonzero(feasible), key=lambda j: (-score[j], eta_arr[j], j))
        src = net[int(np.argmin(d[best]))]
        dest = inst.targets[best].pos
        k = int(steps[best])
        for i in range(1, k):
            t = i / k
            points.append(Point(src.x + t * (dest.x - src.x), src.y + t * (dest.y - src.y)))
        points.append(dest)
        net.append(dest)
        selected[best] = True
    cost = asg.build_stba_costs(inst.sensors, points)
    return DeploymentPlan("gba", points, _dispatch(inst, cost))


PLANNERS = {"wmcba": wmcba, "stba": stba, "gba": gba}


# --------------------------------------------------------------------------
# evaluation

def check_connectivity(points: Sequence[Sequence[float]], sink: Sequence[float], rt: float) -> bool:
    """True when every point reaches the sink through hops of at most ``rt``."""
    if len(points) == 0 or math.isinf(rt):
        return True
    nodes = _xy([sink] + list(points))
    adj = _pairwise(nodes, nodes) <= rt + EPS
    seen = np.zeros(len(nodes), dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        reach = adj[frontier].any(axis=0) & ~seen
        seen |= reach
        frontier = np.flatnonzero(reach)
    return bool(seen.all())


def evaluate_plan(inst: Instance, plan: DeploymentPlan) -> PlanMetrics:
    active = plan.active()
    finals = [a.dest for a in active]
    covered: frozenset = frozenset()
    if finals:
        d = _pairwise([t.pos for t in inst.targets], finals).min(axis=1)
        covered = frozenset(np.flatnonzero(d <= inst.rs + EPS).tolist())
    return PlanMetrics(
        covered_weight=float(sum(inst.targets[t].weight for t in sorted(covered))),
        covered_target_ids=covered,
        total_movement=float(sum(a.dist for a in active)),
        sensors_used=len(active),
        connected=check_connectivity(finals, inst.sink, inst.rt),
    )


def plan_problems(inst: Instance, plan: DeploymentPlan) -> list[str]:
    """Structural problems with a plan; an empty list means it is valid."""
    problems = []
    if len(plan.points) > inst.n:
        problems.append(f"{len(plan.points)} points for {inst.n} sensors")
    sensors = [a.sensor for a in plan.assignments]
    if sorted(sensors) != list(range(inst.n)):
        problems.append("assignments do not list every sensor exactly once")
    used = [a.point for a in plan.active()]
    if sorted(used) != list(range(len(plan.points))):
        problems.append("points and non-idle sensors are not in one-to-one correspondence")
    for a in plan.active():
        if abs(distance(inst.sensors[a.sensor], a.dest) - a.dist) > 1e-6:
            problems.append(f"sensor {a.sensor} reports distance {a.dist} for a different move")
    return problems
