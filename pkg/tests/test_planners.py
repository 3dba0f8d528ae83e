import math
from collections import deque
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensorplan import planners
from sensorplan.assignment import ColumnKind, build_stba_costs, build_wmcba_costs
from sensorplan.geometry import Point, delaunay_index_triples, distance, fermat_point
from sensorplan.harness import InstanceParams, gen_instance
from sensorplan.model import Assignment, DeploymentPlan, Instance, RefKind, Target, ValidationError
from sensorplan.nwst import build_terminal_graph, klein_ravi
from sensorplan.planners import (
    build_reference_points,
    check_connectivity,
    eta,
    evaluate_plan,
    gba,
    omega,
    phi,
    plan_problems,
    regenerate_potential_points,
    rho,
    stba,
    steps_needed,
    wmcba,
    wmcba_collection,
)
from sensorplan.wmc import greedy_wmc


def make(targets, sensors, rs=20, rt=20, sink=(0, 0)):
    return Instance(rs, rt, sink, tuple(sensors), tuple(Target(p, w) for p, w in targets))


# ---------------------------------------------------------------- instances


def test_instance_validation_names_field():
    cases = [
        (dict(rs=0), "rs"),
        (dict(rt=-1), "rt"),
        (dict(sensors=()), "sensors"),
        (dict(targets=()), "targets"),
        (dict(targets=(Target((0, 0), 0),)), "targets[0].w"),
        (dict(sink=(math.nan, 0)), "sink"),
    ]
    base = dict(rs=20, rt=20, sink=(0, 0), sensors=((1, 1),), targets=(Target((5, 5), 1),))
    for override, field in cases:
        with pytest.raises(ValidationError) as err:
            Instance(**{**base, **override})
        assert err.value.field == field


# ---------------------------------------------------------------- reference points


def test_reference_points_single_target():
    refs = build_reference_points(make([((10, 10), 3)], [(0, 0)]))
    assert len(refs) == 1
    assert refs[0].kind is RefKind.TARGET_LOCATION and refs[0].covers == {0}


def test_reference_points_pair():
    refs = build_reference_points(make([((0, 0), 1), ((30, 0), 1)], [(0, 0)]))
    kinds = [r.kind for r in refs]
    assert kinds == [RefKind.TARGET_LOCATION] * 2 + [RefKind.INTERSECTION] * 2
    assert all(r.covers == {0, 1} for r in refs[2:])
    assert refs[0].target_set() == {0} and refs[0].target_set(full_location_sets=True) == {0}


def test_reference_point_sets_are_within_range():
    inst = gen_instance(InstanceParams(sensors=5, targets=40, width=150, height=150), 2)
    for r in build_reference_points(inst):
        for t in r.covers:
            assert distance(r.location, inst.targets[t].pos) <= inst.rs + 1e-9
        if r.kind is RefKind.TARGET_LOCATION:
            assert r.source[0] in r.covers


def _probe_sets(inst, probes):
    tp = np.array([t.pos for t in inst.targets])
    d = np.hypot(probes[:, None, 0] - tp[None, :, 0], probes[:, None, 1] - tp[None, :, 1])
    return [frozenset(np.flatnonzero(row <= inst.rs + 1e-9).tolist()) for row in d]


def test_every_coverable_set_fits_inside_a_collection_set():
    rng = np.random.default_rng(4)
    for seed in range(5):
        inst = gen_instance(InstanceParams(sensors=5, targets=40, width=150, height=150), seed)
        wmc, _ = wmcba_collection(inst)
        for ids in _probe_sets(inst, rng.uniform(0, 150, size=(500, 2))):
            if ids:
                assert any(ids <= s for s in wmc.sets)


def test_coverable_set_need_not_equal_a_collection_set():
    # the lens of the first two discs has both corners swallowed by the
    # other two discs, yet its middle sees only the first two targets
    targets = [((0, 0), 1), ((10, 0), 1), ((5, 35), 1), ((5, -35), 1)]
    inst = make(targets, [(0, 0)])
    wmc, _ = wmcba_collection(inst)
    probe = _probe_sets(inst, np.array([[5.0, 0.0]]))[0]
    assert probe == {0, 1}
    assert probe not in wmc.sets
    assert any(probe <= s for s in wmc.sets)


# ---------------------------------------------------------------- selection metrics


def test_eta():
    assert eta((25, 0), [(0, 0)]) == 25
    assert eta((3, 3), [(1, 1), (3, 3)]) == 0
    rng = np.random.default_rng(1)
    net = rng.uniform(0, 100, size=(5, 2)).tolist()
    p = (50, 50)
    assert eta(p, net) == pytest.approx(min(distance(p, q) for q in net))
    with pytest.raises(ValueError):
        eta(p, [])


def test_steps_needed():
    assert steps_needed(25, 20) == 2
    assert steps_needed(40, 20) == 2
    assert steps_needed(40.0000001, 20) == 3
    assert steps_needed(0, 20) == 0
    assert steps_needed(-5, 20) == 0
    assert steps_needed(500, math.inf) == 1


def test_phi_examples():
    inst = make([((25, 0), 1), ((-5, 90), 1), ((200, 0), 1)], [(0, 0)])
    refs = build_reference_points(inst)
    loc0, loc1, loc2 = refs[:3]
    assert phi(loc2, [(0, 0), (155, 0)], inst) == 2
    assert phi(loc0, [(0, 0), (10, 0)], inst) == 0
    fake_intersection = loc0.__class__((25, 0), RefKind.INTERSECTION, frozenset({0}), (0, 1), 99)
    assert phi(fake_intersection, [(0, 0)], inst) == 2


def test_phi_near_sink_still_costs_a_point():
    inst = make([((15, 0), 1)], [(0, 0)])
    loc = build_reference_points(inst)[0]
    assert phi(loc, [(0, 0)], inst) == 1


def test_omega_examples():
    inst = make([((0, 0), 10), ((5, 0), 4), ((100, 0), 3)], [(0, 0)], sink=(500, 500))
    assert omega({0, 1}, [(500, 500), (2, 0)], inst) == 0
    assert omega({0, 1}, [(500, 500)], inst) == 14
    net = [(500, 500), (90, 0)]
    expected = sum(
        inst.targets[t].weight for t in (0, 1, 2) if min(distance(inst.targets[t].pos, q) for q in net[1:]) > 20
    )
    assert omega({0, 1, 2}, net, inst) == expected == 14


def test_sink_does_not_sense():
    inst = make([((0, 0), 5)], [(9, 9)])
    assert omega({0}, [(0, 0)], inst) == 5


def test_rho_examples():
    inst = make([((200, 0), 6), ((210, 0), 1)], [(0, 0)], sink=(0, 0))
    loc = build_reference_points(inst)[0]
    assert rho(loc, [(0, 0), (200, 0)], inst) == math.inf
    assert rho(loc, [(0, 0), (150, 0)], inst) == 6 / 2
    inst2 = make([((50, 0), 6)], [(0, 0)])
    loc2 = build_reference_points(inst2)[0]
    assert rho(loc2, [(0, 0), (50, 0), (400, 0)], inst2) == math.inf
    assert omega(loc2.target_set(), [(0, 0), (50, 0)], inst2) == 0


# ---------------------------------------------------------------- WMCBA


def test_wmcba_single_sensor():
    inst = make([((50, 0), 7)], [(0, 0)], rt=math.inf)
    plan = wmcba(inst)
    assert plan.assignments[0].dest == Point(30, 0)
    assert plan.assignments[0].dist == pytest.approx(30)
    assert evaluate_plan(inst, plan).covered_weight == 7


def fig1_instance():
    """Two overlapping pairs plus four isolated targets, weights 10,4,2,1,8,5,5,6."""
    targets = [
        ((100, 100), 10), ((130, 100), 4), ((100, 300), 2), ((300, 100), 1),
        ((500, 500), 8), ((300, 300), 5), ((330, 300), 5), ((500, 100), 6),
    ]
    sensors = [(40 * i, 20 + 7 * i) for i in range(14)]
    return make(targets, sensors, rt=math.inf, sink=(250, 250))


def test_wmcba_fig1_topology():
    inst = fig1_instance()
    wmc, owners = wmcba_collection(inst)
    assert wmc.budget == 14
    sol = greedy_wmc(wmc)
    chosen = [wmc.sets[i] for i in sol.chosen]
    assert chosen == [{0, 1}, {5, 6}, {4}, {7}, {2}, {3}]
    plan = wmcba(inst)
    assert len(plan.points) == 6 and plan.active() and len(plan.active()) == 6
    kinds = [r.kind for r in plan.selected]
    assert kinds[:2] == [RefKind.INTERSECTION] * 2 and kinds[2:] == [RefKind.TARGET_LOCATION] * 4
    assert evaluate_plan(inst, plan).covered_weight == 41


def test_wmcba_weight_matches_transformed_greedy():
    rng = np.random.default_rng(9)
    for i in range(50):
        inst = gen_instance(
            InstanceParams(sensors=int(rng.integers(1, 8)), targets=int(rng.integers(1, 12)), width=120, height=120,
                           rt=math.inf),
            i,
        )
        wmc, _ = wmcba_collection(inst)
        assert evaluate_plan(inst, wmcba(inst)).covered_weight == pytest.approx(greedy_wmc(wmc).covered_weight)


def test_wmcba_finite_range_reports_disconnection():
    inst = make([((300, 0), 2)], [(290, 5)], rt=20)
    m = evaluate_plan(inst, wmcba(inst))
    assert m.covered_weight == 2 and not m.connected


# ---------------------------------------------------------------- STBA


def test_stba_without_reachable_candidates():
    inst = make([((100, 0), 5)], [(3, 3)])
    plan = stba(inst)
    assert plan.points == [] and plan.assignments == [Assignment(0)]
    m = evaluate_plan(inst, plan)
    assert (m.covered_weight, m.total_movement, m.sensors_used, m.connected) == (0, 0, 0, True)


def test_stba_chain_reaches_target():
    inst = make([((50, 0), 5)], [(0, 0), (0, 0), (0, 0)])
    plan = stba(inst)
    assert plan.points == [(20, 0), (40, 0)]
    m = evaluate_plan(inst, plan)
    assert m.covered_weight == 5 and m.connected


def test_stba_matches_wmcba_without_range_limit():
    for seed in range(40):
        inst = gen_instance(InstanceParams(sensors=12, targets=20, width=300, height=300, rt=math.inf), seed)
        assert evaluate_plan(inst, stba(inst)).covered_weight == evaluate_plan(inst, wmcba(inst)).covered_weight


def test_regeneration_only_adopted_when_smaller():
    adopted = 0
    for seed in range(6):
        inst = gen_instance(InstanceParams(sensors=100, targets=30), seed)
        trace = []
        plan = stba(inst, trace=trace)
        assert trace, "the outer loop always tries one rebuild"
        assert all(after < before for before, after in trace[:-1])
        adopted += len(trace) - 1
        assert len(plan.points) <= inst.n
    assert adopted > 0


def test_full_location_sets_variant_is_valid():
    for seed in range(5):
        inst = gen_instance(InstanceParams(sensors=60, targets=30, width=300, height=300), seed)
        plan = stba(inst, full_location_sets=True)
        assert plan_problems(inst, plan) == []
        m = evaluate_plan(inst, plan)
        assert m.connected or m.covered_weight == 0


# ---------------------------------------------------------------- regeneration


def test_regenerate_single_nearby_point():
    inst = make([((15, 0), 1)], [(0, 0)])
    refs = build_reference_points(inst)
    assert regenerate_potential_points(refs, inst) == [Point(15, 0)]


def test_regenerate_stops_once_targets_covered():
    inst = make([((35, 0), 1)], [(0, 0)])
    refs = build_reference_points(inst)
    assert regenerate_potential_points(refs, inst) == [Point(20, 0)]


def test_regenerate_empty():
    assert regenerate_potential_points([], make([((35, 0), 1)], [(0, 0)])) == []


def test_regenerate_routes_through_fermat_candidate():
    far = [(300 + 120 * math.cos(a), 120 * math.sin(a)) for a in (math.pi, math.pi / 3, -math.pi / 3)]
    inst = make([(p, 1) for p in far], [(0, 0)] * 60)
    refs = build_reference_points(inst)[:3]
    terminals = [inst.sink] + [r.location for r in refs]
    fermats = [fermat_point(*(terminals[i] for i in t)) for t in delaunay_index_triples(terminals)]
    graph = build_terminal_graph(terminals, fermats)
    tree = klein_ravi(graph)
    assert any(not graph.terminal[v] for v in tree.nodes)
    direct = sum(steps_needed(distance(inst.sink, r.location) - inst.rs, inst.rt) for r in refs)
    rebuilt = regenerate_potential_points(refs, inst)
    assert len(rebuilt) < direct
    assert check_connectivity(rebuilt, inst.sink, inst.rt)
    covered = {t for q in rebuilt for t in range(3) if distance(q, inst.targets[t].pos) <= inst.rs + 1e-9}
    assert covered == {0, 1, 2}


# ---------------------------------------------------------------- GBA


def test_gba_equal_parts():
    inst = make([((50, 0), 4)], [(0, 0)] * 3)
    plan = gba(inst)
    xs = [p.x for p in plan.points]
    assert xs == pytest.approx([50 / 3, 100 / 3, 50])
    assert plan.points[-1] == Point(50, 0)


def test_gba_target_on_sink_still_occupied():
    inst = make([((0, 0), 4)], [(10, 0)])
    plan = gba(inst)
    assert plan.points == [Point(0, 0)]
    assert evaluate_plan(inst, plan).covered_weight == 4


def test_gba_budget_too_small():
    plan = gba(make([((100, 0), 4)], [(0, 0)]))
    assert plan.points == [] and plan.active() == []


# ---------------------------------------------------------------- evaluation


def test_evaluate_fig1_weight_41():
    inst = fig1_instance()
    dests = [t.pos for t in inst.targets]
    assignments = [Assignment(i, d, distance(inst.sensors[i], d), i) for i, d in enumerate(dests)]
    assignments += [Assignment(i) for i in range(len(dests), inst.n)]
    plan = DeploymentPlan("manual", dests, assignments)
    m = evaluate_plan(inst, plan)
    assert m.covered_weight == 41 and m.sensors_used == 8
    assert plan_problems(inst, plan) == []


def test_evaluate_empty_plan():
    inst = make([((5, 5), 1)], [(0, 0), (1, 1)])
    m = evaluate_plan(inst, DeploymentPlan("none", [], [Assignment(0), Assignment(1)]))
    assert (m.covered_weight, m.total_movement, m.sensors_used, m.connected) == (0, 0, 0, True)


def test_evaluate_random_plan_against_scan():
    inst = gen_instance(InstanceParams(sensors=30, targets=40, width=200, height=200), 3)
    rng = np.random.default_rng(0)
    dests = [Point(*p) for p in rng.uniform(0, 200, size=(20, 2))]
    plan = DeploymentPlan(
        "random", dests,
        [Assignment(i, d, distance(inst.sensors[i], d), i) for i, d in enumerate(dests)]
        + [Assignment(i) for i in range(20, 30)],
    )
    expected = {z for z, t in enumerate(inst.targets) if any(distance(t.pos, d) <= inst.rs + 1e-9 for d in dests)}
    m = evaluate_plan(inst, plan)
    assert m.covered_target_ids == expected
    assert m.covered_weight == pytest.approx(sum(inst.targets[z].weight for z in expected))


def test_plan_problems_detects_bad_plans():
    inst = make([((5, 5), 1)], [(0, 0), (1, 1)])
    p = Point(5, 5)
    bad_dist = DeploymentPlan("x", [p], [Assignment(0, p, 1.0, 0), Assignment(1)])
    assert plan_problems(inst, bad_dist)
    shared = DeploymentPlan("x", [p], [Assignment(0, p, distance((0, 0), p), 0), Assignment(1, p, distance((1, 1), p), 0)])
    assert plan_problems(inst, shared)
    missing = DeploymentPlan("x", [], [Assignment(0)])
    assert plan_problems(inst, missing)


def bfs_connected(points, sink, rt):
    nodes = [sink] + list(points)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in range(len(nodes)):
            if v not in seen and distance(nodes[u], nodes[v]) <= rt + 1e-9:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(nodes)


def test_connectivity_examples():
    assert check_connectivity([(1e6, 1e6)], (0, 0), math.inf)
    assert check_connectivity([(20, 0)], (0, 0), 20)
    assert not check_connectivity([(20.2, 0)], (0, 0), 20)
    assert check_connectivity([], (0, 0), 20)


def test_connectivity_matches_bfs():
    rng = np.random.default_rng(2)
    for _ in range(100):
        pts = [tuple(p) for p in rng.uniform(0, 80, size=(int(rng.integers(1, 12)), 2))]
        assert check_connectivity(pts, (40, 40), 20) == bfs_connected(pts, (40, 40), 20)


# ---------------------------------------------------------------- plan properties

small_instances = st.builds(
    lambda seed, n, m, rt: gen_instance(InstanceParams(sensors=n, targets=m, width=150, height=150, rt=rt), seed),
    st.integers(0, 2**32),
    st.integers(1, 25),
    st.integers(1, 15),
    st.sampled_from([20.0, 35.0, math.inf]),
)


@settings(max_examples=40, deadline=None)
@given(small_instances)
def test_every_planner_produces_a_valid_plan(inst):
    for name, planner in planners.PLANNERS.items():
        plan = planner(inst)
        assert plan_problems(inst, plan) == [], name
        m = evaluate_plan(inst, plan)
        finals = [a.dest for a in plan.active()]
        for t in m.covered_target_ids:
            assert min(distance(inst.targets[t].pos, d) for d in finals) <= inst.rs + 1e-9
        assert m.covered_weight == pytest.approx(sum(inst.targets[t].weight for t in m.covered_target_ids))
        if name != "wmcba" and m.covered_weight > 0:
            assert m.connected, name


def test_movement_is_optimal_for_small_fleets():
    rng = np.random.default_rng(21)
    for i in range(15):
        n = int(rng.integers(1, 8))
        inst = gen_instance(InstanceParams(sensors=n, targets=6, width=100, height=100, rt=30), i)
        for name, planner in planners.PLANNERS.items():
            plan = planner(inst)
            if name == "wmcba":
                cols = [
                    (r.location, ColumnKind.TARGET_LOCATION if r.kind is RefKind.TARGET_LOCATION else ColumnKind.INTERSECTION)
                    for r in plan.selected
                ]
                cost = build_wmcba_costs(inst.sensors, cols, inst.rs).entries
            else:
                cost = build_stba_costs(inst.sensors, plan.points).entries
            best = min(sum(cost[r, p[r]] for r in range(n)) for p in permutations(range(n)))
            assert evaluate_plan(inst, plan).total_movement == pytest.approx(best, abs=1e-9)
