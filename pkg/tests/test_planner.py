import math

import numpy as np
import pytest

from bigit import BigitPlanner, PlannerConfig, RngStream
from bigit.bench.domains import WALL_GAP_OPTIMUM, empty, wall_gap
from bigit.errors import InvariantError, UsageError
from bigit.planner import B, F, mm_priority, stop_clause, stop_condition
from bigit.rgg import GOAL, KNN, START, ConnectionStrategy, RandomGeometricGraph, SampleSet
from bigit.scene import Aabb, Scene
from bigit.search import TreeSearch
from bigit.space import ProblemBounds
from bigit.trace import path_cost

from conftest import lazy_distances, run_lazy_phase


def test_mm_priority():
    assert mm_priority(2, 5) == 7
    assert mm_priority(5, 2) == 10
    assert mm_priority(0, 0.6) == 0.6


@pytest.mark.parametrize("u,pf,pb,want,clause", [
    (10, 9, 12, True, "mean"),
    (10, 11, 12, True, "min"),
    (10, 8, 9, False, ""),
    (10, math.inf, math.inf, True, "min"),
    (math.inf, math.inf, math.inf, True, "min"),
])
def test_stop_condition(u, pf, pb, want, clause):
    assert stop_condition(u, pf, pb) is want
    assert stop_clause(u, pf, pb) == clause


def chain_planner():
    """s - a - g with unit-free costs 0.3; a small block kills the direct edge."""
    s, g = np.array([0.2, 0.5]), np.array([0.6, 0.5])
    a = np.array([0.4, 0.5 + math.sqrt(0.05)])
    scene = Scene(ProblemBounds.unit(2), [Aabb(np.array([0.38, 0.4]), np.array([0.42, 0.6]))])
    p = BigitPlanner(scene, s, g, PlannerConfig(max_batches=1), RngStream(0),
                     initial_samples=a[None, :])
    p.step()
    p.step()
    return p


def test_lazy_search_on_chain_meets_in_the_middle():
    p = chain_planner()
    lz = p.lazy
    assert lz.meet == 2
    assert lz.u == pytest.approx(0.6, abs=1e-12)
    assert lz.g[F][2] == pytest.approx(0.3, abs=1e-12)
    assert lz.g[B][2] == pytest.approx(0.3, abs=1e-12)
    assert p.stats["sparse_failures"] == 1  # the blocked direct edge


def test_guidance_on_chain():
    p = chain_planner()
    hf = p.searches[F].h_guid
    assert hf[START] == pytest.approx(0.6, abs=1e-12)
    assert hf[2] == pytest.approx(0.3, abs=1e-12)
    assert p.searches[B].h_guid[GOAL] == pytest.approx(0.6, abs=1e-12)
    result = p.plan()
    assert result.cost == pytest.approx(0.6, abs=1e-12)
    assert len(result.path) == 3


def test_lazy_search_empty_scene_direct_edge():
    d = empty(2)
    p = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(max_batches=1), RngStream(0),
                     initial_samples=np.empty((0, 2)))
    p.step()
    p.step()
    assert p.lazy.meet in (START, GOAL)
    assert p.lazy.u == pytest.approx(0.6, abs=1e-12)
    assert p.plan().cost == pytest.approx(0.6, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_lazy_cost_equals_graph_distance(seed):
    p = run_lazy_phase(wall_gap(2), seed)
    lz = p.lazy
    removed = frozenset(lz.invalid)
    assert lz.u == pytest.approx(lazy_distances(p.graph, START, removed)[GOAL], abs=1e-9)
    assert lz.u >= lazy_distances(p.graph, START)[GOAL] - 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_guidance_bounds(seed):
    p = run_lazy_phase(wall_gap(2), seed)
    for d, lb in ((F, p.samples.to_goal), (B, p.samples.to_start)):
        for y, h in p.searches[d].h_guid.items():
            assert h >= lb[y] - 1e-12


def test_empty_scene_one_batch_is_direct():
    d = empty(2)
    r = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(max_batches=1), RngStream(2)).plan()
    assert r.cost == pytest.approx(0.6, abs=1e-9)
    assert len(r.path) == 2


def test_empty_scene_time_budget():
    d = empty(2)
    r = BigitPlanner(d.scene, d.start, d.goal, rng=RngStream(1)).plan(budget_s=1.0)
    assert r.cost == pytest.approx(0.6, abs=1e-9)
    assert r.solution_events()[0].wall_time_s < 0.1


def test_start_equals_goal():
    d = empty(2)
    r = BigitPlanner(d.scene, d.start, d.start, rng=RngStream(0)).plan(budget_s=1.0)
    assert r.cost == 0.0 and len(r.path) == 1


def test_invalid_query_is_rejected():
    d = wall_gap(2)
    with pytest.raises(UsageError):
        BigitPlanner(d.scene, [0.5, 0.3], d.goal)
    with pytest.raises(UsageError):
        PlannerConfig(lazy_refresh="sometimes")


def test_no_solution_is_a_result_not_an_error():
    scene = Scene(ProblemBounds.unit(2), [Aabb(np.array([0.45, 0.0]), np.array([0.55, 1.0]))])
    r = BigitPlanner(scene, [0.2, 0.5], [0.8, 0.5], PlannerConfig(max_batches=3),
                     RngStream(0)).plan()
    assert not r.success and r.path == [] and r.solution_events() == []


@pytest.mark.parametrize("cfg", [
    {}, {"normalize_keys": True}, {"lazy_refresh": "every"}, {"seed_all_meeting": False},
    {"connection": "rdisc"}, {"sparse_level": 2},
])
def test_wall_gap_converges_under_each_option(cfg):
    d = wall_gap(2)
    r = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(max_batches=25, **cfg),
                     RngStream(4)).plan()
    assert r.success
    assert r.cost <= 1.05 * WALL_GAP_OPTIMUM
    assert r.cost >= WALL_GAP_OPTIMUM - 1e-9
    costs = [e.cost for e in r.solution_events()]
    assert all(a > b for a, b in zip(costs, costs[1:]))
    assert path_cost(r.path) == pytest.approx(r.cost, abs=1e-9)
    assert all(d.scene.edge_valid_full(a, b) for a, b in zip(r.path, r.path[1:]))


def test_extract_path_forward_only_meet():
    d = empty(2)
    p = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(max_batches=1), RngStream(0))
    r = p.plan()
    assert p.meet in (START, GOAL)
    assert p.best_path[0] == START and p.best_path[-1] == GOAL
    assert path_cost(r.path) == pytest.approx(p.u_e, abs=1e-12)


def test_record_accessor():
    p = chain_planner()
    p.plan()
    rec = p.record(2, F)
    assert rec.in_tree and rec.parent == START
    assert p.record(START, F).expanded_lazy and p.record(GOAL, B).expanded_lazy
    assert rec.g == pytest.approx(0.3, abs=1e-12)
    assert rec.h_guid == pytest.approx(0.3, abs=1e-12)
    assert p.record(START, F).parent is None


# expand_vertex -------------------------------------------------------------------


class Owner:
    def __init__(self, u=math.inf):
        self.u_e = u
        self.changed = []

    def edge_valid(self, a, b):
        return True

    def on_cost_change(self, search, x):
        self.changed.append(x)


def fan(points):
    s = SampleSet([0.0, 0.0], [1.0, 0.0])
    s.add(np.asarray(points, float), 1)
    g = RandomGeometricGraph(s, ConnectionStrategy(KNN, 1.001, 2))
    g.rebuild()
    return s, g


def test_expand_enqueues_every_improving_edge_without_incumbent():
    s, g = fan([[0.2, 0.1], [0.3, -0.1], [0.5, 0.3]])
    t = TreeSearch(Owner(), g, START, s.to_start, s.to_goal)
    t.ensure(len(s))
    t.expand(START)
    assert sorted(e[3] for e in t.queue) == sorted(v for v, _ in g.neighbors(START))
    assert len(t.queue) == len(g.neighbors(START))


def test_expand_skips_non_improving_edge():
    s, g = fan([[0.2, 0.1], [0.3, -0.1], [0.5, 0.3]])
    t = TreeSearch(Owner(), g, START, s.to_start, s.to_goal)
    t.ensure(len(s))
    t.ghat[2] = 0.0
    t.expand(START)
    assert 2 not in [e[3] for e in t.queue]


def test_expand_gate_rejects_when_both_clauses_fail():
    # g(x)=0.6, c=0.2, h=0.3 gives key 1.1 > U=1.0 and g > U/2.
    s, g = fan([[0.5, 0.0], [0.7, 0.0]])
    owner = Owner(1.0)
    t = TreeSearch(owner, g, START, s.to_start, s.to_goal)
    t.ensure(len(s))
    t.g[2] = 0.6
    t.ghat[2] = 0.6
    t.h_guid[3] = 0.3
    t.expand(2)
    assert 3 not in [e[3] for e in t.queue]
    owner.u_e = 1.2
    t.expanded_g.clear()
    t.expand(2)
    assert 3 in [e[3] for e in t.queue]


def test_broken_parent_chain_is_an_invariant_error():
    s, g = fan([[0.5, 0.0]])
    t = TreeSearch(Owner(), g, START, s.to_start, s.to_goal)
    t.ensure(len(s))
    t.g[2] = 0.5
    with pytest.raises(InvariantError):
        t.path_to_root(2)


def test_guided_step_takes_the_smaller_key():
    d = wall_gap(2)
    p = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(max_batches=1), RngStream(3))
    p.step()
    p.step()
    fq, bq = p.searches
    while p.phase == "guided" and fq.queue and bq.queue and not p.finished:
        pf, pb = fq.min_key(), bq.min_key()
        if stop_condition(p.u_e, pf, pb):
            break
        before = (fq.pops, bq.pops)
        p.step()
        want = (before[0] + 1, before[1]) if pf <= pb else (before[0], before[1] + 1)
        assert (fq.pops, bq.pops) == want
