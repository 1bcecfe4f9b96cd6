"""Acceptance criteria, each run at its stated scale and tolerance.

Criteria 4, 5 and 9 are long (minutes to tens of minutes on one core) and
carry the ``slow`` marker; they still run by default.
"""
import csv
import math
import os
import statistics
import time

import numpy as np
import pytest

from bigit import BigitPlanner, BitStarPlanner, PlannerConfig, RngStream
from bigit.baseline import ExplicitGraph, dijkstra_rgg_oracle
from bigit.bench import cli
from bigit.bench.domains import WALL_GAP_OPTIMUM, enclosure, wall_gap
from bigit.bench.harness import run_benchmark
from bigit.bench.report import emit_outputs
from bigit.planner import B, F, mm_priority
from bigit.rgg import GOAL, START

from conftest import record_criterion, run_lazy_phase, valid_points

JOBS = os.cpu_count() or 1
RECORDED = []  # trials from the timed criteria, re-checked by criterion 7


def test_criterion_1_admissibility():
    t0 = time.perf_counter()
    checked = violations = 0
    worst = 0.0
    for seed in range(50):
        p = run_lazy_phase(wall_gap(2), seed, batch_size=100)
        graph = ExplicitGraph.from_samples(p.samples, p.strategy, p.measure())
        for d, root in ((F, GOAL), (B, START)):
            dist = dijkstra_rgg_oracle(graph, root, True, p.scene)
            for y, h in p.searches[d].h_guid.items():
                checked += 1
                excess = h - dist[y]
                worst = max(worst, excess)
                violations += excess > 1e-9
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and checked > 0 and elapsed < 30.0
    record_criterion(1, ok, f"{violations} of {checked} guidance values above the oracle "
                            f"(worst excess {worst:.3g}), {elapsed:.1f} s")
    assert ok


def test_criterion_2_lower_bound_chain():
    t0 = time.perf_counter()
    checks = violations = steps = 0
    biggest = 0
    for seed in range(20):
        d = wall_gap(2)
        p = BigitPlanner(d.scene, d.start, d.goal, PlannerConfig(batch_size=29, max_batches=2),
                         RngStream(seed))
        lbs = {F: p.samples.to_start, B: p.samples.to_goal}
        while p.step():
            steps += 1
            for direction in (F, B):
                lb = lbs[direction]
                for x in range(len(p.samples)):
                    r = p.record(x, direction)
                    if math.isfinite(r.g_hat):
                        checks += 1
                        violations += not (lb[x] <= r.g_hat)
                        if math.isfinite(r.g):
                            violations += not (r.g_hat <= r.g)
                    if math.isfinite(r.g):
                        violations += not (lb[x] <= r.g)
        biggest = max(biggest, len(p.samples))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and biggest <= 60 and elapsed < 10.0
    record_criterion(2, ok, f"{violations} violations over {checks} records in {steps} steps "
                            f"(max {biggest} states), {elapsed:.1f} s")
    assert ok


def test_criterion_3_meet_in_the_middle():
    violations = expanded = 0
    for seed in range(50):
        lz = run_lazy_phase(wall_gap(2), seed).lazy
        for d in (F, B):
            for v in range(len(lz.g[d])):
                if lz.closed[d][v]:
                    expanded += 1
                    violations += mm_priority(lz.g[d][v], lz.lb_go[d][v]) > lz.u + 1e-9
    ok = violations == 0 and expanded > 0
    record_criterion(3, ok, f"{violations} of {expanded} lazily expanded vertices above the lazy cost")
    assert ok


@pytest.mark.slow
def test_criterion_4_convergence():
    report, results = run_benchmark([wall_gap(2)], ["bigit"], 50, 5.0, JOBS,
                                    config=PlannerConfig(batch_size=100))
    RECORDED.extend(results)
    c = report.get("wallgap_r2", "bigit")
    ok = c.final_success_rate == 1.0 and c.median_final_cost <= 1.02 * WALL_GAP_OPTIMUM
    record_criterion(4, ok, f"success {c.final_success_rate:.2f}, median cost {c.median_final_cost:.5f} "
                            f"vs bound {1.02 * WALL_GAP_OPTIMUM:.5f}")
    assert ok


@pytest.mark.slow
def test_criterion_5_enclosure_r16():
    report, results = run_benchmark([enclosure(16)], ["bigit"], 20, 100.0, JOBS,
                                    config=PlannerConfig(batch_size=100))
    RECORDED.extend(results)
    c = report.get("enclosure_r16", "bigit")
    ok = c.final_success_rate >= 0.9
    record_criterion(5, ok, f"success {c.final_success_rate:.2f} over 20 seeds, "
                            f"median first solution {c.median_first_solution_time_s:.3g} s")
    assert ok


def test_criterion_6_oracle_equivalence():
    mismatches = 0
    worst = 0.0
    solved = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        d = wall_gap(2)
        pts = valid_points(d.scene, rng, int(rng.integers(20, 59)))
        costs = []
        for cls in (BigitPlanner, BitStarPlanner):
            p = cls(d.scene, d.start, d.goal, PlannerConfig(max_batches=1), RngStream(seed),
                    initial_samples=pts)
            costs.append(p.plan().cost)
            assert len(p.samples) <= 60
        graph = ExplicitGraph.from_samples(p.samples, p.strategy, p.measure())
        want = dijkstra_rgg_oracle(graph, START, True, d.scene)[GOAL]
        solved += math.isfinite(want)
        for c in costs:
            if math.isinf(want) or math.isinf(c):
                mismatches += c != want
            else:
                worst = max(worst, abs(c - want))
                mismatches += abs(c - want) > 1e-9
    ok = mismatches == 0
    record_criterion(6, ok, f"{mismatches} mismatches on 20 graphs ({solved} solvable), "
                            f"worst gap {worst:.2g}")
    assert ok


def _anytime_ok(trial, scene, start, goal):
    costs = [e.cost for e in trial.solution_events()]
    if any(a <= b for a, b in zip(costs, costs[1:])):
        return False
    if not trial.success:
        return not trial.path
    path = trial.path
    if not (np.array_equal(path[0], start) and np.array_equal(path[-1], goal)):
        return False
    full = scene.with_segments(200)
    return all(full.edge_valid_full(a, b) for a, b in zip(path, path[1:]))


def test_criterion_7_anytime_contract():
    domains = [wall_gap(2), enclosure(4), wall_gap(8)]
    _, own = run_benchmark(domains, ["bigit", "bitstar"], 8, math.inf,
                           config=PlannerConfig(max_batches=15))
    by_key = {(d.name, d.dim): d for d in domains + [wall_gap(2), enclosure(16)]}
    bad = 0
    trials = own + RECORDED
    for t in trials:
        d = by_key[(t.domain, t.dim)]
        bad += not _anytime_ok(t, d.scene, d.start, d.goal)
    ok = bad == 0
    record_criterion(7, ok, f"{bad} of {len(trials)} trials break the anytime contract")
    assert ok


def _cost_columns(path):
    with open(path, newline="") as fh:
        return [(r["planner"], r["seed"], r["event_cost"], r["final_cost"])
                for r in csv.DictReader(fh)]


def test_criterion_8_determinism(tmp_path):
    base = ["--domain", "wallgap", "--trials", "4", "--max-batches", "8"]
    runs = {}
    for tag, jobs in (("a", "1"), ("b", "1"), ("c", "2")):
        assert cli.main(base + ["--jobs", jobs, "--out", str(tmp_path / tag)]) == 0
        runs[tag] = _cost_columns(tmp_path / tag / "raw.csv")
    ok = runs["a"] == runs["b"] == runs["c"] and len(runs["a"]) > 8
    record_criterion(8, ok, f"{len(runs['a'])} raw rows identical across reruns and --jobs 1/2")
    assert ok


@pytest.mark.slow
def test_criterion_9_comparative_report(tmp_path):
    dom = wall_gap(8)
    report, results = run_benchmark([dom], ["bigit", "bitstar"], 50, 30.0, JOBS,
                                    config=PlannerConfig(batch_size=100))
    RECORDED.extend(results)
    written = emit_outputs(report, results, tmp_path)
    big = report.get("wallgap_r8", "bigit")
    bit = report.get("wallgap_r8", "bitstar")
    curves = [p for p in written if p.endswith(".tsv")]
    ok = (len(curves) == 2 and math.isfinite(big.median_first_solution_time_s)
          and big.median_final_cost <= bit.median_final_cost + 1e-6)
    record_criterion(9, ok, f"median first solution bigit {big.median_first_solution_time_s:.3g} s / "
                            f"bitstar {bit.median_first_solution_time_s:.3g} s; median cost at budget "
                            f"bigit {big.median_final_cost:.5f} / bitstar {bit.median_final_cost:.5f}")
    assert ok
