"""Aggregation of trial results into cost/success curves and output files."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binom

from ..errors import BigitError

GRID_POINTS = 61
RAW_COLUMNS = ("planner", "domain", "dim", "seed", "event_time_s", "event_cost", "success",
               "first_solution_time_s", "final_cost")


def median_ci(n: int, level: float = 0.95) -> tuple[int, int]:
    """0-based order-statistic indices bracketing the median of ``n`` sorted values."""
    if n <= 0:
        raise ValueError("need at least one value")
    alpha = (1.0 - level) / 2.0
    lo = max(int(binom.ppf(alpha, n, 0.5)) - 1, 0)
    hi = min(int(binom.ppf(1.0 - alpha, n, 0.5)), n - 1)
    return lo, hi


def cost_at(trial, t: float) -> float:
    best = math.inf
    for e in trial.solution_events():
        if e.wall_time_s <= t:
            best = e.cost
        else:
            break
    return best


def time_grid(budget: float, points: int = GRID_POINTS) -> np.ndarray:
    return np.geomspace(budget * 1e-3, budget, points)


@dataclass
class CurveSummary:
    planner: str
    domain: str
    dim: int
    trials: int
    budget_s: float
    times: list = field(default_factory=list)
    success_rate: list = field(default_factory=list)
    median_cost: list = field(default_factory=list)
    ci_low: list = field(default_factory=list)
    ci_high: list = field(default_factory=list)
    final_success_rate: float = 0.0
    median_first_solution_time_s: float = math.inf
    median_final_cost: float = math.inf
    failures: int = 0


@dataclass
class AggregateReport:
    curves: dict = field(default_factory=dict)  # (domain label, planner) -> CurveSummary

    def get(self, label: str, planner: str) -> CurveSummary:
        return self.curves[(label, planner)]


def summarize(trials, budget: float) -> CurveSummary:
    first = trials[0]
    if not math.isfinite(budget):
        stamps = [e.wall_time_s for t in trials for e in t.events]
        budget = max(stamps, default=1.0) or 1.0
    s = CurveSummary(first.planner, first.domain, first.dim, len(trials), budget)
    for t in time_grid(budget):
        costs = sorted(c for c in (cost_at(tr, t) for tr in trials) if math.isfinite(c))
        s.times.append(float(t))
        s.success_rate.append(len(costs) / len(trials))
        if costs:
            lo, hi = median_ci(len(costs))
            s.median_cost.append(float(np.median(costs)))
            s.ci_low.append(costs[lo])
            s.ci_high.append(costs[hi])
        else:
            s.median_cost.append(math.inf)
            s.ci_low.append(math.inf)
            s.ci_high.append(math.inf)
    solved = [tr for tr in trials if tr.success]
    s.final_success_rate = len(solved) / len(trials)
    # Unsolved trials count as infinite so the median reflects failures too.
    s.median_first_solution_time_s = float(np.median([tr.first_solution_time_s for tr in trials]))
    s.median_final_cost = float(np.median([tr.final_cost for tr in trials]))
    s.failures = sum(1 for tr in trials if tr.error)
    return s


def aggregate(results, budgets: dict) -> AggregateReport:
    groups: dict = {}
    for tr in results:
        groups.setdefault((f"{tr.domain}_r{tr.dim}", tr.planner), []).append(tr)
    report = AggregateReport()
    for key in sorted(groups):
        report.curves[key] = summarize(groups[key], budgets.get(key[0], math.inf))
    return report


def _num(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def raw_rows(results):
    for tr in results:
        common = (tr.planner, tr.domain, tr.dim, tr.seed)
        tail = (int(tr.success), _num(tr.first_solution_time_s), _num(tr.final_cost))
        events = tr.solution_events()
        if not events:
            yield common + ("", "") + tail
        for e in events:
            yield common + (_num(e.wall_time_s), _num(e.cost)) + tail


def emit_outputs(report: AggregateReport, results, out_dir) -> list[str]:
    """Write raw.csv, summary.json and one curve file per (domain, planner)."""
    written = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "raw.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RAW_COLUMNS)
            w.writerows(raw_rows(results))
        written.append(path)
        summary = {}
        for (label, planner), c in report.curves.items():
            d = asdict(c)
            for k in ("times", "success_rate", "median_cost", "ci_low", "ci_high"):
                d.pop(k)
            summary.setdefault(label, {})[planner] = {
                k: (v if not isinstance(v, float) or math.isfinite(v) else None) for k, v in d.items()}
            sub = os.path.join(out_dir, label)
            os.makedirs(sub, exist_ok=True)
            cpath = os.path.join(sub, f"curve_{planner}.tsv")
            with open(cpath, "w", newline="") as fh:
                w = csv.writer(fh, delimiter="\t", lineterminator="\n")
                w.writerow(("time_s", "success_rate", "median_cost", "ci_low", "ci_high"))
                for row in zip(c.times, c.success_rate, c.median_cost, c.ci_low, c.ci_high):
                    w.writerow(tuple(_num(v) for v in row))
            written.append(cpath)
        path = os.path.join(out_dir, "summary.json")
        with open(path, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    except OSError as exc:
        raise BigitError(f"cannot write outputs under {out_dir}: {exc}") from exc
    return written
