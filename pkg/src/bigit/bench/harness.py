"""Trial runner and benchmark driver."""
from __future__ import annotations

import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from ..anytime import PlannerConfig
from ..baseline import BitStarPlanner
from ..errors import BigitError, UsageError
from ..planner import BigitPlanner
from ..space import RngStream
from ..trace import PlannerEvent
from .domains import Domain

PLANNERS = {"bigit": BigitPlanner, "bitstar": BitStarPlanner}


@dataclass
class TrialResult:
    planner: str
    domain: str
    dim: int
    seed: int
    success: bool
    first_solution_time_s: float
    final_cost: float
    events: list[PlannerEvent] = field(default_factory=list)
    path: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    error: str = ""

    def solution_events(self) -> list[PlannerEvent]:
        return [e for e in self.events if e.kind in ("first_solution", "improved_solution")]


def run_trial(domain: Domain, planner_kind: str, seed: int, budget: float,
              config: PlannerConfig | None = None) -> TrialResult:
    """Run one seeded planner on ``domain``; internal failures are reported, not raised."""
    cls = PLANNERS.get(planner_kind)
    if cls is None:
        raise UsageError(f"unknown planner {planner_kind!r}")
    cfg = replace(config) if config is not None else PlannerConfig(
        batch_size=domain.batch_size, connection=domain.connection)
    base = dict(planner=planner_kind, domain=domain.name, dim=domain.dim, seed=seed)
    try:
        planner = cls(domain.scene, domain.start, domain.goal, cfg, RngStream(seed))
        result = planner.plan(budget_s=budget)
    except BigitError as exc:
        return TrialResult(**base, success=False, first_solution_time_s=math.inf,
                           final_cost=math.inf, error=f"{type(exc).__name__}: {exc}")
    except Exception as exc:  # keep the batch going; the row records the failure
        return TrialResult(**base, success=False, first_solution_time_s=math.inf,
                           final_cost=math.inf,
                           error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=4)}")
    sol = result.solution_events()
    return TrialResult(**base, success=result.success,
                       first_solution_time_s=sol[0].wall_time_s if sol else math.inf,
                       final_cost=result.cost, events=result.events, path=result.path,
                       stats=result.stats)


def _run_one(job):
    return run_trial(*job)


def run_benchmark(domains, planners, trials: int, budget: float | None = None, jobs: int = 1,
                  seed_base: int = 0, config: PlannerConfig | None = None):
    """Run every (domain, planner, seed) combination; returns (report, trial results).

    Seeds are ``seed_base .. seed_base + trials - 1``; results come back in
    job order whatever the worker count.
    """
    from .report import aggregate

    if trials < 1:
        raise UsageError("trials must be at least 1")
    if jobs < 1:
        raise UsageError("jobs must be at least 1")
    work = []
    for dom in domains:
        cfg = config
        if cfg is None:
            cfg = PlannerConfig(batch_size=dom.batch_size, connection=dom.connection)
        b = dom.budget_s if budget is None else budget
        for name in planners:
            for i in range(trials):
                work.append((dom, name, seed_base + i, b, cfg))
    if jobs == 1:
        results = [_run_one(j) for j in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    budgets = {dom.label: (dom.budget_s if budget is None else budget) for dom in domains}
    return aggregate(results, budgets), results
