"""Batching, pruning, incumbent tracking and event logging shared by planners."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .rgg import GOAL, START, ConnectionStrategy, RandomGeometricGraph, SampleSet, add_batch, prune
from .scene import Scene
from .space import InformedSampler, RngStream, as_state
from .trace import BATCH_ADDED, FIRST_SOLUTION, IMPROVED_SOLUTION, PRUNED, PlannerEvent, PlanResult

INF = math.inf


@dataclass
class PlannerConfig:
    batch_size: int = 100
    connection: str = "knn"
    eta: float = 1.001
    sparse_level: int | None = None
    seed_all_meeting: bool = True
    normalize_keys: bool = False
    lazy_refresh: str = "first"
    max_batches: int | None = None

    def __post_init__(self):
        if self.batch_size <= 0:
            raise UsageError("batch_size must be positive")
        if self.lazy_refresh not in ("first", "every"):
            raise UsageError("lazy_refresh must be 'first' or 'every'")
        if self.max_batches is not None and self.max_batches < 1:
            raise UsageError("max_batches must be at least 1")


class AnytimePlanner:
    """Owns the sample set, graph, incumbent and event log.

    Subclasses implement ``_first_search`` (called after the first batch),
    ``_search_step`` (one unit of work, returns False when the current
    batch is exhausted) and ``_after_batch``.
    """

    name = "anytime"

    def __init__(self, scene: Scene, start, goal, config: PlannerConfig | None = None,
                 rng: RngStream | None = None, initial_samples=None):
        self.scene = scene
        self.config = config or PlannerConfig()
        self.rng = rng or RngStream(0)
        start = as_state(start, dim=scene.dim)
        goal = as_state(goal, dim=scene.dim)
        if not scene.state_valid(start):
            raise UsageError("start state is not valid in the scene")
        if not scene.state_valid(goal):
            raise UsageError("goal state is not valid in the scene")
        self.start, self.goal = start, goal
        self.samples = SampleSet(start, goal)
        self.strategy = ConnectionStrategy(self.config.connection, self.config.eta, scene.dim)
        self.graph = RandomGeometricGraph(self.samples, self.strategy)
        self.sampler = InformedSampler(start, goal)
        self.initial_samples = None if initial_samples is None else np.asarray(initial_samples, float)
        self.u_e = INF
        self.meet: int | None = None
        self.best_path: list[int] = []
        self.events: list[PlannerEvent] = []
        self.batches = 0
        self.finished = False
        self._validity: dict[tuple[int, int], bool] = {}
        self.stats = {"collision_checks": 0, "edge_pops": 0, "pruned": 0}
        self._t0 = time.perf_counter()

    # bookkeeping --------------------------------------------------------------

    def _now(self) -> float:
        return time.perf_counter() - self._t0

    def _log(self, kind: str, cost: float, detail: str = ""):
        self.events.append(PlannerEvent(self._now(), kind, cost, detail))

    def edge_valid(self, a: int, b: int) -> bool:
        key = (a, b) if a < b else (b, a)
        hit = self._validity.get(key)
        if hit is None:
            self.stats["collision_checks"] += 1
            hit = self.scene.edge_valid_full(self.samples.state(a), self.samples.state(b))
            self._validity[key] = hit
        return hit

    def _improve(self, cost: float, meet: int, path: list[int]):
        kind = FIRST_SOLUTION if math.isinf(self.u_e) else IMPROVED_SOLUTION
        self.u_e = cost
        self.meet = meet
        self.best_path = path
        self._log(kind, cost)

    def measure(self) -> float:
        full = self.scene.bounds.measure
        if math.isinf(self.u_e):
            return full
        return min(full, self.sampler.with_cost(self.u_e).measure())

    # batches ------------------------------------------------------------------

    def _add_batch(self):
        if self.batches == 0 and self.initial_samples is not None:
            ids = self.samples.add(self.initial_samples, batch=1)
        else:
            ids = add_batch(self.samples, self.sampler, self.config.batch_size, self.u_e,
                            self.scene, self.rng, batch=self.batches + 1)
        self.batches += 1
        self.graph.rebuild(self.measure())
        self._log(BATCH_ADDED, self.u_e, f"batch={self.batches} added={len(ids)}")

    def _prune(self):
        if math.isinf(self.u_e):
            return 0
        removed = prune(self.samples, self.start, self.goal, self.u_e, protect=self.best_path)
        if removed:
            self.stats["pruned"] += removed
            self._log(PRUNED, self.u_e, f"removed={removed}")
        return removed

    def _end_batch(self, detail: str = ""):
        """Finish the current batch: stop, or prune and sample the next one."""
        if self.config.max_batches is not None and self.batches >= self.config.max_batches:
            self.finished = True
            return
        self._prune()
        self._add_batch()
        self._after_batch()

    # driver -------------------------------------------------------------------

    def step(self) -> bool:
        """Advance by one unit of work; returns False once the run is over."""
        if self.finished:
            return False
        if self.batches == 0:
            if self.samples.tuples[START] == self.samples.tuples[GOAL]:
                self._improve(0.0, START, [START])
                self.finished = True
                return False
            self._add_batch()
            self._first_search()
            return True
        self._search_step()
        return not self.finished

    def plan(self, budget_s: float = INF, max_batches: int | None = None) -> PlanResult:
        if max_batches is not None:
            self.config.max_batches = max_batches
        self._t0 = time.perf_counter()
        deadline = self._t0 + budget_s
        while not self.finished and time.perf_counter() < deadline:
            self.step()
        return self.result()

    def result(self) -> PlanResult:
        path = [self.samples.state(i).copy() for i in self.best_path]
        stats = dict(self.stats, batches=self.batches, samples=len(self.samples))
        return PlanResult(path, self.u_e, list(self.events), stats)

    def _first_search(self):
        raise NotImplementedError

    def _search_step(self):
        raise NotImplementedError

    def _after_batch(self):
        raise NotImplementedError
