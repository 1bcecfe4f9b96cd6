"""Planner events and results."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FIRST_SOLUTION = "first_solution"
IMPROVED_SOLUTION = "improved_solution"
BATCH_ADDED = "batch_added"
PRUNED = "pruned"
SOLUTION_KINDS = (FIRST_SOLUTION, IMPROVED_SOLUTION)


@dataclass(frozen=True)
class PlannerEvent:
    wall_time_s: float
    kind: str
    cost: float
    detail: str = ""


@dataclass
class PlanResult:
    path: list[np.ndarray]
    cost: float
    events: list[PlannerEvent]
    stats: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return math.isfinite(self.cost)

    def solution_events(self) -> list[PlannerEvent]:
        return [e for e in self.events if e.kind in SOLUTION_KINDS]


def path_cost(path) -> float:
    return float(sum(math.dist(a, b) for a, b in zip(path, path[1:])))
