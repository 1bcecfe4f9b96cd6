"""Benchmark domains, trial harness, aggregation and CLI."""
from .domains import WALL_GAP_OPTIMUM, Domain, build_domain, enclosure, empty, map_domain, wall_gap
from .harness import PLANNERS, TrialResult, run_benchmark, run_trial
from .report import AggregateReport, CurveSummary, aggregate, emit_outputs, median_ci

__all__ = [
    "AggregateReport", "CurveSummary", "Domain", "PLANNERS", "TrialResult", "WALL_GAP_OPTIMUM",
    "aggregate", "build_domain", "emit_outputs", "empty", "enclosure", "map_domain", "median_ci",
    "run_benchmark", "run_trial", "wall_gap",
]
