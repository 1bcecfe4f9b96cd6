"""Bidirectional guidance informed trees for sampling-based motion planning."""
from .anytime import PlannerConfig
from .baseline import BitStarPlanner, ExplicitGraph, GridWorld, dijkstra_rgg_oracle, grid_dijkstra_oracle
from .errors import BigitError, InfeasibleSamplingError, InvariantError, PgmError, UsageError
from .kernels import BACKEND
from .planner import BigitPlanner, mm_priority, stop_condition
from .scene import Aabb, RasterMap, Scene, load_raster_map
from .space import InformedSampler, ProblemBounds, RngStream
from .trace import PlannerEvent, PlanResult

__version__ = "0.1.0"

__all__ = [
    "Aabb", "BACKEND", "BigitError", "BigitPlanner", "BitStarPlanner", "ExplicitGraph", "GridWorld",
    "InfeasibleSamplingError", "InformedSampler", "InvariantError", "PgmError", "PlanResult",
    "PlannerConfig", "PlannerEvent", "ProblemBounds", "RasterMap", "RngStream", "Scene", "UsageError",
    "dijkstra_rgg_oracle", "grid_dijkstra_oracle", "load_raster_map", "mm_priority", "stop_condition",
]
