"""Built-in benchmark scenes and the user-map domain."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..rgg import KNN, RDISC
from ..scene import Aabb, Scene, load_raster_map
from ..space import ProblemBounds, as_state

# Planar footprints; extra axes are extruded over [0, 1].
WALL_GAP_BOXES = (
    ((0.40, 0.00), (0.60, 0.58)),
    ((0.40, 0.62), (0.60, 0.80)),
)
ENCLOSURE_BOXES = (
    ((0.30, 0.20), (0.75, 0.22)),
    ((0.30, 0.78), (0.75, 0.80)),
    ((0.30, 0.20), (0.32, 0.58)),
    ((0.30, 0.59), (0.32, 0.78)),
)
WALL_GAP_OPTIMUM = 2.0 * math.hypot(0.2, 0.08) + 0.2
BUILTIN = ("wallgap", "enclosure", "empty")
ALL_DOMAINS = BUILTIN + ("map",)


@dataclass(frozen=True)
class Domain:
    name: str
    dim: int
    scene: Scene
    start: np.ndarray
    goal: np.ndarray
    connection: str = KNN
    batch_size: int = 100
    budget_s: float = 100.0

    @property
    def label(self) -> str:
        return f"{self.name}_r{self.dim}"


def extrude(boxes, dim: int) -> list[Aabb]:
    if dim < 2:
        raise UsageError("domains need at least two dimensions")
    pad = dim - 2
    return [Aabb(np.array(lo + (0.0,) * pad), np.array(hi + (1.0,) * pad)) for lo, hi in boxes]


def _lift(xy, dim: int) -> np.ndarray:
    return np.array(tuple(xy) + (0.5,) * (dim - 2))


def wall_gap(dim: int = 2, segments: int = 200) -> Domain:
    scene = Scene(ProblemBounds.unit(dim), extrude(WALL_GAP_BOXES, dim), collision_segments=segments)
    return Domain("wallgap", dim, scene, _lift((0.2, 0.5), dim), _lift((0.8, 0.5), dim))


def enclosure(dim: int = 2, segments: int = 200) -> Domain:
    scene = Scene(ProblemBounds.unit(dim), extrude(ENCLOSURE_BOXES, dim), collision_segments=segments)
    return Domain("enclosure", dim, scene, _lift((0.29, 0.5), dim), _lift((0.36, 0.5), dim))


def empty(dim: int = 2, segments: int = 200) -> Domain:
    scene = Scene(ProblemBounds.unit(dim), collision_segments=segments)
    return Domain("empty", dim, scene, _lift((0.2, 0.5), dim), _lift((0.8, 0.5), dim))


def _nearest_free(scene: Scene, target) -> np.ndarray:
    raster = scene.raster
    free = ~raster.occupancy
    rows, cols = np.nonzero(free)
    if rows.size == 0:
        raise UsageError("map has no free cells")
    mpp = raster.meters_per_pixel
    xs = raster.origin[0] + (cols + 0.5) * mpp
    ys = raster.origin[1] + (raster.height - 1 - rows + 0.5) * mpp
    i = int(np.argmin((xs - target[0]) ** 2 + (ys - target[1]) ** 2))
    return np.array([xs[i], ys[i]])


def map_domain(pgm: bytes, meters_per_pixel: float, start=None, goal=None,
               footprint_radius: float = 0.25, occupied_below: int = 128,
               segments: int = 200) -> Domain:
    """Planar map from PGM bytes; default query joins the free cells nearest two opposite corners."""
    raster = load_raster_map(pgm, meters_per_pixel, occupied_below).dilated(footprint_radius)
    scene = Scene(raster.bounds(), raster=raster, collision_segments=segments)
    lo, hi = scene.bounds.lower, scene.bounds.upper
    span = hi - lo
    start = _nearest_free(scene, lo + 0.1 * span) if start is None else as_state(start, 2)
    goal = _nearest_free(scene, lo + 0.9 * span) if goal is None else as_state(goal, 2)
    for what, x in (("start", start), ("goal", goal)):
        if not scene.state_valid(x):
            raise UsageError(f"{what} {tuple(x)} is blocked on the map")
    return Domain("map", 2, scene, start, goal, connection=RDISC, batch_size=6000, budget_s=2.0)


def build_domain(name: str, dim: int = 2, segments: int = 200, **map_args) -> Domain:
    if name == "wallgap":
        return wall_gap(dim, segments)
    if name == "enclosure":
        return enclosure(dim, segments)
    if name == "empty":
        return empty(dim, segments)
    if name == "map":
        if dim != 2:
            raise UsageError("the map domain is planar")
        return map_domain(segments=segments, **map_args)
    raise UsageError(f"unknown domain {name!r}")
