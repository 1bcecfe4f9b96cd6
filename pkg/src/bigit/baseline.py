"""BIT* reference planner and exact shortest-path oracles."""
from __future__ import annotations

import heapq
import math

import numpy as np

from . import kernels
from .anytime import AnytimePlanner, PlannerConfig
from .errors import UsageError
from .rgg import GOAL, KNN, START, ConnectionStrategy, SampleSet, connection_param
from .scene import Scene
from .search import TreeSearch
from .space import as_state

INF = math.inf


class BitStarPlanner(AnytimePlanner):
    """Single forward edge queue keyed by g + c + Euclidean cost-to-go."""

    name = "bitstar"

    def __init__(self, scene, start, goal, config: PlannerConfig | None = None, rng=None,
                 initial_samples=None):
        super().__init__(scene, start, goal, config, rng, initial_samples)
        s = self.samples
        self.tree = TreeSearch(self, self.graph, START, s.to_start, s.to_goal,
                               half_gate=False, strict_gate=True)
        self.tree.direction = 0

    def on_cost_change(self, search, x: int):
        if x == GOAL and search.g[GOAL] < self.u_e:
            self._improve(search.g[GOAL], GOAL, search.path_to_root(GOAL)[::-1])

    def _can_improve(self, new: float, dst: int) -> bool:
        return new + self.samples.to_goal[dst] < self.u_e

    def _restart(self):
        t = self.tree
        t.ensure(len(self.samples))
        t.drop_dead()
        t.reset_epoch()
        t.expand(START)

    def _first_search(self):
        self._restart()

    def _after_batch(self):
        self._restart()

    def _search_step(self):
        t = self.tree
        if self.u_e <= t.min_key():
            self._end_batch("queue")
            return
        _, x, v = t.pop()
        self.stats["edge_pops"] += 1
        t.process(x, v, self._can_improve)


# oracles --------------------------------------------------------------------


class ExplicitGraph:
    """Fully materialised RGG built by brute force; mirrors the planners' graph."""

    def __init__(self, ids, states, adjacency: dict[int, list[tuple[int, float]]]):
        self.ids = list(ids)
        self.states = {i: np.asarray(s, float) for i, s in zip(self.ids, states)}
        self.adjacency = adjacency
        self._valid: dict[tuple[int, int], bool] = {}

    @classmethod
    def from_samples(cls, samples: SampleSet, strategy: ConnectionStrategy, measure: float = 1.0):
        ids = [i for i in range(len(samples)) if samples.alive[i]]
        pts = [samples.tuples[i] for i in ids]
        q = len(ids)
        edges: set[tuple[int, int]] = set()
        if q >= 2:
            param = connection_param(strategy, q, measure)
            for a in range(q):
                ranked = sorted((math.dist(pts[a], pts[b]), ids[b]) for b in range(q) if b != a)
                if strategy.mode == KNN:
                    chosen = [j for _, j in ranked[:param]]
                else:
                    chosen = [j for d, j in ranked if d <= param]
                for j in chosen:
                    edges.add((ids[a], j))
                    edges.add((j, ids[a]))
        edges.add((START, GOAL))
        edges.add((GOAL, START))
        where = dict(zip(ids, pts))
        adjacency: dict[int, list[tuple[int, float]]] = {i: [] for i in ids}
        for a, b in sorted(edges):
            adjacency[a].append((b, math.dist(where[a], where[b])))
        return cls(ids, pts, adjacency)

    def edge_valid(self, scene: Scene, a: int, b: int) -> bool:
        key = (min(a, b), max(a, b))
        hit = self._valid.get(key)
        if hit is None:
            hit = self._valid[key] = scene.edge_valid_full(self.states[a], self.states[b])
        return hit


def dijkstra_rgg_oracle(graph: ExplicitGraph, source: int, collision_aware: bool = False,
                        scene: Scene | None = None) -> dict[int, float]:
    """Exact single-source distances over ``graph``; unreachable vertices map to inf."""
    if collision_aware and scene is None:
        raise UsageError("collision-aware distances need a scene")
    dist = {i: INF for i in graph.ids}
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y, c in graph.adjacency[x]:
            nd = d + c
            if nd < dist[y] and (not collision_aware or graph.edge_valid(scene, x, y)):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


class GridWorld:
    """8-connected lattice over a planar scene; a cell is free iff its centre is valid."""

    def __init__(self, scene: Scene, resolution):
        if scene.dim != 2:
            raise UsageError("grid oracle is planar only")
        nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
        self.scene = scene
        self.nx, self.ny = int(nx), int(ny)
        lo, hi = scene.bounds.lower, scene.bounds.upper
        self.lo = np.asarray(lo, float)
        self.dx = (hi[0] - lo[0]) / self.nx
        self.dy = (hi[1] - lo[1]) / self.ny
        xs = self.lo[0] + (np.arange(self.nx) + 0.5) * self.dx
        ys = self.lo[1] + (np.arange(self.ny) + 0.5) * self.dy
        gx, gy = np.meshgrid(xs, ys)
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        self.free = scene.points_valid(centers).reshape(self.ny, self.nx).astype(np.uint8)

    def cell_of(self, x) -> tuple[int, int]:
        x = as_state(x, dim=2)
        col = min(self.nx - 1, max(0, int((x[0] - self.lo[0]) / self.dx)))
        row = min(self.ny - 1, max(0, int((x[1] - self.lo[1]) / self.dy)))
        return row, col

    def center(self, row: int, col: int) -> np.ndarray:
        return self.lo + np.array([(col + 0.5) * self.dx, (row + 0.5) * self.dy])


def _shortcut(scene: Scene, pts: list[np.ndarray]) -> list[np.ndarray]:
    out = [pts[0]]
    i = 0
    n = len(pts)
    while i < n - 1:
        # Greedy: jump to the furthest waypoint a bisection finds visible.
        lo, hi = i + 1, n - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if scene.edge_valid_full(pts[i], pts[mid]):
                lo = mid
            else:
                hi = mid - 1
        out.append(pts[lo])
        i = lo
    return out


def grid_path(world: GridWorld, start, goal) -> list[np.ndarray]:
    """Lattice path from ``start`` to ``goal`` after line-of-sight shortcutting ([] if none)."""
    s, g = world.cell_of(start), world.cell_of(goal)
    if not (world.free[s] and world.free[g]):
        raise UsageError("start or goal cell is blocked")
    src = s[0] * world.nx + s[1]
    dist, pred = kernels.grid_dijkstra(world.free, world.dx, world.dy, src)
    tgt = g[0] * world.nx + g[1]
    if not math.isfinite(dist[tgt]):
        return []
    cells = [tgt]
    while cells[-1] != src:
        cells.append(int(pred[cells[-1]]))
    cells.reverse()
    pts = [as_state(start, 2)]
    pts += [world.center(c // world.nx, c % world.nx) for c in cells[1:-1]]
    pts.append(as_state(goal, 2))
    return _shortcut(world.scene, pts)


def grid_dijkstra_oracle(world: GridWorld, start, goal) -> float:
    path = grid_path(world, start, goal)
    if not path:
        return INF
    return float(sum(math.dist(a, b) for a, b in zip(path, path[1:])))
