"""Sample store and the implicit random geometric graph over it.

The graph used by the planners is the symmetric closure of the k-nearest
(or r-disc) neighbour relation over alive samples, plus the direct
start-goal edge. Neighbour lists are built lazily per vertex and cached
until the next rebuild (after a batch or a prune).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InfeasibleSamplingError, UsageError
from .scene import Scene
from .space import MAX_REJECTIONS, InformedSampler, RngStream, as_state, sample_informed_many, \
    unit_ball_volume

KNN = "knn"
RDISC = "rdisc"
START, GOAL = 0, 1
PRUNE_SLACK = 1e-12


@dataclass(frozen=True)
class ConnectionStrategy:
    mode: str = KNN
    eta: float = 1.001
    dimension: int = 2

    def __post_init__(self):
        if self.mode not in (KNN, RDISC):
            raise UsageError(f"unknown connection mode {self.mode!r}")
        if self.eta < 1.0:
            raise UsageError("eta must be >= 1")
        if self.dimension < 2:
            raise UsageError("dimension must be >= 2")

    @property
    def unit_ball_volume(self) -> float:
        return unit_ball_volume(self.dimension)


def connection_param(strategy: ConnectionStrategy, q: int, measure: float = 1.0):
    """Neighbour count ``k`` (k-NN) or radius ``r`` (r-disc) for ``q`` graph vertices.

    ``measure`` is the Lebesgue measure of the sampled region (r-disc only).
    """
    if q < 2:
        raise UsageError("connection parameters need at least two vertices")
    n = strategy.dimension
    if strategy.mode == KNN:
        return math.ceil(strategy.eta * math.e * (1.0 + 1.0 / n) * math.log(q))
    return strategy.eta * 2.0 * ((1.0 + 1.0 / n) * (measure / strategy.unit_ball_volume)
                                 * (math.log(q) / q)) ** (1.0 / n)


class SampleSet:
    """Append-only store of states; id 0 is the start, id 1 the goal.

    Pruned states stay in the store as tombstones (``alive[i]`` false) so
    ids are never reused.
    """

    def __init__(self, start, goal):
        start = as_state(start)
        goal = as_state(goal, dim=start.shape[0])
        self.dim = start.shape[0]
        self._array = np.empty((64, self.dim))
        self.tuples: list[tuple[float, ...]] = []
        self.batch_of: list[int] = []
        self.alive: list[bool] = []
        self.to_start: list[float] = []
        self.to_goal: list[float] = []
        self._start = tuple(start.tolist())
        self._goal = tuple(goal.tolist())
        self.add(np.vstack([start, goal]), batch=0)

    def __len__(self) -> int:
        return len(self.tuples)

    @property
    def states(self) -> np.ndarray:
        return self._array[:len(self.tuples)]

    def state(self, i: int) -> np.ndarray:
        return self._array[i]

    def add(self, points: np.ndarray, batch: int) -> list[int]:
        points = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        first = len(self.tuples)
        need = first + points.shape[0]
        if need > self._array.shape[0]:
            grown = np.empty((max(need, 2 * self._array.shape[0]), self.dim))
            grown[:first] = self._array[:first]
            self._array = grown
        self._array[first:need] = points
        for row in points.tolist():
            t = tuple(row)
            self.tuples.append(t)
            self.batch_of.append(batch)
            self.alive.append(True)
            self.to_start.append(math.dist(t, self._start))
            self.to_goal.append(math.dist(t, self._goal))
        return list(range(first, need))

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(np.fromiter(self.alive, dtype=bool, count=len(self.alive)))

    def focal_sums(self) -> np.ndarray:
        return np.asarray(self.to_start) + np.asarray(self.to_goal)

    @property
    def q(self) -> int:
        return int(sum(self.alive))


class NeighborIndex:
    """k-NN and radius queries over the alive states of a ``SampleSet``.

    Backed by ``scipy.spatial.cKDTree``; k-NN ties are broken by lower id,
    so results match a brute-force scan exactly.
    """

    def __init__(self, samples: SampleSet):
        self.samples = samples
        self.ids = samples.alive_ids()
        self.points = np.ascontiguousarray(samples.states[self.ids])
        self.local = {int(g): i for i, g in enumerate(self.ids)}
        self.tree = cKDTree(self.points) if len(self.ids) else None

    def __len__(self) -> int:
        return len(self.ids)

    def _brute_row(self, i: int, k: int) -> np.ndarray:
        d = np.linalg.norm(self.points - self.points[i], axis=1)
        d[i] = np.inf
        order = np.lexsort((self.ids, d))
        return order[:k]

    def knn_table(self, k: int) -> np.ndarray:
        """Local indices of the k nearest other states for every alive state."""
        q = len(self.ids)
        k = min(k, q - 1)
        if k <= 0:
            return np.empty((q, 0), dtype=np.intp)
        want = min(k + 2, q)
        dist, idx = self.tree.query(self.points, k=want)
        dist = dist.reshape(q, want)
        idx = idx.reshape(q, want)
        table = np.empty((q, k), dtype=np.intp)
        rows = np.arange(q)
        # A row is clean when its first hit is itself, nothing else sits at
        # distance zero, and the k-th neighbour is not tied with the next.
        clean = (idx[:, 0] == rows) & (dist[:, 1] > 0.0)
        if want > k + 1:
            clean &= dist[:, k] < dist[:, k + 1]
        table[clean] = idx[clean, 1:k + 1]
        for i in np.flatnonzero(~clean):
            table[i] = self._brute_row(i, k)
        # Equal-distance neighbours inside the first k keep id order.
        return table

    def knn(self, x_id: int, k: int) -> list[int]:
        i = self.local[x_id]
        k = min(k, len(self.ids) - 1)
        if k <= 0:
            return []
        row = self._brute_row(i, k) if len(self.ids) <= 2 * k + 2 else None
        if row is None:
            want = min(k + 2, len(self.ids))
            dist, idx = self.tree.query(self.points[i], k=want)
            if idx[0] == i and dist[1] > 0.0 and (want <= k + 1 or dist[k] < dist[k + 1]):
                row = idx[1:k + 1]
            else:
                row = self._brute_row(i, k)
        d = np.linalg.norm(self.points[row] - self.points[i], axis=1)
        order = np.lexsort((self.ids[row], d))
        return [int(g) for g in self.ids[row][order]]

    def radius(self, x_id: int, r: float) -> list[int]:
        i = self.local[x_id]
        hits = self.tree.query_ball_point(self.points[i], r)
        return sorted(int(self.ids[j]) for j in hits if j != i)

    def radius_pairs(self, r: float) -> np.ndarray:
        return self.tree.query_pairs(r, output_type="ndarray")


def neighbors(index: NeighborIndex, x_id: int, strategy: ConnectionStrategy, q: int,
              measure: float = 1.0) -> list[int]:
    """The (directed) neighbour query: k nearest, or everything within r."""
    param = connection_param(strategy, q, measure)
    if strategy.mode == KNN:
        return index.knn(x_id, param)
    return index.radius(x_id, param)


class RandomGeometricGraph:
    """Implicit graph over a ``SampleSet``; edge costs are Euclidean lengths."""

    def __init__(self, samples: SampleSet, strategy: ConnectionStrategy):
        if strategy.dimension != samples.dim:
            raise UsageError("strategy dimension does not match the samples")
        self.samples = samples
        self.strategy = strategy
        self.version = 0
        self.param = None
        self._cache: dict[int, list[tuple[int, float]]] = {}
        self._indptr = np.zeros(1, dtype=np.intp)
        self._targets = np.empty(0, dtype=np.intp)
        self.index: NeighborIndex | None = None

    def rebuild(self, measure: float = 1.0):
        """Recompute the neighbour structure for the current alive set."""
        self.version += 1
        self._cache.clear()
        index = NeighborIndex(self.samples)
        self.index = index
        q = len(index)
        if q < 2:
            self._indptr = np.zeros(q + 1, dtype=np.intp)
            self._targets = np.empty(0, dtype=np.intp)
            return
        self.param = connection_param(self.strategy, q, measure)
        if self.strategy.mode == KNN:
            table = index.knn_table(self.param)
            kk = table.shape[1]
            src = np.repeat(np.arange(q, dtype=np.int64), kk)
            dst = table.ravel().astype(np.int64)
        else:
            pairs = index.radius_pairs(self.param).astype(np.int64).reshape(-1, 2)
            src, dst = pairs[:, 0], pairs[:, 1]
        keys = np.unique(np.concatenate([src * q + dst, dst * q + src]))
        s = keys // q
        t = keys % q
        self._indptr = np.searchsorted(s, np.arange(q + 1))
        self._targets = index.ids[t]

    def neighbors(self, x: int) -> list[tuple[int, float]]:
        """(neighbour id, edge cost) pairs for alive vertex ``x``."""
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        i = self.index.local.get(x)
        if i is None:
            return []
        targets = self._targets[self._indptr[i]:self._indptr[i + 1]].tolist()
        if x == START or x == GOAL:
            other = GOAL if x == START else START
            if other not in targets:
                targets.append(other)
        tuples = self.samples.tuples
        tx = tuples[x]
        out = [(j, math.dist(tx, tuples[j])) for j in targets]
        self._cache[x] = out
        return out

    def is_alive(self, x: int) -> bool:
        return self.samples.alive[x]


def add_batch(samples: SampleSet, sampler: InformedSampler, m: int, u_e: float, scene: Scene,
              rng: RngStream, batch: int | None = None) -> list[int]:
    """Append ``m`` valid informed samples; returns their ids."""
    if m <= 0:
        raise UsageError("batch size must be positive")
    informed = sampler.with_cost(u_e)
    got: list[np.ndarray] = []
    have = 0
    rejected = 0
    while have < m:
        block = max(m - have, 16)
        cand = sample_informed_many(informed, scene.bounds, rng, block)
        good = cand[scene.points_valid(cand)]
        if good.shape[0] == 0:
            rejected += block
            if rejected >= MAX_REJECTIONS:
                raise InfeasibleSamplingError(f"{rejected} consecutive invalid samples")
            continue
        rejected = 0
        got.append(good)
        have += good.shape[0]
    if batch is None:
        batch = max(samples.batch_of) + 1
    return samples.add(np.concatenate(got)[:m], batch)


def prune(samples: SampleSet, start, goal, u_e: float, protect=()) -> int:
    """Kill alive states whose focal sum exceeds ``u_e``; returns the count.

    ``start``/``goal`` are accepted for interface symmetry; focal sums were
    cached against them when the states were added.
    """
    if math.isinf(u_e):
        return 0
    focal = samples.focal_sums()
    alive = np.fromiter(samples.alive, dtype=bool, count=len(samples.alive))
    # Relative slack so states exactly on the ellipse survive float rounding.
    doomed = alive & (focal > u_e * (1.0 + PRUNE_SLACK))
    doomed[START] = doomed[GOAL] = False
    for p in protect:
        doomed[p] = False
    ids = np.flatnonzero(doomed)
    for i in ids.tolist():
        samples.alive[i] = False
    return int(ids.size)
