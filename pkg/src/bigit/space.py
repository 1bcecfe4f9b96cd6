"""Euclidean state space: states, bounds, metric, seeded sampling.

States are plain 1-D ``float64`` numpy arrays. Informed sampling draws from
the prolate hyperspheroid whose foci are the start and goal and whose
transverse diameter is the current best solution cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleSamplingError, UsageError

MAX_REJECTIONS = 1_000_000


def as_state(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite float64 state vector."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise UsageError(f"state must be a 1-D vector of length >= 2, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise UsageError(f"expected a {dim}-dimensional state, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("state coordinates must be finite")
    return arr


def distance(a, b) -> float:
    """Euclidean distance between two states of equal dimension."""
    if len(a) != len(b):
        raise UsageError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return math.dist(a, b)


def interpolate(a, b, t: float) -> np.ndarray:
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"interpolation parameter must lie in [0, 1], got {t}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a + t * (b - a)


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class ProblemBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = as_state(self.lower)
        upper = as_state(self.upper, dim=lower.shape[0])
        if not np.all(lower < upper):
            raise UsageError("bounds require lower[i] < upper[i] on every axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, dim: int) -> "ProblemBounds":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def measure(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


class RngStream:
    """Seeded, counter-based random stream (numpy's Philox generator).

    Identical seeds give bit-identical sequences. ``spawn`` derives
    independent child streams for parallel trials.
    """

    def __init__(self, seed: int = 0):
        if seed < 0 or seed >= 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def spawn(self, index: int) -> "RngStream":
        child = RngStream(self.seed)
        child._gen = np.random.Generator(np.random.Philox(key=self.seed).jumped(index + 1))
        return child

    def uniform(self, low, high, size=None) -> np.ndarray:
        return self._gen.uniform(low, high, size)

    def normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def random(self, size=None):
        return self._gen.random(size)


def sample_uniform(bounds: ProblemBounds, rng: RngStream) -> np.ndarray:
    return rng.uniform(bounds.lower, bounds.upper)


def sample_uniform_many(bounds: ProblemBounds, rng: RngStream, count: int) -> np.ndarray:
    return rng.uniform(bounds.lower, bounds.upper, size=(count, bounds.dim))


def _rotation_to_world(start: np.ndarray, goal: np.ndarray) -> np.ndarray:
    n = start.shape[0]
    c_min = math.dist(start, goal)
    if c_min == 0.0:
        return np.eye(n)
    a1 = (goal - start) / c_min
    m = np.outer(a1, np.eye(n)[0])
    u, _, vt = np.linalg.svd(m)
    d = np.ones(n)
    d[-1] = np.linalg.det(u) * np.linalg.det(vt)
    return u @ np.diag(d) @ vt


@dataclass(frozen=True)
class InformedSampler:
    """Samples the informed set {x : |x - start| + |x - goal| <= c_best}."""

    focus_a: np.ndarray
    focus_b: np.ndarray
    c_best: float = math.inf
    c_min: float = field(init=False)
    rotation: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = as_state(self.focus_a)
        b = as_state(self.focus_b, dim=a.shape[0])
        object.__setattr__(self, "focus_a", a)
        object.__setattr__(self, "focus_b", b)
        object.__setattr__(self, "c_min", math.dist(a, b))
        object.__setattr__(self, "rotation", _rotation_to_world(a, b))
        self._check_cost(self.c_best)

    def _check_cost(self, c_best: float):
        if math.isnan(c_best) or c_best < self.c_min * (1.0 - 1e-12):
            raise UsageError(f"c_best={c_best} is below the focal distance {self.c_min}")

    def with_cost(self, c_best: float) -> "InformedSampler":
        self._check_cost(c_best)
        new = object.__new__(InformedSampler)
        for name in ("focus_a", "focus_b", "c_min", "rotation"):
            object.__setattr__(new, name, getattr(self, name))
        object.__setattr__(new, "c_best", float(c_best))
        return new

    @property
    def dim(self) -> int:
        return self.focus_a.shape[0]

    def measure(self) -> float:
        """Volume of the prolate hyperspheroid (inf when c_best is inf)."""
        if math.isinf(self.c_best):
            return math.inf
        n = self.dim
        c = max(self.c_best, self.c_min)
        conj = math.sqrt(max(c * c - self.c_min * self.c_min, 0.0))
        return unit_ball_volume(n) * (c / 2.0) * (conj / 2.0) ** (n - 1)

    def focal_sums(self, points: np.ndarray) -> np.ndarray:
        return (np.linalg.norm(points - self.focus_a, axis=1)
                + np.linalg.norm(points - self.focus_b, axis=1))

    def _ball_to_world(self, ball: np.ndarray) -> np.ndarray:
        c = max(self.c_best, self.c_min)
        conj = math.sqrt(max(c * c - self.c_min * self.c_min, 0.0))
        radii = np.full(self.dim, conj / 2.0)
        radii[0] = c / 2.0
        center = (self.focus_a + self.focus_b) / 2.0
        return (ball * radii) @ self.rotation.T + center

    def _unit_ball(self, rng: RngStream, count: int) -> np.ndarray:
        n = self.dim
        z = rng.normal((count, n))
        norms = np.linalg.norm(z, axis=1)
        norms[norms == 0.0] = 1.0
        r = rng.random(count) ** (1.0 / n)
        return z / norms[:, None] * r[:, None]


def sample_informed_many(sampler: InformedSampler, bounds: ProblemBounds,
                         rng: RngStream, count: int) -> np.ndarray:
    """Draw ``count`` states from the informed set intersected with ``bounds``.

    When the hyperspheroid is at least as large as the bounds, rejection
    from the uniform distribution is cheaper and is used instead.
    """
    if count <= 0:
        return np.empty((0, bounds.dim))
    if math.isinf(sampler.c_best):
        return sample_uniform_many(bounds, rng, count)
    direct = sampler.measure() < bounds.measure
    out: list[np.ndarray] = []
    have = 0
    rejected = 0
    block = max(2 * count, 16)
    while have < count:
        if direct:
            cand = sampler._ball_to_world(sampler._unit_ball(rng, block))
            keep = bounds.contains_many(cand)
        else:
            cand = sample_uniform_many(bounds, rng, block)
            keep = sampler.focal_sums(cand) <= sampler.c_best
        good = cand[keep]
        if good.shape[0] == 0:
            rejected += block
            if rejected >= MAX_REJECTIONS:
                raise InfeasibleSamplingError(
                    f"{rejected} consecutive informed-sampling rejections")
            continue
        rejected = 0
        out.append(good)
        have += good.shape[0]
    return np.concatenate(out)[:count]


def sample_informed(sampler: InformedSampler, bounds: ProblemBounds, rng: RngStream) -> np.ndarray:
    return sample_informed_many(sampler, bounds, rng, 1)[0]
