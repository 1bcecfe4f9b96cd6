"""Obstacle models, state validity and edge collision checking.

Obstacles are closed axis-aligned boxes or a raster occupancy map. Full
edge checks test ``collision_segments + 1`` evenly spaced points including
both endpoints; sparse checks test dyadic interior points one resolution
level at a time and remember how far each edge has been verified.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PgmError, UsageError
from .space import ProblemBounds, as_state

DEFAULT_SEGMENTS = 200


@dataclass(frozen=True)
class Aabb:
    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo = as_state(self.min)
        hi = as_state(self.max, dim=lo.shape[0])
        if not np.all(lo <= hi):
            raise UsageError("box requires min[i] <= max[i] on every axis")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def dim(self) -> int:
        return self.min.shape[0]


@dataclass(frozen=True)
class RasterMap:
    """Row-major occupancy grid; row 0 is the top image row.

    World coordinates put ``origin`` at the bottom-left corner of the
    bottom-left pixel.
    """

    width: int
    height: int
    occupancy: np.ndarray
    meters_per_pixel: float
    origin: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        occ = np.ascontiguousarray(np.asarray(self.occupancy, dtype=bool))
        if occ.size != self.width * self.height:
            raise UsageError("occupancy size does not match width * height")
        if not self.meters_per_pixel > 0:
            raise UsageError("meters_per_pixel must be positive")
        object.__setattr__(self, "occupancy", occ.reshape(self.height, self.width))
        object.__setattr__(self, "origin", as_state(self.origin, dim=2))

    @property
    def extent(self) -> tuple[float, float]:
        return self.width * self.meters_per_pixel, self.height * self.meters_per_pixel

    def bounds(self) -> ProblemBounds:
        w, h = self.extent
        return ProblemBounds(self.origin.copy(), self.origin + np.array([w, h]))

    def pixel_of(self, x) -> tuple[int, int]:
        """(row, col) of the pixel containing world point ``x``.

        Points on a pixel boundary belong to the lower-index pixel.
        """
        mpp = self.meters_per_pixel
        col = max(math.ceil((x[0] - self.origin[0]) / mpp) - 1, 0)
        rb = max(math.ceil((x[1] - self.origin[1]) / mpp) - 1, 0)
        return self.height - 1 - rb, col

    def cell_center(self, row: int, col: int) -> np.ndarray:
        mpp = self.meters_per_pixel
        return self.origin + np.array([(col + 0.5) * mpp, (self.height - 1 - row + 0.5) * mpp])

    def dilated(self, radius: float) -> "RasterMap":
        """Grow obstacles by ``ceil(radius / meters_per_pixel)`` cells (disc footprint)."""
        from scipy.ndimage import binary_dilation

        cells = math.ceil(radius / self.meters_per_pixel)
        if cells <= 0:
            return self
        yy, xx = np.mgrid[-cells:cells + 1, -cells:cells + 1]
        disc = xx * xx + yy * yy <= cells * cells
        grown = binary_dilation(self.occupancy, structure=disc)
        return RasterMap(self.width, self.height, grown, self.meters_per_pixel, self.origin)


class SparseCheckLedger:
    """Per-edge record of the dyadic resolution level already verified free.

    Level ``L`` means every interior point ``i / 2**L`` has been checked.
    ``evaluations`` counts individual point checks for instrumentation.
    """

    def __init__(self):
        self.levels: dict[tuple[int, int], int] = {}
        self.evaluations = 0

    @staticmethod
    def key(a_id: int, b_id: int) -> tuple[int, int]:
        return (a_id, b_id) if a_id <= b_id else (b_id, a_id)

    def level(self, a_id: int, b_id: int) -> int:
        return self.levels.get(self.key(a_id, b_id), 0)


def dyadic_level_points(level: int) -> np.ndarray:
    """Interior parameters first introduced at ``level`` (odd numerators)."""
    if level < 1:
        return np.empty(0)
    denom = 2 ** level
    return np.arange(1, denom, 2, dtype=np.float64) / denom


class Scene:
    """Problem bounds plus either a list of boxes or one raster map."""

    def __init__(self, bounds: ProblemBounds, obstacles=(), raster: RasterMap | None = None,
                 collision_segments: int = DEFAULT_SEGMENTS):
        if collision_segments < 1:
            raise UsageError("collision_segments must be positive")
        if raster is not None and obstacles:
            raise UsageError("a scene holds boxes or a raster map, not both")
        if raster is not None and bounds.dim != 2:
            raise UsageError("raster scenes are two-dimensional")
        self.bounds = bounds
        self.obstacles = tuple(obstacles)
        self.raster = raster
        self.collision_segments = int(collision_segments)
        for box in self.obstacles:
            if box.dim != bounds.dim:
                raise UsageError("obstacle dimension does not match the scene")
        n = bounds.dim
        self._lo = np.ascontiguousarray([b.min for b in self.obstacles], dtype=np.float64).reshape(-1, n)
        self._hi = np.ascontiguousarray([b.max for b in self.obstacles], dtype=np.float64).reshape(-1, n)
        self._blo = np.ascontiguousarray(bounds.lower)
        self._bhi = np.ascontiguousarray(bounds.upper)
        self._full_ts = np.linspace(0.0, 1.0, self.collision_segments + 1)
        if raster is not None:
            self._occ = np.ascontiguousarray(raster.occupancy, dtype=np.uint8)
            self._mpp = float(raster.meters_per_pixel)
            self._ox, self._oy = float(raster.origin[0]), float(raster.origin[1])

    @property
    def dim(self) -> int:
        return self.bounds.dim

    def with_segments(self, collision_segments: int) -> "Scene":
        return Scene(self.bounds, self.obstacles, self.raster, collision_segments)

    def _check_dim(self, x) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise UsageError(f"expected a {self.dim}-dimensional state, got shape {x.shape}")
        return x

    def points_valid(self, points: np.ndarray) -> np.ndarray:
        pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, self.dim)
        if self.raster is not None:
            return kernels.raster_points_free(pts, self._occ, self._mpp, self._ox, self._oy,
                                              self._blo, self._bhi)
        return kernels.boxes_points_free(pts, self._lo, self._hi, self._blo, self._bhi)

    def state_valid(self, x) -> bool:
        x = self._check_dim(x)
        return bool(self.points_valid(x[None, :])[0])

    def first_collision(self, a, b, ts: np.ndarray) -> int:
        """Index of the first colliding parameter in ``ts`` along a->b, or -1."""
        a = np.ascontiguousarray(a, dtype=np.float64)
        b = np.ascontiguousarray(b, dtype=np.float64)
        if self.raster is not None:
            return kernels.raster_first_collision(a, b, self._occ, self._mpp, self._ox, self._oy,
                                                  self._blo, self._bhi, ts)
        return kernels.boxes_first_collision(a, b, self._lo, self._hi, self._blo, self._bhi, ts)

    def edge_valid_full(self, a, b) -> bool:
        return self.first_collision(a, b, self._full_ts) < 0

    def edge_check_sparse(self, ledger: SparseCheckLedger, a_id: int, b_id: int, a, b,
                          target_level: int) -> bool:
        """Verify dyadic interior points up to ``target_level``, skipping known levels."""
        key = ledger.key(a_id, b_id)
        current = ledger.levels.get(key, 0)
        if target_level < current:
            raise UsageError("target level is below the verified level for this edge")
        for level in range(current + 1, target_level + 1):
            ts = dyadic_level_points(level)
            hit = self.first_collision(a, b, ts)
            ledger.evaluations += ts.shape[0] if hit < 0 else hit + 1
            if hit >= 0:
                return False
            ledger.levels[key] = level
        return True


# PGM ingestion ---------------------------------------------------------------

_WS = b" \t\r\n\v\f"


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch in _WS:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos:pos + 1] not in _WS and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PgmError("unexpected end of header", start)
    return data[start:pos], pos


def _read_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    tok, end = _read_token(data, pos)
    if not re.fullmatch(rb"\d+", tok):
        raise PgmError(f"invalid {what} {tok!r}", end - len(tok))
    return int(tok), end


def decode_pgm(data: bytes) -> np.ndarray:
    """Decode a P2 or P5 greyscale image with maxval 255 into a uint8 array."""
    if len(data) < 2:
        raise PgmError("missing magic number", 0)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic number {magic!r}", 0)
    pos = 2
    width, pos = _read_int(data, pos, "width")
    height, pos = _read_int(data, pos, "height")
    if width == 0 or height == 0:
        raise PgmError("image has zero size", pos)
    maxval, pos = _read_int(data, pos, "maxval")
    if maxval != 255:
        raise PgmError(f"maxval must be 255, got {maxval}", pos - len(str(maxval)))
    count = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos:pos + 1] not in _WS:
            raise PgmError("missing whitespace before raster", pos)
        pos += 1
        payload = data[pos:pos + count]
        if len(payload) < count:
            raise PgmError(f"truncated raster: expected {count} bytes, got {len(payload)}",
                           pos + len(payload))
        pixels = np.frombuffer(payload, dtype=np.uint8)
    else:
        pixels = np.empty(count, dtype=np.uint8)
        for i in range(count):
            try:
                value, pos = _read_int(data, pos, "pixel value")
            except PgmError as exc:
                raise PgmError(f"truncated raster after {i} of {count} pixels", exc.offset) from None
            if value > maxval:
                raise PgmError(f"pixel value {value} exceeds maxval", pos)
            pixels[i] = value
    return pixels.reshape(height, width).copy()


def encode_pgm(pixels: np.ndarray, binary: bool = True) -> bytes:
    pixels = np.asarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    if binary:
        return b"P5\n%d %d\n255\n" % (width, height) + pixels.tobytes()
    rows = [" ".join(str(int(v)) for v in row) for row in pixels]
    return ("P2\n%d %d\n255\n" % (width, height) + "\n".join(rows) + "\n").encode()


def load_raster_map(data: bytes, meters_per_pixel: float, occupied_below: int = 128,
                    origin=(0.0, 0.0)) -> RasterMap:
    """Threshold a PGM image: pixels darker than ``occupied_below`` are obstacles."""
    pixels = decode_pgm(data)
    height, width = pixels.shape
    return RasterMap(width, height, pixels < occupied_below, meters_per_pixel, np.asarray(origin))
