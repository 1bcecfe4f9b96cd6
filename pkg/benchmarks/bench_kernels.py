"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from bigit import _pykernels
from bigit.bench.domains import WALL_GAP_BOXES, extrude

try:
    from bigit import _ckernels
except ImportError:
    _ckernels = None


def cases(dim=8, seed=0):
    rng = np.random.default_rng(seed)
    boxes = extrude(WALL_GAP_BOXES, dim)
    lo = np.ascontiguousarray([b.min for b in boxes])
    hi = np.ascontiguousarray([b.max for b in boxes])
    blo, bhi = np.zeros(dim), np.ones(dim)
    pts = rng.random((1000, dim))
    a, b = rng.random(dim), rng.random(dim)
    # An edge that stays left of the wall so the whole segment is scanned.
    a[0], b[0] = 0.05, 0.35
    ts = np.linspace(0.0, 1.0, 201)
    occ = np.ascontiguousarray(rng.random((400, 400)) < 0.2, dtype=np.uint8)
    free = np.ascontiguousarray(1 - occ)
    free[0, 0] = 1
    rp = rng.random((1000, 2)) * 40.0
    ra, rb = np.array([1.0, 1.0]), np.array([39.0, 39.0])
    rlo, rhi = np.zeros(2), np.full(2, 40.0)
    return {
        "boxes_points_free(1000 pts, R^8)": lambda k: k.boxes_points_free(pts, lo, hi, blo, bhi),
        "boxes_first_collision(201 pts, R^8)": lambda k: k.boxes_first_collision(a, b, lo, hi, blo, bhi, ts),
        "raster_points_free(1000 pts)": lambda k: k.raster_points_free(rp, occ, 0.1, 0.0, 0.0, rlo, rhi),
        "raster_first_collision(201 pts)": lambda k: k.raster_first_collision(ra, rb, occ, 0.1, 0.0, 0.0,
                                                                              rlo, rhi, ts),
        "grid_dijkstra(400x400)": lambda k: k.grid_dijkstra(free, 1.0, 1.0, 0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.insert(0, ("cython", _ckernels))
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':40s} " + " ".join(f"{name:>12s}" for name, _ in backends) + "   speedup")
    for label, fn in cases().items():
        times = []
        for _, mod in backends:
            n = 1 if "dijkstra" in label else 200
            best = min(timeit.repeat(lambda: fn(mod), number=n, repeat=args.repeat)) / n
            times.append(best)
        cells = " ".join(f"{t * 1e6:10.1f}us" for t in times)
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 else ""
        print(f"{label:40s} {cells} {speed}")


if __name__ == "__main__":
    main()
