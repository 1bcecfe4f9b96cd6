"""Pure numpy/scipy fallback for the compiled kernels in ``_ckernels``."""
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

BACKEND = "python"


def _in_bounds(pts, blo, bhi):
    return np.all((pts >= blo) & (pts <= bhi), axis=1)


def _boxes_free(pts, lo, hi):
    if lo.shape[0] == 0:
        return np.ones(pts.shape[0], dtype=bool)
    inside = np.all((pts[:, None, :] >= lo[None]) & (pts[:, None, :] <= hi[None]), axis=2)
    return ~np.any(inside, axis=1)


def _pixel(v, origin, mpp):
    idx = np.ceil((v - origin) / mpp).astype(np.intp) - 1
    return np.maximum(idx, 0)


def _raster_free(pts, occ, mpp, ox, oy):
    h, w = occ.shape
    col = _pixel(pts[:, 0], ox, mpp)
    rb = _pixel(pts[:, 1], oy, mpp)
    ok = (col < w) & (rb < h)
    out = np.zeros(pts.shape[0], dtype=bool)
    out[ok] = occ[h - 1 - rb[ok], col[ok]] == 0
    return out


def _segment_points(a, b, ts):
    return a[None, :] + ts[:, None] * (b - a)[None, :]


def _first_false(mask):
    bad = np.flatnonzero(~mask)
    return int(bad[0]) if bad.size else -1


def boxes_points_free(pts, lo, hi, blo, bhi):
    return _in_bounds(pts, blo, bhi) & _boxes_free(pts, lo, hi)


def boxes_first_collision(a, b, lo, hi, blo, bhi, ts):
    pts = _segment_points(a, b, ts)
    return _first_false(boxes_points_free(pts, lo, hi, blo, bhi))


def raster_points_free(pts, occ, mpp, ox, oy, blo, bhi):
    return _in_bounds(pts, blo, bhi) & _raster_free(pts, occ, mpp, ox, oy)


def raster_first_collision(a, b, occ, mpp, ox, oy, blo, bhi, ts):
    pts = _segment_points(a, b, ts)
    return _first_false(raster_points_free(pts, occ, mpp, ox, oy, blo, bhi))


def grid_dijkstra(free_cells, dx, dy, source):
    free_cells = np.asarray(free_cells, dtype=bool)
    h, w = free_cells.shape
    total = h * w
    dist = np.full(total, np.inf)
    pred = np.full(total, -1, dtype=np.intp)
    if total == 0 or not free_cells.flat[source]:
        return dist, pred
    diag = float(np.hypot(dx, dy))
    ids = np.arange(total).reshape(h, w)
    rows, cols, weights = [], [], []
    moves = [(-1, 0, dy), (1, 0, dy), (0, -1, dx), (0, 1, dx),
             (-1, -1, diag), (-1, 1, diag), (1, -1, diag), (1, 1, diag)]
    for dr, dc, cost in moves:
        r0, r1 = max(0, -dr), h - max(0, dr)
        c0, c1 = max(0, -dc), w - max(0, dc)
        src = free_cells[r0:r1, c0:c1]
        dst = free_cells[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
        ok = src & dst
        if dr != 0 and dc != 0:
            ok &= free_cells[r0:r1, c0 + dc:c1 + dc] & free_cells[r0 + dr:r1 + dr, c0:c1]
        rows.append(ids[r0:r1, c0:c1][ok])
        cols.append(ids[r0 + dr:r1 + dr, c0 + dc:c1 + dc][ok])
        weights.append(np.full(int(ok.sum()), cost))
    graph = csr_matrix((np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(total, total))
    d, p = _csgraph_dijkstra(graph, directed=True, indices=source, return_predecessors=True)
    dist[:] = d
    pred[:] = np.where(p < 0, -1, p)
    return dist, pred
