# cython: language_level=3
"""Compiled collision and grid-search kernels.

Every function here has a numpy twin in ``_pykernels`` with identical
results; ``bigit.kernels`` picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, sqrt, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"


cdef inline bint _in_bounds(const double* p, const double[::1] blo, const double[::1] bhi,
                            Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(n):
        if p[k] < blo[k] or p[k] > bhi[k]:
            return False
    return True


cdef inline bint _box_free(const double* p, const double[:, ::1] lo, const double[:, ::1] hi,
                           Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j, k
    cdef bint inside
    for j in range(lo.shape[0]):
        inside = True
        for k in range(n):
            if p[k] < lo[j, k] or p[k] > hi[j, k]:
                inside = False
                break
        if inside:
            return False
    return True


cdef inline Py_ssize_t _pixel(double v, double origin, double mpp) noexcept nogil:
    cdef Py_ssize_t idx = <Py_ssize_t>ceil((v - origin) / mpp) - 1
    if idx < 0:
        idx = 0
    return idx


cdef inline bint _raster_free(const double* p, const unsigned char[:, ::1] occ, double mpp,
                              double ox, double oy) noexcept nogil:
    cdef Py_ssize_t h = occ.shape[0]
    cdef Py_ssize_t w = occ.shape[1]
    cdef Py_ssize_t col = _pixel(p[0], ox, mpp)
    cdef Py_ssize_t rb = _pixel(p[1], oy, mpp)
    if col >= w or rb >= h:
        return False
    return occ[h - 1 - rb, col] == 0


def boxes_points_free(const double[:, ::1] pts, const double[:, ::1] lo, const double[:, ::1] hi,
                      const double[::1] blo, const double[::1] bhi):
    cdef Py_ssize_t m = pts.shape[0], n = pts.shape[1], i
    out = np.zeros(m, dtype=np.bool_)
    cdef cnp.npy_bool[::1] res = out
    with nogil:
        for i in range(m):
            res[i] = _in_bounds(&pts[i, 0], blo, bhi, n) and _box_free(&pts[i, 0], lo, hi, n)
    return out


def boxes_first_collision(const double[::1] a, const double[::1] b, const double[:, ::1] lo,
                          const double[:, ::1] hi, const double[::1] blo, const double[::1] bhi,
                          const double[::1] ts):
    """Index of the first parameter in ``ts`` whose point collides, or -1."""
    cdef Py_ssize_t n = a.shape[0], i, k
    cdef double* p = <double*>malloc(n * sizeof(double))
    cdef Py_ssize_t hit = -1
    try:
        with nogil:
            for i in range(ts.shape[0]):
                for k in range(n):
                    p[k] = a[k] + ts[i] * (b[k] - a[k])
                if not (_in_bounds(p, blo, bhi, n) and _box_free(p, lo, hi, n)):
                    hit = i
                    break
    finally:
        free(p)
    return hit


def raster_points_free(const double[:, ::1] pts, const unsigned char[:, ::1] occ, double mpp,
                       double ox, double oy, const double[::1] blo, const double[::1] bhi):
    cdef Py_ssize_t m = pts.shape[0], n = pts.shape[1], i
    out = np.zeros(m, dtype=np.bool_)
    cdef cnp.npy_bool[::1] res = out
    with nogil:
        for i in range(m):
            res[i] = _in_bounds(&pts[i, 0], blo, bhi, n) and _raster_free(&pts[i, 0], occ, mpp, ox, oy)
    return out


def raster_first_collision(const double[::1] a, const double[::1] b,
                           const unsigned char[:, ::1] occ, double mpp, double ox, double oy,
                           const double[::1] blo, const double[::1] bhi, const double[::1] ts):
    cdef Py_ssize_t n = a.shape[0], i, k
    cdef double* p = <double*>malloc(n * sizeof(double))
    cdef Py_ssize_t hit = -1
    try:
        with nogil:
            for i in range(ts.shape[0]):
                for k in range(n):
                    p[k] = a[k] + ts[i] * (b[k] - a[k])
                if not (_in_bounds(p, blo, bhi, n) and _raster_free(p, occ, mpp, ox, oy)):
                    hit = i
                    break
    finally:
        free(p)
    return hit


cdef inline void _sift_up(Py_ssize_t* heap, Py_ssize_t* pos, double* dist, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t node = heap[i], parent
    while i > 0:
        parent = (i - 1) >> 1
        if dist[heap[parent]] <= dist[node]:
            break
        heap[i] = heap[parent]
        pos[heap[i]] = i
        i = parent
    heap[i] = node
    pos[node] = i


cdef inline void _sift_down(Py_ssize_t* heap, Py_ssize_t* pos, double* dist, Py_ssize_t size,
                            Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t node = heap[i], child
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and dist[heap[child + 1]] < dist[heap[child]]:
            child += 1
        if dist[heap[child]] >= dist[node]:
            break
        heap[i] = heap[child]
        pos[heap[i]] = i
        i = child
    heap[i] = node
    pos[node] = i


def grid_dijkstra(const unsigned char[:, ::1] free_cells, double dx, double dy, Py_ssize_t source):
    """8-connected Dijkstra over free cells; diagonal moves may not cut corners.

    Returns (distance, predecessor) arrays over flattened row-major cells.
    """
    cdef Py_ssize_t h = free_cells.shape[0], w = free_cells.shape[1]
    cdef Py_ssize_t total = h * w
    dist_arr = np.full(total, np.inf)
    pred_arr = np.full(total, -1, dtype=np.intp)
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t[::1] pred = pred_arr
    if total == 0 or not free_cells[source // w, source % w]:
        return dist_arr, pred_arr
    cdef double diag = sqrt(dx * dx + dy * dy)
    cdef int[8] drow = [-1, 1, 0, 0, -1, -1, 1, 1]
    cdef int[8] dcol = [0, 0, -1, 1, -1, 1, -1, 1]
    cdef double[8] cost = [dy, dy, dx, dx, diag, diag, diag, diag]
    cdef Py_ssize_t* heap = <Py_ssize_t*>malloc(total * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pos = <Py_ssize_t*>malloc(total * sizeof(Py_ssize_t))
    cdef unsigned char* done = <unsigned char*>malloc(total)
    cdef Py_ssize_t size = 0, node, r, c, nr, nc, nb, k
    cdef double nd
    try:
        with nogil:
            for k in range(total):
                pos[k] = -1
                done[k] = 0
            dist[source] = 0.0
            heap[0] = source
            pos[source] = 0
            size = 1
            while size > 0:
                node = heap[0]
                size -= 1
                if size > 0:
                    heap[0] = heap[size]
                    pos[heap[0]] = 0
                    _sift_down(heap, pos, &dist[0], size, 0)
                pos[node] = -1
                done[node] = 1
                r = node // w
                c = node % w
                for k in range(8):
                    nr = r + drow[k]
                    nc = c + dcol[k]
                    if nr < 0 or nr >= h or nc < 0 or nc >= w:
                        continue
                    if not free_cells[nr, nc]:
                        continue
                    if k >= 4 and (not free_cells[r, nc] or not free_cells[nr, c]):
                        continue
                    nb = nr * w + nc
                    if done[nb]:
                        continue
                    nd = dist[node] + cost[k]
                    if nd < dist[nb]:
                        dist[nb] = nd
                        pred[nb] = node
                        if pos[nb] < 0:
                            heap[size] = nb
                            pos[nb] = size
                            size += 1
                        _sift_up(heap, pos, &dist[0], pos[nb])
    finally:
        free(heap)
        free(pos)
        free(done)
    return dist_arr, pred_arr
