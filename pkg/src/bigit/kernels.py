"""Select the kernel backend at import time.

The compiled Cython extension is used when it is importable; setting
``BIGIT_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

if os.environ.get("BIGIT_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
boxes_points_free = _impl.boxes_points_free
boxes_first_collision = _impl.boxes_first_collision
raster_points_free = _impl.raster_points_free
raster_first_collision = _impl.raster_first_collision
grid_dijkstra = _impl.grid_dijkstra
