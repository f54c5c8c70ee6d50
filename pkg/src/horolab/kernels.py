"""Kernel backend selection.

The compiled extension is used when it imports; ``HOROLAB_PURE=1`` forces
the numpy fallback.  ``BACKEND`` names the active one.
"""

import os

from . import _purekernels as pure

compiled = None
if os.environ.get("HOROLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "pure"

bfs_row = _impl.bfs_row
bfs_row_avoiding = _impl.bfs_row_avoiding
bfs_pair_avoiding = _impl.bfs_pair_avoiding
distance_matrix = _impl.distance_matrix
four_point_max = _impl.four_point_max
four_point_sampled = _impl.four_point_sampled

__all__ = [
    "BACKEND",
    "bfs_row",
    "bfs_row_avoiding",
    "bfs_pair_avoiding",
    "distance_matrix",
    "four_point_max",
    "four_point_sampled",
    "pure",
    "compiled",
]
