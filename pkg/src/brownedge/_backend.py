"""Backend selection: compiled kernels when available, NumPy otherwise.

Set BROWNEDGE_FORCE_PYTHON=1 to force the NumPy fallback (useful for
debugging and for the backend benchmark).
"""

import os

if os.environ.get("BROWNEDGE_FORCE_PYTHON", "0") == "1":
    from . import _corepy as core
else:
    try:
        from . import _corecy as core  # type: ignore[attr-defined]
    except ImportError:
        from . import _corepy as core

BACKEND = core.BACKEND_NAME

m1_sum = core.m1_sum
moment_sums = core.moment_sums
bisect_u = core.bisect_u
m1_nodes = core.m1_nodes
moment_nodes = core.moment_nodes
bisect_u_nodes = core.bisect_u_nodes


def as_c(a):
    """Contiguous float64 view/copy, as the compiled kernels require."""
    import numpy as np

    return np.ascontiguousarray(a, dtype=np.float64)
