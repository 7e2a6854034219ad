"""Pure-NumPy implementation of the hot node-sum kernels.

Every spectral functional in this package reduces to weighted sums of
1/(d2 + u) and its powers over quadrature (or atom) nodes, where d2 holds
squared distances |w_j - z|^2 and u = v^2.  The batched bisection solves
m1(u) = target per row, relying on m1 being strictly decreasing in u.

The compiled module ``_corecy`` exposes the identical API; see ``_backend``.
"""

import numpy as np

BACKEND_NAME = "numpy"


def m1_sum(d2, w, u):
    """Row-wise m1: out[i] = sum_j w[j] / (d2[i,j] + u[i])."""
    return (w / (d2 + u[:, None])).sum(axis=1)


def moment_sums(d2, dx, dy, w, u):
    """Row-wise m1, m2, Re g, Im g.

    dx[i,j], dy[i,j] are the components of w_j - z_i, so that
    g = sum_j w_j (w_j - z_i) / (d2 + u)^2.
    """
    k = 1.0 / (d2 + u[:, None])
    wk = w * k
    m1 = wk.sum(axis=1)
    wk2 = wk * k
    m2 = wk2.sum(axis=1)
    gre = (wk2 * dx).sum(axis=1)
    gim = (wk2 * dy).sum(axis=1)
    return m1, m2, gre, gim


def bisect_u(d2, w, target, lo, hi, iters=80):
    """Row-wise bisection for m1(u) = target on [lo, hi], m1 decreasing."""
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = m1_sum(d2, w, mid)
        up = val > target
        lo[up] = mid[up]
        hi[~up] = mid[~up]
    return 0.5 * (lo + hi)


def m1_nodes(d2, w, u):
    """Scalar m1 over one node set."""
    return float((w / (d2 + u)).sum())


def moment_nodes(d2, dx, dy, w, u):
    """Scalar m1, m2, Re g, Im g over one node set."""
    k = 1.0 / (d2 + u)
    wk = w * k
    wk2 = wk * k
    return float(wk.sum()), float(wk2.sum()), float((wk2 * dx).sum()), float((wk2 * dy).sum())


def bisect_u_nodes(d2, w, target, lo, hi, iters=80):
    """Scalar bisection for m1(u) = target on [lo, hi]."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if m1_nodes(d2, w, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
