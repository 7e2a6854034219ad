"""Quadrature meshes for the singular kernels 1/r^2, 1/r^4, 1/r^6.

The integrands concentrate on a scale set by the regularization sqrt(u)
(or by the distance to the singular point), so panels are graded
geometrically toward the interesting points and each panel carries a
Gauss-Legendre rule.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

_GL_CACHE = {}


def _gl(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = leggauss(order)
    return _GL_CACHE[order]


def graded_breaks(a, b, centers, scale_min, ratio=2.0):
    """Panel breakpoints on [a, b], geometrically refined toward each center.

    Around every center c in [a-0.5, b+0.5] the panel size shrinks from the
    coarse scale down to scale_min by factors of `ratio`.
    """
    pts = {a, b}
    coarse = (b - a) / 4.0
    for c in np.atleast_1d(centers):
        if c < a - 0.5 * (b - a) or c > b + 0.5 * (b - a):
            continue
        s = coarse
        while s > scale_min:
            for e in (c - s, c + s):
                if a < e < b:
                    pts.add(float(e))
            s /= ratio
        for e in (c - scale_min, c + scale_min):
            if a < e < b:
                pts.add(float(e))
        if a < c < b:
            pts.add(float(c))
    return np.array(sorted(pts))


def panel_rule(breaks, order=12):
    """Gauss-Legendre nodes/weights over consecutive panels."""
    x0, w0 = _gl(order)
    lo = breaks[:-1]
    hi = breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def line_rule(a, b, centers, scale_min, order=12):
    """Graded panel rule toward `centers`, clipped to [a, b]."""
    return panel_rule(graded_breaks(a, b, centers, scale_min), order)


def merged_rule(a, b, specs, order=12):
    """Panel rule from the union of several gradings.

    `specs` is a list of (centers, scale_min) pairs; breakpoints from all
    gradings are merged so each center keeps its own refinement depth.
    """
    pts = np.concatenate([graded_breaks(a, b, c, s) for c, s in specs])
    return panel_rule(np.unique(pts), order)


def jacobi01(n, p):
    """Nodes/weights integrating the probability density (p+1)x^p on [0,1]."""
    s, w = roots_jacobi(n, 0.0, p)
    x = 0.5 * (s + 1.0)
    w = (p + 1.0) * 0.5 ** (p + 1.0) * w
    return x, w
