"""Scalar subordination solve for the regularized evolution a + sqrt(t)x.

For eta > 0 the function v_t(z, eta) is the unique root of

    v = eta + t * v * m1(z, v^2),         v in [eta, eta + sqrt(t)],

and for eta = 0 it is the root of m1(z, v^2) = 1/t when f(z) > 1/t
(interior), and identically 0 outside.  m1 is strictly decreasing in v, so
bisection on a guaranteed bracket is unconditionally safe; one or two Newton
polishes restore fast local accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend as bk
from .kernels import (Atomic, HaarUnitary, MatrixModel, ProductPower,
                      _LineModel)

BOUNDARY_BAND = 1e-10       # |f - 1/t| below this: "boundary-band"
DEEP_U = 1e-16              # below this, v is resolved asymptotically
RESID_TOL = 1e-12


@dataclass
class VSolution:
    z: complex
    t: float
    eta: float
    v: float
    residual: float
    iterations: int
    regime: str              # interior | exterior | boundary-band
    deep: bool = False       # v from the log-asymptotic branch, not bisection

    @property
    def u(self):
        return self.v * self.v


class _Profile:
    """Cheap repeated evaluation of u -> (m1, m2) at fixed (model, z).

    Node-based variants expose contiguous (d2, w) arrays so the compiled
    bisection kernel can be used directly; closed-form variants provide
    callables.
    """

    def __init__(self, model, z):
        self.model = model
        self.z = complex(z)
        self.d2 = None
        self.w = None
        if isinstance(model, Atomic):
            d = model.loc - self.z
            self._set_nodes(d.real ** 2 + d.imag ** 2, model.w)
        elif isinstance(model, MatrixModel):
            _, s, _ = np.linalg.svd(model.A - self.z * np.eye(model.n))
            self._set_nodes(s ** 2, np.full(model.n, 1.0 / model.n))
        elif isinstance(model, ProductPower):
            self.refresh(1.0)

    def _set_nodes(self, d2, w):
        self.d2 = bk.as_c(d2)
        self.w = bk.as_c(w)

    def refresh(self, scale):
        """Rebuild the quadrature mesh at a new kernel scale (ProductPower)."""
        if isinstance(self.model, ProductPower):
            wx, wy, wt = self.model._graded_nodes(self.z, scale)
            dx = wx - self.z.real
            dy = wy - self.z.imag
            self._set_nodes(dx * dx + dy * dy, wt)

    def m1(self, u):
        if self.d2 is not None:
            return bk.m1_nodes(self.d2, self.w, u)
        m1, _, _ = self.model.moments_u(self.z, u)
        return m1

    def m1m2(self, u):
        if self.d2 is not None:
            k = 1.0 / (self.d2 + u)
            wk = self.w * k
            return float(wk.sum()), float(np.sum(wk * k))
        m1, m2, _ = self.model.moments_u(self.z, u)
        return m1, m2

    def bisect(self, target, lo, hi, iters=100):
        if self.d2 is not None:
            return bk.bisect_u_nodes(self.d2, self.w, target, lo, hi, iters)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if self.m1(mid) > target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def _regime(model, z, t):
    f = model.f_eval(z)
    if abs(f - 1.0 / t) <= BOUNDARY_BAND * (1.0 / t):
        return "boundary-band", f
    return ("interior" if f > 1.0 / t else "exterior"), f


def _deep_v(model, z, t, prof):
    """Log-asymptotic v for z deep inside a 2-D support: the solve
    m1(z, u) = 1/t has m1 ~ C - pi*rho_a(z)*log u, so log v follows from one
    well-resolved evaluation at a moderate scale sigma."""
    rho_a = model.local_density(z)
    x, y = z.real, z.imag
    edge = min(x, y, 1.0 - x, 1.0 - y)
    sigma = min(1e-2, max(edge / 8.0, 1e-5))
    prof.refresh(sigma)
    m1s = prof.m1(sigma * sigma)
    expo = -(1.0 / t - m1s) / (2.0 * math.pi * rho_a)
    return sigma * math.exp(min(expo, 0.0))


def _solve_v0(model, z, t):
    regime, f = _regime(model, z, t)
    if regime == "exterior":
        return VSolution(z=z, t=t, eta=0.0, v=0.0, residual=0.0,
                         iterations=0, regime=regime)
    if isinstance(model, HaarUnitary):
        u = max(model.solve_u0(z, t), 0.0)
        m1, m2 = model.moments_u(z, u)[:2]
        return VSolution(z=z, t=t, eta=0.0, v=math.sqrt(u),
                         residual=abs(m1 - 1.0 / t), iterations=0,
                         regime=regime)
    prof = _Profile(model, z)
    target = 1.0 / t
    iters = 100
    if isinstance(model, ProductPower):
        scale = math.sqrt(t)
        u = 0.0
        for _ in range(6):
            prof.refresh(scale)
            u = prof.bisect(target, 0.0, t, iters)
            if u < DEEP_U and model.local_density(z) > 0.0:
                v = _deep_v(model, z, t, prof)
                return VSolution(z=z, t=t, eta=0.0, v=v, residual=0.0,
                                 iterations=iters, regime=regime, deep=True)
            ns = math.sqrt(max(u, 1e-30))
            if 0.5 * scale <= ns <= 2.0 * scale:
                break
            scale = ns
    else:
        u = prof.bisect(target, 0.0, t, iters)
    # Newton polish on u: m1' = -m2
    for _ in range(3):
        m1, m2 = prof.m1m2(u)
        if not math.isfinite(m1) or m2 <= 0:
            break
        step = (m1 - target) / m2
        if u + step < 0:
            break
        u += step
    m1 = prof.m1(u)
    return VSolution(z=z, t=t, eta=0.0, v=math.sqrt(max(u, 0.0)),
                     residual=abs(m1 - target), iterations=iters,
                     regime=regime)


def solve_v(model, z, eta, t):
    """VSolution of the subordination equation at (z, eta, t)."""
    z = complex(z)
    t = float(t)
    eta = float(eta)
    if t <= 0:
        raise ValueError("t must be positive")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0.0:
        return _solve_v0(model, z, t)

    prof = _Profile(model, z)
    sqt = math.sqrt(t)

    def F(v, m1=None):
        if m1 is None:
            m1 = prof.m1(v * v)
        return v - eta - t * v * m1

    lo, hi = eta, eta + sqt
    if isinstance(model, ProductPower):
        prof.refresh(math.sqrt(eta * (eta + sqt)))
    iters = 80
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if F(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    if isinstance(model, ProductPower):
        prof.refresh(v)
    # Newton polish: F' = 1 - t*(m1 - 2 v^2 m2)
    for _ in range(2):
        m1, m2 = prof.m1m2(v * v)
        fv = F(v, m1)
        fp = 1.0 - t * m1 + 2.0 * t * v * v * m2
        if fp <= 0:
            break
        vn = v - fv / fp
        if eta <= vn <= eta + sqt:
            v = vn
    resid = abs(F(v))
    regime, _ = _regime(model, z, t)
    return VSolution(z=z, t=t, eta=eta, v=v, residual=resid,
                     iterations=iters, regime=regime)


def v_profile(model, z, eta_list, t):
    """solve_v across a list of positive eta values (shared profile)."""
    if np.any(np.asarray(eta_list) <= 0):
        raise ValueError("eta_list must be strictly positive")
    return [solve_v(model, z, eta, t) for eta in eta_list]


def v0_expansion_check(model, z, t):
    """Near-boundary expansion v(z,0) ~ m2^{-1/2} sqrt(f - 1/t)."""
    z = complex(z)
    sol = _solve_v0(model, z, t)
    if sol.regime == "exterior":
        raise ValueError("expansion check requires an interior point")
    f = model.f_eval(z)
    excess = f - 1.0 / t
    if excess <= 0:
        raise ValueError("f - 1/t not positive at this point")
    _, m2, _ = model.moments_u(z, 0.0)
    predicted = 1.0 / math.sqrt(m2)
    measured = sol.v / math.sqrt(excess)
    return {"z": z, "t": t, "v": sol.v, "measured_ratio": measured,
            "predicted_ratio": predicted,
            "deviation": abs(measured - predicted) / predicted}
