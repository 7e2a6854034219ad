"""Spectral models and the functionals of |a - z| that every formula consumes.

A model represents the initial condition a through its spectral data and
evaluates

    f(z)        = <1/|a-z|^2>
    m1(z,v)     = <1/(|a-z|^2+v^2)>
    m2(z,v)     = <1/(|a-z|^2+v^2)^2>
    mixed(z,v)  = <1/((|a-z|^2+v^2)(|a-z|^2_* + v^2))>   (= m2 for normal a)
    g(z,v)      = <(a-z)/(|a-z|^2+v^2)^2>

plus the gradient and Hessian of f.  At v=0 the identity grad f = 2*(Re g,
Im g) holds, so |grad f|^2 = 4|g|^2.

Everything is evaluated either in closed form (atoms, Haar, polynomial line
densities) or by graded-panel Gauss quadrature resolving the kernel width
sqrt(u), u = v^2.
"""

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import betaln

from . import meshes
from ._lorentz import PolySegment

INF = float("inf")


@dataclass
class MomentSet:
    m1: float
    m2: float
    mixed: float
    g: complex


class GridSpec:
    """Axis-aligned evaluation box with per-axis resolution."""

    def __init__(self, lo, hi, nx, ny=None, refine=0):
        self.lo = complex(lo)
        self.hi = complex(hi)
        self.nx = int(nx)
        self.ny = int(ny if ny is not None else nx)
        self.refine = int(refine)
        if self.nx < 2 or self.ny < 2:
            raise ValueError("resolution must be >= 2 per axis")
        if self.hi.real <= self.lo.real or self.hi.imag <= self.lo.imag:
            raise ValueError("degenerate bounding box")

    def axes(self):
        x = np.linspace(self.lo.real, self.hi.real, self.nx)
        y = np.linspace(self.lo.imag, self.hi.imag, self.ny)
        return x, y

    def points(self):
        """Lattice points (ny, nx) as a complex array."""
        x, y = self.axes()
        return x[None, :] + 1j * y[:, None]

    def cell_centers(self):
        """Centers of the nx*ny cells tiling the box, plus the cell area."""
        dx = (self.hi.real - self.lo.real) / self.nx
        dy = (self.hi.imag - self.lo.imag) / self.ny
        x = self.lo.real + dx * (np.arange(self.nx) + 0.5)
        y = self.lo.imag + dy * (np.arange(self.ny) + 0.5)
        return x[None, :] + 1j * y[:, None], dx * dy


def _hess_from_nodes(wx, wy, wt, z):
    """Hessian of f from quadrature nodes (w = wx + i wy), z off the nodes."""
    dx = wx - z.real
    dy = wy - z.imag
    r2 = dx * dx + dy * dy
    r4 = r2 * r2
    r6 = r4 * r2
    hxx = np.sum(wt * (-2.0 / r4 + 8.0 * dx * dx / r6))
    hyy = np.sum(wt * (-2.0 / r4 + 8.0 * dy * dy / r6))
    hxy = np.sum(wt * (8.0 * dx * dy / r6))
    return np.array([[hxx, hxy], [hxy, hyy]])


class SpectralModel:
    variant = None
    normal = True
    divergent_on_spec = False

    # -- core functionals ---------------------------------------------------
    def f_eval(self, z):
        raise NotImplementedError

    def moments_u(self, z, u):
        """(m1, m2, g) at squared regularization u = v^2."""
        raise NotImplementedError

    def moments(self, z, v):
        m1, m2, g = self.moments_u(complex(z), float(v) ** 2)
        return MomentSet(m1=m1, m2=m2, mixed=m2, g=g)

    def grad(self, z):
        z = complex(z)
        if self.spec_distance(z) <= 0:
            raise ValueError("gradient requested on the singular set")
        _, _, g = self.moments_u(z, 0.0)
        return np.array([2.0 * g.real, 2.0 * g.imag])

    def hess(self, z):
        raise NotImplementedError

    # -- geometry helpers ---------------------------------------------------
    def spec_distance(self, z):
        raise NotImplementedError

    def norm_bound(self):
        raise NotImplementedError

    def local_density(self, z):
        """2-D Lebesgue density of the spectral measure at z (0 if none)."""
        return 0.0

    def finite_spec_samples(self, resolution):
        """Points of spec(a) where f can be finite; None when f = inf on all
        of spec(a) (then assumption_check short-circuits)."""
        return None

    def to_dict(self):
        raise NotImplementedError


class Atomic(SpectralModel):
    variant = "atomic"
    divergent_on_spec = True

    def __init__(self, locations, weights):
        self.loc = np.asarray(locations, dtype=complex).ravel()
        self.w = np.asarray(weights, dtype=float).ravel()
        if self.loc.size != self.w.size or self.loc.size == 0:
            raise ValueError("atoms and weights must match and be non-empty")
        if np.any(self.w < 0):
            raise ValueError("negative atom weight")
        if abs(self.w.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1 within 1e-12")

    def _d2(self, z):
        d = self.loc - z
        return d.real ** 2 + d.imag ** 2

    def f_eval(self, z):
        d2 = self._d2(complex(z))
        if d2.min() < 1e-30:
            return INF
        return float(np.sum(self.w / d2))

    def moments_u(self, z, u):
        d2 = self._d2(z) + u
        if d2.min() < 1e-30:
            return INF, INF, complex(INF, 0.0)
        k = self.w / d2
        k2 = k / d2
        return float(k.sum()), float(k2.sum()), complex(np.sum(k2 * (self.loc - z)))

    def hess(self, z):
        z = complex(z)
        d = self.loc - z
        r2 = d.real ** 2 + d.imag ** 2
        if r2.min() < 1e-30:
            raise ValueError("Hessian requested at an atom")
        return _hess_from_nodes(self.loc.real, self.loc.imag, self.w, z)

    def spec_distance(self, z):
        return float(np.sqrt(self._d2(complex(z))).min())

    def norm_bound(self):
        return float(np.abs(self.loc).max())

    def to_dict(self):
        return {"type": "atomic",
                "atoms": [{"re": a.real, "im": a.imag, "w": w}
                          for a, w in zip(self.loc, self.w)]}


class HaarUnitary(SpectralModel):
    """Uniform spectral measure on the unit circle; everything is radial."""

    variant = "haar_unitary"
    divergent_on_spec = True

    def f_eval(self, z):
        s = abs(complex(z)) ** 2
        if abs(s - 1.0) < 1e-30:
            return INF
        return 1.0 / abs(s - 1.0)

    def moments_u(self, z, u):
        s = abs(z) ** 2
        c = 1.0 + s + u
        D = c * c - 4.0 * s
        if D < 1e-300:
            return INF, INF, complex(INF, 0.0)
        d12 = 1.0 / math.sqrt(D)
        d32 = d12 / D
        m1 = d12
        m2 = c * d32
        g = z * (1.0 - s - u) * d32
        return m1, m2, g

    def _radial(self, s):
        # f(s), f'(s), f''(s) with s = |z|^2
        if s > 1.0:
            d = s - 1.0
            return 1.0 / d, -1.0 / d ** 2, 2.0 / d ** 3
        d = 1.0 - s
        return 1.0 / d, 1.0 / d ** 2, 2.0 / d ** 3

    def grad(self, z):
        z = complex(z)
        s = abs(z) ** 2
        if abs(s - 1.0) < 1e-14:
            raise ValueError("gradient requested on the unit circle")
        _, fp, _ = self._radial(s)
        return np.array([2.0 * z.real * fp, 2.0 * z.imag * fp])

    def hess(self, z):
        z = complex(z)
        s = abs(z) ** 2
        if abs(s - 1.0) < 1e-14:
            raise ValueError("Hessian requested on the unit circle")
        _, fp, fpp = self._radial(s)
        x, y = z.real, z.imag
        return np.array([[2 * fp + 4 * fpp * x * x, 4 * fpp * x * y],
                         [4 * fpp * x * y, 2 * fp + 4 * fpp * y * y]])

    def solve_u0(self, z, t):
        """Closed-form interior solution of m1(z, u) = 1/t."""
        s = abs(z) ** 2
        return math.sqrt(4.0 * s + t * t) - 1.0 - s

    def spec_distance(self, z):
        return abs(abs(complex(z)) - 1.0)

    def norm_bound(self):
        return 1.0

    def to_dict(self):
        return {"type": "haar_unitary"}


class _LineModel(SpectralModel):
    """Measure on one or more line segments, each with a 1-D density.

    Subclasses provide segments as tuples (origin, direction, a, b, weight,
    engine) where direction is a unit complex number, the segment is
    {origin + direction*s : s in [a, b]}, weight scales the normalized
    density, and engine evaluates (L1, L2, Ls) at (tau, c).
    """

    segments = ()

    def _project(self, z, seg):
        origin, direction = seg[0], seg[1]
        rel = (z - origin) / direction
        return rel.real, rel.imag  # coordinate along line, signed offset

    def moments_u(self, z, u):
        m1 = m2 = 0.0
        g = 0.0j
        for seg in self.segments:
            origin, direction, a, b, weight, engine = seg
            tau, delta = self._project(z, seg)
            c = math.sqrt(delta * delta + u)
            L1, L2, Ls = engine(tau, c, True)
            m1 += weight * L1
            m2 += weight * L2
            # w - z = direction*(s - tau) - i*direction*delta
            g += weight * (direction * Ls - 1j * direction * delta * L2)
        return m1, m2, g

    def _on_segment(self, z, seg, tol=1e-12):
        tau, delta = self._project(z, seg)
        return abs(delta) <= tol and seg[2] - tol <= tau <= seg[3] + tol

    def f_eval(self, z):
        z = complex(z)
        for seg in self.segments:
            if self._on_segment(z, seg) and self._diverges_at(z, seg):
                return INF
        m1, _, _ = self.moments_u(z, 0.0)
        return m1

    def _diverges_at(self, z, seg):
        """f = inf at points of the segment unless the density vanishes to
        second order there; subclasses refine for endpoints."""
        return True

    def _segment_nodes(self, z, scale):
        wx, wy, wt = [], [], []
        for seg in self.segments:
            origin, direction, a, b, weight, _ = seg
            tau, _ = self._project(z, seg)
            s, w = meshes.line_rule(a, b, [min(max(tau, a), b)],
                                    max(scale, 1e-9), order=12)
            pts = origin + direction * s
            wx.append(pts.real)
            wy.append(pts.imag)
            wt.append(weight * self._density_on(seg, s) * w)
        return np.concatenate(wx), np.concatenate(wy), np.concatenate(wt)

    def _density_on(self, seg, s):
        raise NotImplementedError

    def hess(self, z):
        z = complex(z)
        d = self.spec_distance(z)
        if d <= 0:
            raise ValueError("Hessian requested on the support")
        wx, wy, wt = self._segment_nodes(z, d / 8.0)
        return _hess_from_nodes(wx, wy, wt, z)

    def spec_distance(self, z):
        z = complex(z)
        best = INF
        for seg in self.segments:
            tau, delta = self._project(z, seg)
            dt = max(seg[2] - tau, tau - seg[3], 0.0)
            best = min(best, math.hypot(delta, dt))
        return best


def _beta_poly(alpha, beta):
    ia, ib = int(round(alpha)), int(round(beta))
    co = npoly.polypow([0.0, 1.0], ia - 1)
    co = npoly.polymul(co, npoly.polypow([1.0, -1.0], ib - 1))
    return co / math.exp(betaln(alpha, beta))


class HermitianBeta(_LineModel):
    """Beta(alpha, beta) density on [0,1] placed on the real axis."""

    variant = "hermitian_beta"

    def __init__(self, alpha, beta):
        if alpha <= 0 or beta <= 0:
            raise ValueError("Beta shape parameters must be positive")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self._integer = (abs(alpha - round(alpha)) < 1e-12
                         and abs(beta - round(beta)) < 1e-12)
        if self._integer:
            self._seg = PolySegment(_beta_poly(alpha, beta), 0.0, 1.0)
            engine = self._seg.lorentz
        else:
            engine = self._lorentz_quad
        self.segments = ((0.0 + 0.0j, 1.0 + 0.0j, 0.0, 1.0, 1.0, engine),)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        lb = (self.alpha - 1) * np.log(np.maximum(x, 1e-300)) \
            + (self.beta - 1) * np.log(np.maximum(1 - x, 1e-300))
        out = np.exp(lb - betaln(self.alpha, self.beta))
        return np.where((x < 0) | (x > 1), 0.0, out)

    def _density_on(self, seg, s):
        return self.density(s)

    def _lorentz_quad(self, tau, c, want_ls):
        s, w = meshes.merged_rule(
            0.0, 1.0,
            [([min(max(tau, 0.0), 1.0)], max(c / 8.0, 1e-10)),
             ([0.0, 1.0], 1e-10)], order=12)
        den = self.density(s) * w
        q = (s - tau) ** 2 + c * c
        L1 = float(np.sum(den / q))
        L2 = float(np.sum(den / q ** 2))
        Ls = float(np.sum(den * (s - tau) / q ** 2))
        return L1, L2, Ls

    def _diverges_at(self, z, seg):
        x = z.real
        if abs(x) < 1e-12:
            return self.alpha <= 2.0
        if abs(x - 1.0) < 1e-12:
            return self.beta <= 2.0
        return True

    def f_eval(self, z):
        z = complex(z)
        seg = self.segments[0]
        if self._on_segment(z, seg):
            if self._diverges_at(z, seg):
                return INF
            # finite endpoint value: remove the vanishing factors analytically
            if self._integer:
                return self._f_endpoint_exact(0.0 if abs(z.real) < 1e-12
                                             else 1.0)
            # non-integer finite endpoint: graded quadrature of the
            # integrable integrand density(x)/(x - x0)^2
            x0 = 0.0 if abs(z.real) < 1e-12 else 1.0
            s, w = meshes.line_rule(0.0, 1.0, [x0], 1e-12, order=12)
            return float(np.sum(self.density(s) * w / (s - x0) ** 2))
        return super().f_eval(z)

    def _f_endpoint_exact(self, x0):
        """int P(s)/(s-x0)^2 ds when P vanishes to second order at x0."""
        from math import comb
        co = self._seg.coeffs
        m = len(co)
        if x0 == 0.0:
            k = np.arange(m)
            return float(np.sum(co[2:] / (k[2:] - 1)))
        # expand about 1: P(1+h) = sum_k b_k h^k, h in [-1, 0]
        b = np.zeros(m)
        for k in range(m):
            for j in range(k, m):
                b[k] += co[j] * comb(j, k)
        val = 0.0
        for k in range(2, m):
            val += b[k] * (0.0 - (-1.0) ** (k - 1)) / (k - 1)
        return float(val)

    @property
    def divergent_on_spec(self):
        return self.alpha <= 2.0 and self.beta <= 2.0

    def finite_spec_samples(self, resolution):
        pts = []
        if self.alpha > 2.0:
            pts.append(0.0 + 0.0j)
        if self.beta > 2.0:
            pts.append(1.0 + 0.0j)
        return np.array(pts) if pts else None

    def norm_bound(self):
        return 1.0

    def to_dict(self):
        return {"type": "hermitian_beta", "alpha": self.alpha, "beta": self.beta}


class HermitianTabulated(_LineModel):
    """Piecewise-linear density on a real interval, normalized to mass 1."""

    variant = "hermitian_tabulated"

    def __init__(self, points, values):
        x = np.asarray(points, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.size != v.size or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("points must be increasing and match values")
        if np.any(v < 0):
            raise ValueError("negative density value")
        mass = np.trapezoid(v, x)
        if mass <= 0:
            raise ValueError("density integrates to zero")
        self.x = x
        self.v = v / mass
        self._cells = []
        for i in range(x.size - 1):
            x0, x1 = x[i], x[i + 1]
            v0, v1 = self.v[i], self.v[i + 1]
            slope = (v1 - v0) / (x1 - x0)
            self._cells.append(PolySegment([v0 - slope * x0, slope], x0, x1))
        self.segments = ((0.0 + 0.0j, 1.0 + 0.0j, float(x[0]), float(x[-1]),
                          1.0, self._lorentz_cells),)

    def density(self, s):
        return np.interp(s, self.x, self.v, left=0.0, right=0.0)

    def _density_on(self, seg, s):
        return self.density(s)

    def _lorentz_cells(self, tau, c, want_ls):
        L1 = L2 = Ls = 0.0
        for cell in self._cells:
            a, b, c_ = cell.lorentz(tau, c, want_ls=True)
            L1 += a
            L2 += b
            Ls += c_
        return L1, L2, Ls

    def _diverges_at(self, z, seg):
        # piecewise-linear densities vanish at most to first order, which
        # still gives a logarithmic divergence of f on the support
        return True

    divergent_on_spec = True

    def norm_bound(self):
        return float(np.abs(self.x).max())

    def to_dict(self):
        return {"type": "hermitian_tabulated",
                "points": self.x.tolist(), "values": self.v.tolist()}


class TwoLine(_LineModel):
    """Mass 1/2 on each of the lines Re z = +/-1, normalized y-profile
    proportional to (1+y^2)^3 on [-1, 1]."""

    variant = "two_line"
    divergent_on_spec = True

    def __init__(self):
        co = (35.0 / 192.0) * np.array([1.0, 0.0, 3.0, 0.0, 3.0, 0.0, 1.0])
        self._poly = co
        seg = PolySegment(co, -1.0, 1.0)
        self.segments = (
            (-1.0 + 0.0j, 1j, -1.0, 1.0, 0.5, seg.lorentz),
            (1.0 + 0.0j, 1j, -1.0, 1.0, 0.5, seg.lorentz),
        )

    def density(self, s):
        return npoly.polyval(s, self._poly)

    def _density_on(self, seg, s):
        return self.density(s)

    def norm_bound(self):
        return math.sqrt(2.0)

    def to_dict(self):
        return {"type": "two_line"}


class ProductPower(SpectralModel):
    """Density (p+1)(q+1) x^p y^q on the unit square."""

    variant = "product_power"

    def __init__(self, p, q, nfixed=64):
        if p <= 0 or q <= 0:
            raise ValueError("exponents must be positive")
        self.p = float(p)
        self.q = float(q)
        xj, wxj = meshes.jacobi01(nfixed, self.p)
        yj, wyj = meshes.jacobi01(nfixed, self.q)
        xx, yy = np.meshgrid(xj, yj)
        self.fx = xx.ravel()
        self.fy = yy.ravel()
        self.fw = np.outer(wyj, wxj).ravel()

    def local_density(self, z):
        x, y = z.real, z.imag
        if 0.0 < x < 1.0 and 0.0 < y < 1.0:
            return (self.p + 1) * (self.q + 1) * x ** self.p * y ** self.q
        return 0.0

    def support_distance(self, z):
        dx = max(-z.real, z.real - 1.0, 0.0)
        dy = max(-z.imag, z.imag - 1.0, 0.0)
        return math.hypot(dx, dy)

    def in_open_support(self, z):
        return 0.0 < z.real < 1.0 and 0.0 < z.imag < 1.0

    def _graded_nodes(self, z, scale):
        cx = min(max(z.real, 0.0), 1.0)
        cy = min(max(z.imag, 0.0), 1.0)
        floor = max(scale / 6.0, 1e-9)
        xs, wx = meshes.line_rule(0.0, 1.0, [cx], floor, order=8)
        ys, wy = meshes.line_rule(0.0, 1.0, [cy], floor, order=8)
        wx = wx * (self.p + 1) * xs ** self.p
        wy = wy * (self.q + 1) * ys ** self.q
        X, Y = np.meshgrid(xs, ys)
        W = np.outer(wy, wx)
        return X.ravel(), Y.ravel(), W.ravel()

    def _sums(self, wx, wy, wt, z, u):
        dx = wx - z.real
        dy = wy - z.imag
        q = dx * dx + dy * dy + u
        k = wt / q
        k2 = k / q
        return (float(k.sum()), float(k2.sum()),
                complex(np.sum(k2 * dx), np.sum(k2 * dy)))

    def moments_u(self, z, u):
        d = self.support_distance(z)
        scale = math.sqrt(u + d * d)
        if d > 0.25 and scale > 0.1:
            return self._sums(self.fx, self.fy, self.fw, z, u)
        wx, wy, wt = self._graded_nodes(z, max(scale, 1e-9))
        return self._sums(wx, wy, wt, z, u)

    def f_eval(self, z):
        z = complex(z)
        if self.in_open_support(z):
            return INF
        m1, _, _ = self.moments_u(z, 0.0)
        return m1

    def hess(self, z):
        z = complex(z)
        d = self.support_distance(z)
        if d <= 0:
            raise ValueError("Hessian requested on the support")
        wx, wy, wt = self._graded_nodes(z, d / 8.0)
        return _hess_from_nodes(wx, wy, wt, z)

    def spec_distance(self, z):
        return self.support_distance(complex(z))

    def finite_spec_samples(self, resolution):
        n = max(resolution, 8)
        s = np.linspace(0.0, 1.0, n)
        return np.unique(np.concatenate([s * 1j, s.astype(complex)]))

    def norm_bound(self):
        return math.sqrt(2.0)

    def to_dict(self):
        return {"type": "product_power", "p": self.p, "q": self.q}


class MatrixModel(SpectralModel):
    """Explicit n x n matrix with the normalized trace as the state."""

    variant = "matrix"
    normal = False
    divergent_on_spec = True

    def __init__(self, A):
        self.A = np.asarray(A, dtype=complex)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("matrix must be square")
        self.n = self.A.shape[0]
        self._norm = float(np.linalg.norm(self.A, 2))
        self._eigs = None

    def eigenvalues(self):
        if self._eigs is None:
            self._eigs = np.linalg.eigvals(self.A)
        return self._eigs

    def _svd(self, z):
        W = self.A - z * np.eye(self.n)
        return np.linalg.svd(W)

    def f_eval(self, z):
        U, s, Vh = self._svd(complex(z))
        if s.min() < 1e-12 * (1.0 + self._norm):
            return INF
        return float(np.mean(1.0 / s ** 2))

    def moments_u(self, z, u):
        U, s, Vh = self._svd(z)
        s2 = s ** 2
        if u == 0.0 and s2.min() < 1e-24 * (1.0 + self._norm) ** 2:
            return INF, INF, complex(INF, 0.0)
        D = 1.0 / (s2 + u)
        m1 = float(np.mean(D))
        m2 = float(np.mean(D ** 2))
        VhU = Vh @ U
        g = complex(np.mean(D ** 2 * s * np.diag(VhU)))
        return m1, m2, g

    def moments(self, z, v):
        z = complex(z)
        u = float(v) ** 2
        U, s, Vh = self._svd(z)
        s2 = s ** 2
        if u == 0.0 and s2.min() < 1e-24 * (1.0 + self._norm) ** 2:
            return MomentSet(INF, INF, INF, complex(INF, 0.0))
        D = 1.0 / (s2 + u)
        VhU = Vh @ U
        mixed = float(np.einsum("i,ij,j->", D, np.abs(VhU.conj().T) ** 2, D) / self.n)
        g = complex(np.mean(D ** 2 * s * np.diag(VhU)))
        return MomentSet(m1=float(np.mean(D)), m2=float(np.mean(D ** 2)),
                         mixed=mixed, g=g)

    def _fd(self, z, h):
        fxp = self.f_eval(z + h)
        fxm = self.f_eval(z - h)
        fyp = self.f_eval(z + 1j * h)
        fym = self.f_eval(z - 1j * h)
        return np.array([(fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)])

    def grad(self, z):
        z = complex(z)
        h = 1e-5 * (1.0 + abs(z))
        g1 = self._fd(z, h)
        g2 = self._fd(z, h / 2.0)
        return (4.0 * g2 - g1) / 3.0

    def hess(self, z):
        z = complex(z)
        h = 1e-4 * (1.0 + abs(z))

        def H(step):
            gxp = self._fd(z + step, step)
            gxm = self._fd(z - step, step)
            gyp = self._fd(z + 1j * step, step)
            gym = self._fd(z - 1j * step, step)
            hxx = (gxp[0] - gxm[0]) / (2 * step)
            hxy = 0.5 * ((gyp[0] - gym[0]) / (2 * step)
                         + (gxp[1] - gxm[1]) / (2 * step))
            hyy = (gyp[1] - gym[1]) / (2 * step)
            return np.array([[hxx, hxy], [hxy, hyy]])

        H1 = H(h)
        H2 = H(h / 2.0)
        return (4.0 * H2 - H1) / 3.0

    def spec_distance(self, z, iters=30):
        """1/||(A-z)^{-1}|| estimated by power iteration on (W W*)^{-1}."""
        from scipy.linalg import cho_factor, cho_solve, LinAlgError
        z = complex(z)
        W = self.A - z * np.eye(self.n)
        M = W @ W.conj().T
        try:
            cf = cho_factor(M + 1e-300 * np.eye(self.n))
        except (LinAlgError, np.linalg.LinAlgError):
            return 0.0
        rng = np.random.default_rng(12345)
        x = rng.standard_normal(self.n) + 1j * rng.standard_normal(self.n)
        x /= np.linalg.norm(x)
        lam = 0.0
        for _ in range(iters):
            y = cho_solve(cf, x)
            lam = float(np.linalg.norm(y))
            if lam > 1e24:
                return 0.0
            x = y / lam
        return 1.0 / math.sqrt(lam)

    def norm_bound(self):
        return self._norm

    def to_dict(self):
        rows = [[{"re": v.real, "im": v.imag} for v in row] for row in self.A]
        return {"type": "matrix", "rows": rows}


# -- module-level operations ------------------------------------------------

def f_eval(model, z):
    return model.f_eval(complex(z))


def moments(model, z, v):
    return model.moments(z, v)


def grad_f(model, z):
    return model.grad(z)


def hess_f(model, z):
    return model.hess(z)


def spec_indicator(model, z, margin):
    return model.spec_distance(complex(z)) <= margin


def assumption_check(model, t, resolution=64):
    """Assumption check: f > 1/t on all of spec(a)?"""
    if t <= 0:
        raise ValueError("t must be positive")
    if model.divergent_on_spec:
        return {"holds": True, "certificate": "f divergent on spec(a)",
                "min_f": INF, "witnesses": []}
    pts = model.finite_spec_samples(resolution)
    if pts is None:
        return {"holds": True, "certificate": "f divergent on spec(a)",
                "min_f": INF, "witnesses": []}
    vals = np.array([model.f_eval(z) for z in pts])
    finite = np.isfinite(vals)
    if not np.any(finite):
        return {"holds": True, "certificate": "all sampled values infinite",
                "min_f": INF, "witnesses": []}
    mn = float(vals[finite].min())
    holds = mn > 1.0 / t
    order = np.argsort(np.where(finite, vals, INF))[:5]
    witnesses = [(complex(pts[i]), float(vals[i])) for i in order if finite[i]]
    return {"holds": bool(holds), "certificate": None, "min_f": mn,
            "witnesses": witnesses}


# -- serialization ----------------------------------------------------------

def model_from_dict(d):
    kind = d.get("type")
    if kind == "atomic":
        atoms = d["atoms"]
        return Atomic([complex(a["re"], a.get("im", 0.0)) for a in atoms],
                      [a["w"] for a in atoms])
    if kind == "haar_unitary":
        return HaarUnitary()
    if kind == "product_power":
        return ProductPower(d["p"], d["q"])
    if kind == "hermitian_beta":
        return HermitianBeta(d["alpha"], d["beta"])
    if kind == "hermitian_tabulated":
        return HermitianTabulated(d["points"], d["values"])
    if kind == "two_line":
        return TwoLine()
    if kind == "matrix":
        rows = [[complex(v["re"], v.get("im", 0.0)) for v in row]
                for row in d["rows"]]
        return MatrixModel(rows)
    raise ValueError(f"unknown model type: {kind!r}")


def model_to_json(model):
    return json.dumps(model.to_dict())


def model_from_json(text):
    return model_from_dict(json.loads(text))
