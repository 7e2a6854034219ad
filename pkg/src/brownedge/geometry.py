"""Level-set geometry of the support: boundary tracing, critical points,
connectivity counting.

The support closure is {f_a >= 1/t}; its boundary is the level set
{f_a = 1/t}.  Tracing uses marching squares on a sign grid with every edge
crossing refined by bisection, then chains cell segments into curves.
Critical points of f (where edges can be quadratic instead of sharp) come
from damped Newton on grad f seeded at grid minima of |grad f|^2.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import density
from .kernels import (Atomic, HaarUnitary, MatrixModel, ProductPower,
                      _LineModel)

POSITION_TOL = 1e-10          # bisection tolerance along a cell edge
CRIT_GRAD_TOL = 1e-10         # |grad f| <= tol*(1+||H||) at converged points
DEGENERATE_TOL = 1e-8         # |det H| < tol*||H||^2 -> degenerate
MERGE_RADIUS = 1e-6


@dataclass
class BoundaryCurve:
    vertices: np.ndarray          # complex, ordered
    grad_norms: np.ndarray
    normals: np.ndarray           # complex inward normals
    closed: bool


@dataclass
class CriticalPoint:
    z: complex
    grad_norm: float
    H: np.ndarray
    eigvals: tuple                # (lam1 >= lam2)
    kind: str                     # local-min | saddle | degenerate
    t_star: float


def spec_distance_points(model, Z):
    """dist(z, spec(a)) vectorized over an array of points."""
    Z = np.asarray(Z, dtype=complex)
    flat = Z.ravel()
    if isinstance(model, Atomic):
        out = np.abs(flat[:, None] - model.loc[None, :]).min(axis=1)
    elif isinstance(model, HaarUnitary):
        out = np.abs(np.abs(flat) - 1.0)
    elif isinstance(model, ProductPower):
        out = density._pp_support_distance(flat)
    elif isinstance(model, _LineModel):
        out = np.full(flat.size, np.inf)
        for seg in model.segments:
            origin, direction, a, b = seg[0], seg[1], seg[2], seg[3]
            rel = (flat - origin) / direction
            dt = np.maximum(np.maximum(a - rel.real, rel.real - b), 0.0)
            out = np.minimum(out, np.hypot(rel.imag, dt))
    elif isinstance(model, MatrixModel):
        ev = model.eigenvalues()
        out = np.abs(flat[:, None] - ev[None, :]).min(axis=1)
    else:
        out = np.array([model.spec_distance(z) for z in flat])
    return out.reshape(Z.shape)


# -- boundary tracing -------------------------------------------------------

def _refine_crossings(model, t, za, zb):
    """Vectorized bisection of f - 1/t along the segments [za, zb]."""
    target = 1.0 / t
    lo = np.zeros(za.size)
    hi = np.ones(za.size)
    above_a = density.f_points(model, za, t) > target
    span = np.abs(zb - za).max() if za.size else 0.0
    iters = max(int(math.ceil(math.log2(max(span, 1e-12) / POSITION_TOL))), 40)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = density.f_points(model, za + mid * (zb - za), t)
        mid_above = fm > target
        move_lo = mid_above == above_a
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    s = 0.5 * (lo + hi)
    return za + s * (zb - za)


_SEG_TABLE = {
    # marching-squares cases: corner order (bottom-left, bottom-right,
    # top-right, top-left); edges 0=bottom 1=right 2=top 3=left
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)],
    7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)], 11: [(2, 1)], 12: [(1, 3)],
    13: [(1, 0)], 14: [(0, 3)],
}


def trace_boundary(model, t, grid):
    """List of BoundaryCurve for the level set f = 1/t."""
    t = float(t)
    x, y = grid.axes()
    Z = grid.points()
    F = density.f_points(model, Z, t)
    above = F > 1.0 / t

    # collect crossing edges: horizontal (i,j)-(i,j+1), vertical (i,j)-(i+1,j)
    hmask = above[:, :-1] != above[:, 1:]
    vmask = above[:-1, :] != above[1:, :]
    hidx = {key: k for k, key in enumerate(zip(*np.nonzero(hmask)))}
    vidx = {key: k + len(hidx) for k, key in enumerate(zip(*np.nonzero(vmask)))}
    n_cross = len(hidx) + len(vidx)
    if n_cross == 0:
        return []
    za = np.empty(n_cross, dtype=complex)
    zb = np.empty(n_cross, dtype=complex)
    for (i, j), k in hidx.items():
        za[k] = Z[i, j]
        zb[k] = Z[i, j + 1]
    for (i, j), k in vidx.items():
        za[k] = Z[i, j]
        zb[k] = Z[i + 1, j]
    pts = _refine_crossings(model, t, za, zb)

    # per-cell segments joining crossing edges
    adj = {k: [] for k in range(n_cross)}
    ny, nx = above.shape
    for i in range(ny - 1):
        for j in range(nx - 1):
            code = (int(above[i, j]) | int(above[i, j + 1]) << 1
                    | int(above[i + 1, j + 1]) << 2 | int(above[i + 1, j]) << 3)
            if code in (0, 15):
                continue
            if code in (5, 10):
                # ambiguous saddle: split by the cell-center value
                fc = density.f_points(
                    model, np.array([(Z[i, j] + Z[i + 1, j + 1]) / 2.0]), t)[0]
                center_above = fc > 1.0 / t
                if code == 5:
                    pairs = [(3, 0), (1, 2)] if center_above else [(3, 2), (1, 0)]
                else:
                    pairs = [(0, 1), (2, 3)] if center_above else [(0, 3), (2, 1)]
            else:
                pairs = _SEG_TABLE[code]
            edge_ids = {
                0: hidx.get((i, j)), 2: hidx.get((i + 1, j)),
                3: vidx.get((i, j)), 1: vidx.get((i, j + 1)),
            }
            for a, b in pairs:
                ka, kb = edge_ids[a], edge_ids[b]
                if ka is None or kb is None:
                    continue
                adj[ka].append(kb)
                adj[kb].append(ka)

    curves = []
    seen = np.zeros(n_cross, dtype=bool)
    cell = math.hypot(x[1] - x[0], y[1] - y[0])
    def _walk(prev, node):
        out = []
        while node is not None and not seen[node]:
            out.append(node)
            seen[node] = True
            nxt = [m for m in adj[node] if m != prev and not seen[m]]
            prev, node = node, (nxt[0] if nxt else None)
        return out

    for start in range(n_cross):
        if seen[start] or not adj[start]:
            continue
        seen[start] = True
        chain = [start]
        fwd = [m for m in adj[start] if not seen[m]]
        if fwd:
            chain = chain + _walk(start, fwd[0])
        bwd = [m for m in adj[start] if not seen[m]]
        if bwd:
            chain = list(reversed(_walk(start, bwd[0]))) + chain
        verts = pts[chain]
        closed = len(chain) > 2 and abs(verts[0] - verts[-1]) < 2.0 * cell
        grads = np.array([model.grad(z) for z in verts])
        gnorm = np.linalg.norm(grads, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            normals = (grads[:, 0] + 1j * grads[:, 1]) / gnorm
        curves.append(BoundaryCurve(vertices=verts, grad_norms=gnorm,
                                    normals=normals, closed=bool(closed)))
    return curves


# -- critical points --------------------------------------------------------

def find_critical_points(model, box, seed_resolution=60):
    """Damped Newton on grad f = 0 from seed-grid minima of |grad f|^2."""
    lo, hi = complex(box[0]), complex(box[1])
    xs = np.linspace(lo.real, hi.real, seed_resolution)
    ys = np.linspace(lo.imag, hi.imag, seed_resolution)
    Z = xs[None, :] + 1j * ys[:, None]
    cell = math.hypot(xs[1] - xs[0], ys[1] - ys[0])
    dist = spec_distance_points(model, Z)
    g2 = _grad_sq_points(model, Z)
    g2 = np.where(dist > cell, g2, np.inf)
    # strict local minima over 3x3 neighborhoods, excluding the border ring
    mn = ndimage.minimum_filter(g2, size=3, mode="constant", cval=np.inf)
    seeds = (g2 == mn) & np.isfinite(g2)
    seeds[0, :] = seeds[-1, :] = False
    seeds[:, 0] = seeds[:, -1] = False
    found = []
    for i, j in np.argwhere(seeds):
        z = _newton_critical(model, complex(Z[i, j]), lo, hi)
        if z is None:
            continue
        if any(abs(z - c.z) < MERGE_RADIUS for c in found):
            continue
        H = model.hess(z)
        hn = np.linalg.norm(H, 2)
        gn = float(np.linalg.norm(model.grad(z)))
        if gn > CRIT_GRAD_TOL * (1.0 + hn):
            continue
        lam = np.sort(np.linalg.eigvalsh(H))[::-1]
        det = lam[0] * lam[1]
        if abs(det) < DEGENERATE_TOL * hn ** 2:
            kind = "degenerate"
        elif det > 0:
            kind = "local-min"
        else:
            kind = "saddle"
        f = model.f_eval(z)
        found.append(CriticalPoint(z=z, grad_norm=gn, H=H,
                                   eigvals=(float(lam[0]), float(lam[1])),
                                   kind=kind, t_star=1.0 / f))
    return found


def _grad_sq_points(model, Z):
    """|grad f|^2 = 4|g(z,0)|^2 on an array, with scalar fallback."""
    flat = Z.ravel()
    if isinstance(model, Atomic):
        d = model.loc[None, :] - flat[:, None]
        d2 = d.real ** 2 + d.imag ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (model.w[None, :] * d / d2 ** 2).sum(axis=1)
        out = 4.0 * np.abs(g) ** 2
    elif isinstance(model, HaarUnitary):
        s = np.abs(flat) ** 2
        with np.errstate(divide="ignore"):
            fp = np.where(s > 1.0, -1.0 / (s - 1.0) ** 2, 1.0 / (1.0 - s) ** 2)
        out = 4.0 * np.abs(flat) ** 2 * fp ** 2
    elif isinstance(model, _LineModel) and density._line_vectorizable(model):
        _, _, g = density._line_moments_vec(model, flat, np.zeros(flat.size))
        out = 4.0 * np.abs(g) ** 2
    else:
        out = np.empty(flat.size)
        for k, z in enumerate(flat):
            try:
                _, _, g = model.moments_u(complex(z), 0.0)
                out[k] = 4.0 * abs(g) ** 2
            except (ValueError, ArithmeticError):
                out[k] = np.inf
    out = np.where(np.isfinite(out), out, np.inf)
    return out.reshape(Z.shape)


def _newton_critical(model, z, lo, hi, max_iter=100):
    for _ in range(max_iter):
        if not (lo.real <= z.real <= hi.real and lo.imag <= z.imag <= hi.imag):
            return None
        if model.spec_distance(z) < 1e-9:
            return None
        g = model.grad(z)
        H = model.hess(z)
        hn = np.linalg.norm(H, 2)
        gn = np.linalg.norm(g)
        if gn <= CRIT_GRAD_TOL * (1.0 + hn):
            return _valley_polish(model, z, H, hn)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return None
        s = 1.0
        for _ in range(30):
            zn = z + s * complex(step[0], step[1])
            if (lo.real <= zn.real <= hi.real
                    and lo.imag <= zn.imag <= hi.imag
                    and model.spec_distance(zn) > 1e-9
                    and np.linalg.norm(model.grad(zn)) < gn):
                break
            s *= 0.5
        else:
            return None
        z = zn
    return None


def _valley_polish(model, z, H, hn):
    """Near a degenerate critical point Newton stalls inside a flat valley
    (|grad f| below tolerance while still displaced along the near-null
    Hessian direction, where the gradient grows only cubically).  Minimize
    |grad f|^2 along that direction to land on the true critical point."""
    lam, vec = np.linalg.eigh(H)
    k = int(np.argmin(np.abs(lam)))
    if abs(lam[k]) > 1e-3 * hn:
        return z
    e = complex(vec[0, k], vec[1, k])
    from scipy.optimize import minimize_scalar

    def phi(s):
        zz = z + s * e
        if model.spec_distance(zz) < 1e-9:
            return np.inf
        g = model.grad(zz)
        return float(g @ g)

    res = minimize_scalar(phi, bounds=(-1e-2, 1e-2), method="bounded",
                          options={"xatol": 1e-14})
    if res.fun < phi(0.0):
        return z + res.x * e
    return z


def sector_membership(H, w, kappa):
    """True iff w avoids the null-space sector: ||P w||^2/||w||^2 < 1-kappa."""
    w = np.asarray(w, dtype=float)
    n2 = float(w @ w)
    if n2 == 0:
        raise ValueError("direction vector must be nonzero")
    H = np.asarray(H, dtype=float)
    hn = np.linalg.norm(H, 2)
    if hn == 0:
        return False
    lam, vec = np.linalg.eigh(H)
    null = np.abs(lam) < 1e-6 * hn
    if not np.any(null):
        return True
    P = vec[:, null] @ vec[:, null].T
    return float(w @ P @ w) / n2 < 1.0 - kappa


# -- connectivity -----------------------------------------------------------

def _support_mask(model, t, grid):
    Z = grid.points()
    F = density.f_points(model, Z, t)
    mask = F >= 1.0 / t
    x, y = grid.axes()
    cell = math.hypot(x[1] - x[0], y[1] - y[0])
    mask |= spec_distance_points(model, Z) <= cell
    return mask


_EIGHT = np.ones((3, 3), dtype=int)


def count_components(model, t, grid):
    """Connected components of {f >= 1/t} union spec(a), 8-connectivity."""
    mask = _support_mask(model, t, grid)
    _, n = ndimage.label(mask, structure=_EIGHT)
    return int(n)


def connectivity_scan(model, t_list, grid):
    t_list = list(t_list)
    if any(b < a for a, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list must be ascending")
    counts = [count_components(model, t, grid) for t in t_list]
    verdict = all(b <= a for a, b in zip(counts, counts[1:]))
    return counts, verdict


def euler_annulus_probe(model, t, grid):
    """Component counts of the support raster and of its bounded complement."""
    mask = _support_mask(model, t, grid)
    _, n_set = ndimage.label(mask, structure=_EIGHT)
    lab, n_comp = ndimage.label(~mask)      # 4-connectivity for complement
    border = np.unique(np.concatenate([
        lab[0, :], lab[-1, :], lab[:, 0], lab[:, -1]]))
    holes = len(set(range(1, n_comp + 1)) - set(border.tolist()))
    return {"components": int(n_set), "holes": int(holes)}
