"""Finite-N validation against A + sqrt(t) X with X complex Ginibre.

Every empirical quantity is a trace or log-determinant of the Hermitian
positive-definite matrix W W* + eta^2 (W = A + sqrt(t)X - z), obtained from
one Cholesky factorization per (z, seed):

    f_hat(z)   = (1/N) Tr[(W W* + eta^2)^{-1}]
    v_hat(z)   = eta + t * eta * f_hat(z)
    rho_hat(z) = Laplacian of (1/N) log det(W W* + eta^2) / (4 pi)   (5-point)

No non-Hermitian eigendecomposition is used anywhere.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from . import density, dyson
from .kernels import (Atomic, HaarUnitary, HermitianBeta, HermitianTabulated,
                      MatrixModel, ProductPower, TwoLine)

_ROLE_GINIBRE = 1
_ROLE_DIAG = 2
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _rng(seed, role):
    return np.random.Generator(np.random.Philox(key=np.array(
        [np.uint64(seed), np.uint64(role)], dtype=np.uint64)))


@dataclass
class MatrixRealization:
    N: int
    A: np.ndarray
    provenance: str
    seed: int


@dataclass
class ValidationReport:
    model: str
    t: float
    eta: float
    N: int
    seeds: list
    z: list
    v_analytic: list
    v_empirical: list
    rho_analytic: list
    rho_empirical: list
    summary: dict = field(default_factory=dict)

    def to_json(self):
        d = dict(self.__dict__)
        d["z"] = [[z.real, z.imag] for z in self.z]
        return json.dumps(d, indent=2)


# -- realizations -----------------------------------------------------------

def _midranks(m):
    return (np.arange(m) + 0.5) / m


def _two_line_quantiles(m):
    """y-values with normalized CDF (35/192) int_{-1}^{y}(1+s^2)^3 ds at the
    mid ranks."""
    co = (35.0 / 192.0) * np.array([1.0, 0.0, 3.0, 0.0, 3.0, 0.0, 1.0])
    anti = np.concatenate([[0.0], co / np.arange(1, 8)])
    def cdf(y):
        return np.polynomial.polynomial.polyval(y, anti) \
            - np.polynomial.polynomial.polyval(-1.0, anti)
    targets = _midranks(m)
    lo = -np.ones(m)
    hi = np.ones(m)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def realize_matrix(model, N, seed=0):
    """Deterministic (seed=0) or sampled (seed>0) N x N stand-in for a."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if isinstance(model, Atomic):
        m = model.loc.size
        if N < m:
            raise ValueError("N smaller than the number of atoms")
        raw = model.w * N
        counts = np.floor(raw).astype(int)
        rem = raw - counts
        for k in np.argsort(rem)[::-1][: N - counts.sum()]:
            counts[k] += 1
        diag = np.repeat(model.loc, counts)
        return MatrixRealization(N=N, A=np.diag(diag),
                                 provenance="atomic/largest-remainder",
                                 seed=seed)
    if isinstance(model, HaarUnitary):
        A = np.zeros((N, N), dtype=complex)
        A[np.arange(N - 1), np.arange(1, N)] = 1.0
        return MatrixRealization(N=N, A=A, provenance="haar/jordan-shift",
                                 seed=seed)
    if isinstance(model, ProductPower):
        if seed == 0:
            u = _midranks(N)
            w = np.mod((np.arange(N) + 1) * _GOLDEN, 1.0)
            prov = "product_power/quantiles"
        else:
            rng = _rng(seed, _ROLE_DIAG)
            u = rng.random(N)
            w = rng.random(N)
            prov = "product_power/iid"
        x = u ** (1.0 / (model.p + 1.0))
        y = w ** (1.0 / (model.q + 1.0))
        return MatrixRealization(N=N, A=np.diag(x + 1j * y),
                                 provenance=prov, seed=seed)
    if isinstance(model, HermitianBeta):
        from scipy.stats import beta as beta_dist
        if seed == 0:
            u = _midranks(N)
            prov = "hermitian_beta/quantiles"
        else:
            u = _rng(seed, _ROLE_DIAG).random(N)
            prov = "hermitian_beta/iid"
        d = beta_dist.ppf(u, model.alpha, model.beta)
        return MatrixRealization(N=N, A=np.diag(d.astype(complex)),
                                 provenance=prov, seed=seed)
    if isinstance(model, HermitianTabulated):
        u = _midranks(N) if seed == 0 else _rng(seed, _ROLE_DIAG).random(N)
        cdf = np.concatenate([[0.0], np.cumsum(
            0.5 * (model.v[1:] + model.v[:-1]) * np.diff(model.x))])
        cdf /= cdf[-1]
        d = np.interp(u, cdf, model.x)
        return MatrixRealization(N=N, A=np.diag(d.astype(complex)),
                                 provenance="hermitian_tabulated/quantiles",
                                 seed=seed)
    if isinstance(model, TwoLine):
        m = N // 2
        y = _two_line_quantiles(m)
        diag = np.concatenate([1.0 + 1j * y, -1.0 + 1j * y])
        if diag.size < N:                      # odd N: balance with one extra
            diag = np.append(diag, 1.0 + 0.0j)
        return MatrixRealization(N=N, A=np.diag(diag),
                                 provenance="two_line/quantiles", seed=seed)
    if isinstance(model, MatrixModel):
        reps = -(-N // model.n)
        blocks = [model.A] * reps
        from scipy.linalg import block_diag
        A = block_diag(*blocks)
        return MatrixRealization(N=A.shape[0], A=A,
                                 provenance="matrix/block-repeat", seed=seed)
    raise ValueError(f"no realization rule for variant {model.variant!r}")


def sample_ginibre(N, seed):
    """Complex Ginibre: i.i.d. entries, E|X_ij|^2 = 1/N, Philox stream."""
    rng = _rng(seed, _ROLE_GINIBRE)
    scale = math.sqrt(1.0 / (2.0 * N))
    return scale * (rng.standard_normal((N, N))
                    + 1j * rng.standard_normal((N, N)))


# -- Hermitized functionals -------------------------------------------------

def _chol_funcs(W, eta):
    """(trace-inverse mean, log-det mean) of W W* + eta^2 via Cholesky."""
    N = W.shape[0]
    M = W @ W.conj().T + (eta * eta) * np.eye(N)
    L = cholesky(M, lower=True)
    X = solve_triangular(L, np.eye(N), lower=True)
    tr_inv = float(np.sum(np.abs(X) ** 2)) / N
    logdet = 2.0 * float(np.sum(np.log(np.diag(L).real))) / N
    return tr_inv, logdet


def empirical_f(W, eta):
    """(1/N) Tr[(W W* + eta^2)^{-1}]."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    return _chol_funcs(np.asarray(W, dtype=complex), eta)[0]


def empirical_v(model, z, eta, t, N, seeds):
    """Per-seed v_hat = eta + t*eta*f_hat(z) plus the analytic value."""
    z = complex(z)
    A = realize_matrix(model, N).A
    n = A.shape[0]
    vals = []
    for seed in seeds:
        W = A + math.sqrt(t) * sample_ginibre(n, seed) - z * np.eye(n)
        vals.append(eta + t * eta * empirical_f(W, eta))
    vals = np.array(vals)
    analytic = dyson.solve_v(model, z, eta, t).v
    return {"mean": float(vals.mean()), "spread": float(vals.std()),
            "values": vals.tolist(), "analytic": analytic}


def empirical_rho_reg(model, z, eta, t, N, h=None, seed=1):
    """5-point Laplacian of the empirical log-potential / (4 pi)."""
    z = complex(z)
    if h is None:
        h = max(eta / 4.0, 1e-3)
    A = realize_matrix(model, N).A
    n = A.shape[0]
    B = A + math.sqrt(t) * sample_ginibre(n, seed)
    return _rho_from_B(B, z, eta, h)


def _rho_from_B(B, z, eta, h):
    n = B.shape[0]
    eye = np.eye(n)
    lds = []
    for dz in (0.0, h, -h, 1j * h, -1j * h):
        _, ld = _chol_funcs(B - (z + dz) * eye, eta)
        lds.append(ld)
    lap = (sum(lds[1:]) - 4.0 * lds[0]) / (h * h)
    return lap / (4.0 * math.pi)


def _max_workers():
    cap = os.environ.get("BROWNEDGE_THREADS")
    if cap:
        return max(1, int(cap))
    return min(8, os.cpu_count() or 1)


def validate(model, t, grid, N, eta, seeds):
    """Empirical-vs-analytic v and rho_reg over a grid; summary stats."""
    Z = [complex(z) for z in np.asarray(grid.points()).ravel()]
    h = max(eta / 4.0, 1e-3)
    A = realize_matrix(model, N).A
    n = A.shape[0]
    eye = np.eye(n)
    sq = math.sqrt(t)
    Bs = {seed: A + sq * sample_ginibre(n, seed) for seed in seeds}

    def _per_point(z):
        v_emp = []
        r_emp = []
        for seed in seeds:
            B = Bs[seed]
            tr, ld0 = _chol_funcs(B - z * eye, eta)
            v_emp.append(eta + t * eta * tr)
            lds = [ld0]
            for dz in (h, -h, 1j * h, -1j * h):
                lds.append(_chol_funcs(B - (z + dz) * eye, eta)[1])
            r_emp.append((sum(lds[1:]) - 4.0 * lds[0]) / (h * h) / (4 * math.pi))
        return float(np.median(v_emp)), float(np.median(r_emp))

    with ThreadPoolExecutor(max_workers=_max_workers()) as ex:
        emp = list(ex.map(_per_point, Z))

    v_an = [dyson.solve_v(model, z, eta, t).v for z in Z]
    r_an = [density.rho_reg(model, z, eta, t) for z in Z]
    v_emp = [e[0] for e in emp]
    r_emp = [e[1] for e in emp]
    v_err = np.abs(np.array(v_emp) - np.array(v_an)) / np.array(v_an)
    scale = max(np.max(r_an), 1e-12)
    r_err = np.abs(np.array(r_emp) - np.array(r_an)) / scale
    report = ValidationReport(
        model=model.variant, t=t, eta=eta, N=N, seeds=list(seeds), z=Z,
        v_analytic=v_an, v_empirical=v_emp,
        rho_analytic=r_an, rho_empirical=r_emp,
        summary={
            "v_median_rel_err": float(np.median(v_err)),
            "v_max_rel_err": float(np.max(v_err)),
            "rho_median_rel_err": float(np.median(r_err)),
            "rho_max_rel_err": float(np.max(r_err)),
        })
    return report
