"""Exact integrals of polynomials against Lorentzian kernels.

For a real polynomial P(s) = sum_k c_k s^k on [a, b] and q(s) = (s-Y)^2 + c^2
with c > 0, these routines return

    L1 = int P/q ds,   L2 = int P/q^2 ds,   Ls = int P(s)(s-Y)/q^2 ds,

via the complex pole p = Y + ic and the primitives

    Phi(p) = int_a^b P(s)/(s-p) ds,   Psi(p) = int_a^b P(s)/(s-p)^2 ds,

using  1/q = (1/2ic)[1/(s-p) - c.c.]  and  1/q^2 = -(1/4c^2)[1/(s-p)^2 + c.c.]
+ 1/(2c^2 q).  All quantities vectorize over arrays of (Y, c).

For poles far from [a, b] the I_k recurrence loses digits to cancellation, so
Phi and Psi switch to the Laurent series in 1/p built from the fixed power
moments of P on [a, b].
"""

import numpy as np


def _moments(coeffs, a, b, nmax):
    """M_n = int_a^b P(s) s^n ds for n = 0..nmax-1."""
    k = np.arange(len(coeffs))
    out = np.empty(nmax)
    for n in range(nmax):
        out[n] = np.sum(coeffs * (b ** (k + n + 1) - a ** (k + n + 1)) / (k + n + 1))
    return out


class PolySegment:
    """Polynomial density on [a, b] with precomputed data for the integrals."""

    def __init__(self, coeffs, a, b, nser=48):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.dcoeffs = self.coeffs[1:] * np.arange(1, len(self.coeffs))
        self.a = float(a)
        self.b = float(b)
        self.mom = _moments(self.coeffs, a, b, nser)
        self.dmom = _moments(self.dcoeffs, a, b, nser) if len(self.dcoeffs) else np.zeros(nser)
        self.rfar = 4.0 * max(abs(a), abs(b), 1e-30)

    def _phi_psi_direct(self, coeffs, p):
        ik = np.log((self.b - p) / (self.a - p))
        jk = 1.0 / (self.a - p) - 1.0 / (self.b - p)
        phi = coeffs[0] * ik
        psi = coeffs[0] * jk
        bk = ak = 1.0
        for k in range(1, len(coeffs)):
            bk *= self.b
            ak *= self.a
            jk = ak / (self.a - p) - bk / (self.b - p) + k * ik
            ik = (bk - ak) / k + p * ik
            phi = phi + coeffs[k] * ik
            psi = psi + coeffs[k] * jk
        return phi, psi

    def _phi_psi_series(self, mom, p):
        pinv = 1.0 / p
        phi = np.zeros_like(p)
        psi = np.zeros_like(p)
        pw = pinv.copy()
        for n in range(len(mom)):
            phi = phi - mom[n] * pw
            pw = pw * pinv
            psi = psi + (n + 1) * mom[n] * pw
        return phi, psi

    def phi_psi(self, p, deriv=False):
        """Phi, Psi for P (or for P' when deriv=True), vectorized over p."""
        p = np.asarray(p, dtype=complex)
        coeffs = self.dcoeffs if deriv else self.coeffs
        mom = self.dmom if deriv else self.mom
        if len(coeffs) == 0:
            z = np.zeros_like(p)
            return z, z
        far = np.abs(p) > self.rfar
        phi = np.empty_like(p)
        psi = np.empty_like(p)
        if np.any(~far):
            ph, ps = self._phi_psi_direct(coeffs, p[~far])
            phi[~far] = ph
            psi[~far] = ps
        if np.any(far):
            ph, ps = self._phi_psi_series(mom, p[far])
            phi[far] = ph
            psi[far] = ps
        return phi, psi

    def polyval(self, s):
        return np.polynomial.polynomial.polyval(s, self.coeffs)

    def _shifted(self, Y):
        """Coefficients of P(Y + h) in h, vectorized over Y: b[k] shape of Y."""
        m = len(self.coeffs)
        out = []
        from math import comb
        for k in range(m):
            acc = np.zeros_like(Y)
            pw = np.ones_like(Y)
            for j in range(k, m):
                acc = acc + self.coeffs[j] * comb(j, k) * pw
                pw = pw * Y
            out.append(acc)
        return out

    def _exterior_series(self, Y, c, nser=16):
        """L1, L2, Ls by the (c/d)^2 expansion, for poles with c << dist."""
        da = self.a - Y
        db = self.b - Y
        bcoef = self._shifted(Y)
        deg = len(bcoef) - 1
        # T[e] = int (s-Y)^e ds for e = deg down to -(2*nser+4)
        T = {}
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            pa = da ** (deg + 1)
            pb = db ** (deg + 1)
            for e in range(deg, -(2 * nser + 5), -1):
                if e == -1:
                    T[e] = np.log(db / da)
                else:
                    T[e] = (pb - pa) / (e + 1)
                pa = pa / da
                pb = pb / db
        def S(r):
            acc = np.zeros_like(Y)
            for k in range(deg + 1):
                acc = acc + bcoef[k] * T[k - r]
            return acc
        L1 = np.zeros_like(Y)
        L2 = np.zeros_like(Y)
        Ls = np.zeros_like(Y)
        c2n = np.ones_like(Y)
        # elementwise truncation: once deep negative powers of the distance
        # overflow, the remaining terms are below the series truncation error
        # (the expansion ratio (c/d)^2 is < 1/16 on this branch)
        alive = np.ones(Y.shape, dtype=bool)
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(nser):
                sgn = -1.0 if n % 2 else 1.0
                t1 = sgn * c2n * S(2 * n + 2)
                t2 = sgn * (n + 1) * c2n * S(2 * n + 4)
                t3 = sgn * (n + 1) * c2n * S(2 * n + 3)
                alive &= np.isfinite(t1) & np.isfinite(t2) & np.isfinite(t3)
                L1 = L1 + np.where(alive, t1, 0.0)
                L2 = L2 + np.where(alive, t2, 0.0)
                Ls = Ls + np.where(alive, t3, 0.0)
                c2n = c2n * c * c
        return L1, L2, Ls

    def lorentz(self, Y, c, want_ls=False):
        """L1, L2 (and Ls) at pole location Y +/- ic, elementwise."""
        scalar = np.isscalar(Y) or (np.ndim(Y) == 0 and np.ndim(c) == 0)
        Y = np.atleast_1d(np.asarray(Y, dtype=float))
        c = np.atleast_1d(np.asarray(c, dtype=float)) + np.zeros_like(Y)
        dist = np.maximum(self.a - Y, Y - self.b)
        ext = (dist > 0) & (c < 0.25 * dist)
        L1 = np.empty_like(Y)
        L2 = np.empty_like(Y)
        Ls = np.empty_like(Y)
        if np.any(~ext):
            Yi = Y[~ext]
            ci = c[~ext]
            p = Yi + 1j * ci
            phi, psi = self.phi_psi(p)
            L1[~ext] = phi.imag / ci
            L2[~ext] = phi.imag / (2.0 * ci ** 3) - psi.real / (2.0 * ci ** 2)
            if want_ls:
                dphi, _ = self.phi_psi(p, deriv=True)
                qa = (self.a - Yi) ** 2 + ci ** 2
                qb = (self.b - Yi) ** 2 + ci ** 2
                Ls[~ext] = 0.5 * (self.polyval(self.a) / qa - self.polyval(self.b) / qb) \
                    + dphi.imag / (2.0 * ci)
        if np.any(ext):
            l1, l2, ls = self._exterior_series(Y[ext], c[ext])
            L1[ext] = l1
            L2[ext] = l2
            Ls[ext] = ls
        if scalar:
            if want_ls:
                return float(L1[0]), float(L2[0]), float(Ls[0])
            return float(L1[0]), float(L2[0])
        if want_ls:
            return L1, L2, Ls
        return L1, L2
