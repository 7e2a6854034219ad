"""Density formulas, edge quantities, and mass integration."""

import math

import numpy as np
import pytest

from brownedge import density, kernels


PM = kernels.Atomic([0.0], [1.0])
A4 = kernels.Atomic([1, -1, 1j, -1j], [0.25] * 4)


class TestScalarDensity:
    def test_circular_law_value(self):
        for z in (0.0, 0.5, 0.3 - 0.6j):
            assert density.rho(PM, z, 1.0) == pytest.approx(1.0 / math.pi,
                                                            abs=1e-12)
        assert density.rho(PM, 1.2, 1.0) == 0.0

    def test_haar_vs_closed_form(self):
        # for the Haar model rho has the explicit radial form through the
        # closed-form u(s, t); compare against the generic moment formula
        m = kernels.HaarUnitary()
        t = 1.0
        for r in (0.2, 0.6, 1.1, 1.35):
            z = r * np.exp(0.7j)
            u = m.solve_u0(z, t)
            s = r * r
            c = math.sqrt(4.0 * s + t * t)
            ref = (u * c / t ** 3 + s * (2.0 - c) ** 2 / (t ** 3 * c)) / math.pi
            assert density.rho(m, z, t) == pytest.approx(ref, rel=1e-9)

    def test_universal_bound(self):
        t = 0.5
        cap = 1.0 / (math.pi * t)
        for z in (0.9, 1.0j, 0.5 + 0.5j):
            val = density.rho(A4, z, t)
            assert 0.0 <= val <= cap

    def test_rho_reg_requires_positive_eta(self):
        with pytest.raises(ValueError):
            density.rho_reg(PM, 0.0, 0.0, 1.0)

    def test_rho_reg_converges_to_rho_in_bulk(self):
        z, t = 0.4, 1.0
        target = density.rho(PM, z, t)
        vals = [density.rho_reg(PM, z, e, t) for e in (1e-3, 1e-5, 1e-7)]
        errs = [abs(v - target) for v in vals]
        assert errs[-1] < 1e-6 and errs[0] > errs[-1]


class TestVectorizedPaths:
    @pytest.mark.parametrize("model,t", [
        (A4, 0.5),
        (kernels.HaarUnitary(), 1.0),
        (kernels.TwoLine(), 2.0),
        (kernels.HermitianBeta(3.0, 4.0), 0.4),
        (kernels.ProductPower(1.0, 1.5), 0.9),
    ])
    def test_rho_points_matches_scalar(self, model, t):
        rng = np.random.default_rng(5)
        Z = 2.4 * (rng.random(40) - 0.3) + 1j * 2.4 * (rng.random(40) - 0.5)
        vec = density.rho_points(model, Z, t)
        ref = np.array([density.rho(model, z, t) for z in Z])
        # the 2-D product model rides a shared coarse mesh away from its
        # refinement bands, so its fast path is only ~1e-6 accurate
        tol = 1e-5 if isinstance(model, kernels.ProductPower) else 1e-7
        assert np.allclose(vec, ref, rtol=tol, atol=1e-10)

    def test_rho_reg_points_matches_scalar(self):
        rng = np.random.default_rng(6)
        Z = (rng.random(30) * 3 - 1) + 1j * (rng.random(30) * 2 - 1)
        for model, t in ((kernels.TwoLine(), 1.5),
                         (kernels.HermitianBeta(3.0, 4.0), 0.3)):
            vec = density.rho_reg_points(model, Z, 1e-2, t)
            ref = np.array([density.rho_reg(model, z, 1e-2, t) for z in Z])
            assert np.allclose(vec, ref, rtol=1e-10)

    def test_f_points_matches_scalar(self):
        rng = np.random.default_rng(7)
        Z = (rng.random(25) * 3 - 1.2) + 1j * (rng.random(25) * 3 - 1.5)
        for model in (A4, kernels.HaarUnitary(), kernels.TwoLine(),
                      kernels.HermitianBeta(3.0, 4.0)):
            vec = density.f_points(model, Z)
            ref = np.array([model.f_eval(z) for z in Z])
            assert np.allclose(vec, ref, rtol=1e-9)


class TestEdgeQuantities:
    def test_point_mass_jump(self):
        # on |z| = 1 the density jumps from 1/pi to 0
        val = density.edge_jump(PM, 1.0, 1.0)
        assert val == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_jump_rotation_invariant(self):
        vals = [density.edge_jump(PM, np.exp(1j * th), 1.0)
                for th in (0.0, 0.9, 2.2)]
        assert np.ptp(vals) < 1e-12

    def test_jump_rejects_off_boundary(self):
        with pytest.raises(ValueError):
            density.edge_jump(PM, 0.5, 1.0)

    def test_haar_quadratic_form(self):
        Q, P = density.quad_form(kernels.HaarUnitary(), 0.0, 1.0)
        assert np.allclose(Q, (2.0 / math.pi) * np.eye(2), rtol=1e-12)
        assert np.allclose(P, 0.0)

    def test_quad_form_rejects_sharp_points(self):
        with pytest.raises(ValueError):
            density.quad_form(PM, 1.0, 1.0)

    def test_two_line_quad_form_has_null_sector(self):
        # the tangency point 0 at t0 = 72/49 has a rank-1 Hessian; the
        # projector must pick out the flat (imaginary-axis) direction
        m = kernels.TwoLine()
        Q, P = density.quad_form(m, 0.0, 72.0 / 49.0)
        assert np.allclose(P, np.diag([0.0, 1.0]), atol=1e-8)
        assert Q[0, 0] > 0 and abs(Q[1, 1]) < 1e-8

    def test_edge_profile_classifies_haar_origin(self):
        s = np.logspace(-3, -1.5, 10)
        rep = density.edge_profile(kernels.HaarUnitary(), 0.0, 1.0,
                                   (1.0, 0.0), s)
        assert rep.kind == "quadratic"
        assert rep.exponent == pytest.approx(2.0, abs=0.05)
        assert rep.prefactor == pytest.approx(2.0 / math.pi, rel=0.02)

    def test_eta_limit_ratio_two_thirds(self):
        ratio, seq = density.eta_limit_ratio(PM, 1.0, 1.0)
        assert ratio == pytest.approx(2.0 / 3.0, rel=5e-3)
        assert np.all(np.diff(seq) > 0)  # smaller eta -> closer from below


class TestMass:
    def test_point_mass_total(self):
        grid = kernels.GridSpec(-1.5 - 1.5j, 1.5 + 1.5j, 300)
        mass = density.brown_mass(PM, 1.0, grid)
        assert mass == pytest.approx(1.0, abs=2e-4)

    def test_mass_outside_support_is_zero(self):
        grid = kernels.GridSpec(2.0 + 2.0j, 3.0 + 3.0j, 100)
        assert density.brown_mass(PM, 1.0, grid) == 0.0
