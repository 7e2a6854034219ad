"""Boundary tracing, critical points, and support topology."""

import math

import numpy as np
import pytest

from brownedge import catalog, geometry, kernels


PM = kernels.Atomic([0.0], [1.0])
A4 = kernels.Atomic([1, -1, 1j, -1j], [0.25] * 4)


def _grid(half, res=200):
    return kernels.GridSpec(-half - half * 1j, half + half * 1j, res)


class TestTraceBoundary:
    def test_point_mass_circle(self):
        curves = geometry.trace_boundary(PM, 1.0, _grid(1.6))
        assert len(curves) == 1
        c = curves[0]
        assert c.closed
        assert np.max(np.abs(np.abs(c.vertices) - 1.0)) < 1e-12

    def test_vertices_lie_on_level_set(self):
        curves = geometry.trace_boundary(A4, 0.5, _grid(2.2))
        for c in curves:
            f = np.array([A4.f_eval(z) for z in c.vertices])
            assert np.max(np.abs(f - 2.0)) < 1e-7 * 2.0

    def test_four_components_before_merge(self):
        curves = geometry.trace_boundary(A4, 0.5, _grid(2.2))
        closed = [c for c in curves if c.closed]
        assert len(closed) == 4

    def test_normals_point_inward(self):
        curves = geometry.trace_boundary(PM, 1.0, _grid(1.6))
        c = curves[0]
        step = 1e-3
        inside = np.abs(c.vertices + step * c.normals)
        assert np.all(inside < np.abs(c.vertices))

    def test_empty_outside_any_support(self):
        grid = kernels.GridSpec(5.0 + 5.0j, 6.0 + 6.0j, 50)
        assert geometry.trace_boundary(PM, 1.0, grid) == []


class TestCriticalPoints:
    def test_four_atom_structure(self):
        box = (-2.2 - 2.2j, 2.2 + 2.2j)
        cps = geometry.find_critical_points(A4, box)
        origin = [c for c in cps if abs(c.z) < 1e-8]
        saddles = sorted((c for c in cps if abs(c.z) >= 1e-8),
                         key=lambda c: (round(c.z.real, 6), round(c.z.imag, 6)))
        assert len(origin) == 1 and origin[0].kind == "local-min"
        assert origin[0].t_star == pytest.approx(1.0, abs=1e-10)
        assert float(np.linalg.det(origin[0].H)) == pytest.approx(4.0,
                                                                  rel=1e-8)
        assert len(saddles) == 4
        mag = 0.4550898605622273
        for c in saddles:
            assert c.kind == "saddle"
            assert abs(abs(c.z.real) - mag) < 1e-10
            assert abs(abs(c.z.imag) - mag) < 1e-10
            assert c.t_star == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0),
                                             abs=1e-10)

    def test_haar_origin_only(self):
        cps = geometry.find_critical_points(kernels.HaarUnitary(),
                                            (-2 - 2j, 2 + 2j))
        assert len(cps) == 1
        c = cps[0]
        assert abs(c.z) < 1e-10 and c.kind == "local-min"
        assert c.t_star == pytest.approx(1.0, abs=1e-12)

    def test_two_line_degenerate_tangency(self):
        m = kernels.TwoLine()
        cps = geometry.find_critical_points(m, (-2.8 - 2.8j, 2.8 + 2.8j))
        on_axis = [c for c in cps if abs(c.z) < 1e-5]
        assert len(on_axis) == 1
        c = on_axis[0]
        assert c.kind == "degenerate"
        assert c.t_star == pytest.approx(72.0 / 49.0, rel=1e-9)

    def test_point_mass_has_none(self):
        assert geometry.find_critical_points(PM, (-2 - 2j, 2 + 2j)) == []


class TestTopology:
    def test_connectivity_scan_a4(self):
        grid = _grid(2.2, 400)
        counts, noninc = geometry.connectivity_scan(
            A4, [0.5, 0.83, 0.9, 1.0, 1.1], grid)
        assert counts == [4, 1, 1, 1, 1]
        assert noninc

    def test_scan_rejects_unsorted(self):
        with pytest.raises(ValueError):
            geometry.connectivity_scan(A4, [1.0, 0.5], _grid(2.2, 50))

    def test_annulus_probe(self):
        grid = _grid(2.2, 400)
        assert geometry.euler_annulus_probe(A4, 0.9, grid)["holes"] == 1
        assert geometry.euler_annulus_probe(A4, 1.1, grid)["holes"] == 0
        assert geometry.euler_annulus_probe(PM, 1.0, _grid(1.6))["holes"] == 0

    def test_count_components_disk(self):
        assert geometry.count_components(PM, 1.0, _grid(1.6)) == 1


class TestSectorMembership:
    def test_flat_direction_detected(self):
        # H = diag(2, 0): the y-axis is the null sector, the x-axis avoids it
        H = np.diag([2.0, 0.0])
        assert geometry.sector_membership(H, np.array([1.0, 0.0]), 0.5)
        assert not geometry.sector_membership(H, np.array([0.0, 1.0]), 0.5)

    def test_nondegenerate_hessian_has_no_sector(self):
        assert geometry.sector_membership(np.diag([2.0, 1.0]),
                                          np.array([0.0, 1.0]), 0.5)

    def test_zero_direction_rejected(self):
        with pytest.raises(ValueError):
            geometry.sector_membership(np.eye(2), np.zeros(2), 0.5)
