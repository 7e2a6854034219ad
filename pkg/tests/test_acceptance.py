"""End-to-end acceptance suite.

Each test prints a single line  [ACnn] <name>: PASS|FAIL (<detail>)  and then
asserts, so the verdicts are visible in the captured output of every run.
"""

import math
import time

import numpy as np
import pytest

from brownedge import catalog, density, dyson, geometry, kernels, rmt


def _report(num, name, ok, detail=""):
    line = f"[AC{num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    return ok


def test_ac01_circular_law():
    t0 = time.perf_counter()
    model = kernels.Atomic([0.0], [1.0])
    rng = np.random.default_rng(20260823)
    r = 0.99 * np.sqrt(rng.random(200))
    th = 2.0 * math.pi * rng.random(200)
    Z = r * np.exp(1j * th)
    vals = density.rho_points(model, Z, 1.0)
    err_in = float(np.max(np.abs(vals - 1.0 / math.pi)))
    Zout = (1.01 + rng.random(50)) * np.exp(2j * math.pi * rng.random(50))
    err_out = float(np.max(np.abs(density.rho_points(model, Zout, 1.0))))
    el = time.perf_counter() - t0
    ok = err_in < 1e-8 and err_out == 0.0 and el < 1.0
    assert _report(1, "circular-law", ok,
                   f"max in-disk err {err_in:.2e}, exterior max {err_out:.1e}, "
                   f"{el:.2f}s")


def test_ac02_beta_thresholds():
    t0 = time.perf_counter()
    model = kernels.HermitianBeta(3.0, 4.0)
    t_minus = 1.0 / model.f_eval(0.0)
    t_plus = 1.0 / model.f_eval(1.0)
    e_minus = abs(t_minus - 1.0 / 15.0) * 15.0
    e_plus = abs(t_plus - 1.0 / 5.0) * 5.0
    el = time.perf_counter() - t0
    ok = e_minus < 1e-6 and e_plus < 1e-6 and el < 1.0
    assert _report(2, "beta-thresholds", ok,
                   f"t- rel err {e_minus:.2e}, t+ rel err {e_plus:.2e}, "
                   f"{el:.2f}s")


def test_ac03_power_law_edge():
    t0 = time.perf_counter()
    model = kernels.ProductPower(1.0, 1.5)
    t_edge = 1.0 / model.f_eval(0.0)
    band_ok = 0.31 <= t_edge <= 0.33

    t = 0.2
    s = np.logspace(-3.0, -1.5, 12)
    d = math.sqrt(0.5) * (1.0 + 1.0j)
    vals = np.array([density.rho(model, s_ * d, t) for s_ in s])
    pos = vals > 0
    slope = float(np.polyfit(np.log(s[pos]), np.log(vals[pos]), 1)[0])
    slope_ok = abs(slope - 2.5) <= 0.15 and int(pos.sum()) >= 8
    el = time.perf_counter() - t0

    _report(3, "power-law-edge/onset-band", band_ok,
            f"1/f(0) = {t_edge:.4f}, required [0.31, 0.33]")
    _report(3, "power-law-edge/diagonal-slope", slope_ok,
            f"slope {slope:.4f} vs 2.5 +/- 0.15, {el:.2f}s")
    assert slope_ok and el < 30.0
    assert band_ok, (
        "support-onset time 1/f(0) falls outside the required band; the "
        "computed f(0) is cross-checked independently in the unit tests")


def test_ac04_four_atom_critical_and_connectivity():
    t0 = time.perf_counter()
    model, spec = catalog.get_example("a4")
    box = spec["box"]
    cps = geometry.find_critical_points(model, box)
    origin = [c for c in cps if abs(c.z) < 1e-8]
    saddles = [c for c in cps if abs(c.z) >= 1e-8]
    ok_origin = (len(origin) == 1 and origin[0].kind == "local-min"
                 and abs(origin[0].t_star - 1.0) < 1e-9
                 and float(np.linalg.det(origin[0].H)) > 0.0)
    ok_saddles = (len(saddles) == 4 and
                  all(abs(c.t_star - catalog.T_STAR_A4) <= 1e-6
                      for c in saddles))

    grid = kernels.GridSpec(box[0], box[1], 600)
    counts, noninc = geometry.connectivity_scan(
        model, [0.5, 0.83, 0.9, 1.0, 1.1], grid)
    ok_counts = counts[0] == 4 and counts[-1] == 1 and noninc
    h09 = geometry.euler_annulus_probe(model, 0.9, grid)["holes"]
    h11 = geometry.euler_annulus_probe(model, 1.1, grid)["holes"]
    el = time.perf_counter() - t0
    ok = (ok_origin and ok_saddles and ok_counts and h09 == 1 and h11 == 0
          and el < 60.0)
    assert _report(4, "four-atom-critical-structure", ok,
                   f"origin {ok_origin}, saddles {len(saddles)} at t* err "
                   f"{max(abs(c.t_star - catalog.T_STAR_A4) for c in saddles):.1e}, "
                   f"counts {counts}, holes(0.9)={h09}, holes(1.1)={h11}, "
                   f"{el:.1f}s")


def test_ac05_quadratic_edge_prefactor():
    t0 = time.perf_counter()
    model = kernels.HaarUnitary()
    Q, _ = density.quad_form(model, 0.0, 1.0)
    target = (2.0 / math.pi) * np.eye(2)
    q_err = float(np.linalg.norm(Q - target, 2) / np.linalg.norm(target, 2))

    s = np.logspace(-3.0, -1.5, 10)
    dir_ok = []
    for d in ((1, 0), (0, 1), (math.sqrt(0.5), math.sqrt(0.5)),
              (math.sqrt(0.5), -math.sqrt(0.5))):
        rep = density.edge_profile(model, 0.0, 1.0, d, s)
        dir_ok.append(abs(rep.exponent - 2.0) <= 0.1
                      and abs(rep.prefactor - 2.0 / math.pi)
                      <= 0.05 * (2.0 / math.pi))
    el = time.perf_counter() - t0
    ok = q_err <= 0.01 and all(dir_ok) and el < 30.0
    assert _report(5, "quadratic-edge-prefactor", ok,
                   f"Q rel err {q_err:.2e}, directions ok {dir_ok}, {el:.1f}s")


def _a4_boundary_vertices(n_points, t=0.5, res=200):
    model, spec = catalog.get_example("a4")
    grid = kernels.GridSpec(spec["box"][0], spec["box"][1], res)
    curves = geometry.trace_boundary(model, t, grid)
    per = max(1, -(-n_points // max(len(curves), 1)))
    out = []
    for c in curves:
        idx = np.linspace(0, len(c.vertices) - 1, per + 2,
                          dtype=int)[1:-1]
        for i in idx:
            out.append((complex(c.vertices[i]), complex(c.normals[i])))
    return model, out[:n_points]


def test_ac06_sharp_edge_jump_consistency():
    t0 = time.perf_counter()
    t = 0.5
    model, pts = _a4_boundary_vertices(20, t=t)
    assert len(pts) == 20
    s = np.linspace(0.002, 0.02, 8)
    errs = []
    for z0, nrm in pts:
        jump = density.edge_jump(model, z0, t)
        vals = np.array([density.rho(model, z0 + s_ * nrm, t) for s_ in s])
        intercept = float(np.polyfit(s, vals, 1)[1])
        errs.append(abs(intercept - jump) / jump)
    worst = max(errs)
    el = time.perf_counter() - t0
    ok = worst <= 0.03 and el < 60.0
    assert _report(6, "sharp-edge-jump-consistency", ok,
                   f"20 points, worst intercept mismatch {worst:.2e}, "
                   f"{el:.1f}s")


def test_ac07_two_limit_discrepancy():
    t0 = time.perf_counter()
    t = 0.5
    model, pts = _a4_boundary_vertices(10, t=t)
    assert len(pts) == 10
    ratios = []
    for z0, _ in pts:
        r, _seq = density.eta_limit_ratio(model, z0, t)
        ratios.append(r)
    worst = max(abs(r - 2.0 / 3.0) / (2.0 / 3.0) for r in ratios)
    el = time.perf_counter() - t0
    ok = worst <= 0.02 and el < 60.0
    assert _report(7, "two-limit-discrepancy", ok,
                   f"10 points, worst |ratio - 2/3| rel {worst:.2e}, "
                   f"{el:.1f}s")


def test_ac08_v_asymptotics_exponents():
    t0 = time.perf_counter()
    model = kernels.Atomic([0.0], [1.0])
    t = 1.0
    etas = np.logspace(-9, -6, 8)

    sols = dyson.v_profile(model, 1.0 + 0.0j, etas, t)   # boundary |z| = 1
    vb = np.array([s.v for s in sols])
    slope_b = float(np.polyfit(np.log(etas), np.log(vb), 1)[0])

    z_ext = math.sqrt(2.0)                               # f = 1/2 = 0.5/t
    sols = dyson.v_profile(model, z_ext + 0.0j, etas, t)
    ve = np.array([s.v for s in sols])
    slope_e = float(np.polyfit(np.log(etas), np.log(ve), 1)[0])
    el = time.perf_counter() - t0
    ok = (abs(slope_b - 1.0 / 3.0) <= 0.02 and abs(slope_e - 1.0) <= 0.02
          and el < 10.0)
    assert _report(8, "v-asymptotics-exponents", ok,
                   f"boundary slope {slope_b:.4f} (1/3), exterior slope "
                   f"{slope_e:.4f} (1), {el:.1f}s")


def test_ac09_jacobi_cusp_exponents():
    t0 = time.perf_counter()
    model = kernels.HermitianBeta(3.0, 4.0)

    # t < t-: the support meets the axis only on [0,1]; v ~ x^2 at the cusp
    t = 1.0 / 30.0
    xs = np.logspace(-3.5, -2.5, 12)
    vs = np.array([dyson.solve_v(model, complex(x, 0.0), 0.0, t).v
                   for x in xs])
    slope_cusp = float(np.polyfit(np.log(xs), np.log(vs), 1)[0])

    # t in (t-, t+): square-root edge at the negative-axis root of f = 1/t
    t = 1.0 / 10.0
    from scipy.optimize import brentq
    x_edge = brentq(lambda x: model.f_eval(complex(x, 0.0)) - 1.0 / t,
                    -0.5, -1e-6, xtol=1e-14)
    ds = np.logspace(-5, -3, 12)
    vs = np.array([dyson.solve_v(model, complex(x_edge + d, 0.0), 0.0, t).v
                   for d in ds])
    slope_edge = float(np.polyfit(np.log(ds), np.log(vs), 1)[0])
    el = time.perf_counter() - t0
    ok = (abs(slope_cusp - 2.0) <= 0.15 and abs(slope_edge - 0.5) <= 0.05
          and el < 30.0)
    assert _report(9, "jacobi-cusp-exponents", ok,
                   f"cusp slope {slope_cusp:.4f} (2), edge slope "
                   f"{slope_edge:.4f} (0.5), {el:.1f}s")


def test_ac10_rmt_cross_validation():
    t0 = time.perf_counter()
    model, spec = catalog.get_example("a4")
    t, N, eta = 0.5, 512, 0.05
    grid = kernels.GridSpec(spec["box"][0], spec["box"][1], 15)
    report = rmt.validate(model, t, grid, N, eta, [1, 2, 3, 4])

    v_an = np.array(report.v_analytic)
    v_emp = np.array(report.v_empirical)
    v_med = float(np.median(np.abs(v_emp - v_an) / v_an))

    interior = np.array([density.rho(model, z, t) > 0 for z in report.z])
    r_an = np.array(report.rho_analytic)[interior]
    r_emp = np.array(report.rho_empirical)[interior]
    r_med = float(np.median(np.abs(r_emp - r_an) / r_an))
    r_tol = max(0.05, 2.0 / math.sqrt(N))
    el = time.perf_counter() - t0
    ok = v_med <= 0.03 and r_med <= r_tol and el < 300.0
    assert _report(10, "rmt-cross-validation", ok,
                   f"N={N}, v median rel err {v_med:.2e} (<=3%), rho median "
                   f"rel err {r_med:.2e} (<={r_tol:.3f}) over "
                   f"{int(interior.sum())} interior pts, {el:.0f}s")


def test_ac11_global_bounds_and_mass():
    t0 = time.perf_counter()
    eta = 1e-2
    rng = np.random.default_rng(11)
    worst_mass = 0.0
    all_ok = True
    details = []
    for name, spec in catalog.EXAMPLES.items():
        model = spec["model"]()
        lo, hi = spec["box"]
        for t in spec["mass_t"]:
            bound = 1.0 / (math.pi * t) + 1e-9
            Z = (lo.real + rng.random(10000) * (hi.real - lo.real)
                 + 1j * (lo.imag + rng.random(10000) * (hi.imag - lo.imag)))
            r = density.rho_points(model, Z, t)
            ok_r = bool(np.all((r >= 0.0) & (r <= bound)))
            rr = density.rho_reg_points(model, Z, eta, t)
            ok_rr = bool(np.all((rr >= 0.0) & (rr <= bound)))

            grid = kernels.GridSpec(lo, hi, 400)
            mass = density.brown_mass(model, t, grid, sub=4)
            worst_mass = max(worst_mass, abs(mass - 1.0))
            ok_m = abs(mass - 1.0) <= 5e-3
            if not (ok_r and ok_rr and ok_m):
                all_ok = False
                details.append(f"{name}@t={t:.3g}: rho {ok_r}, rho_eta "
                               f"{ok_rr}, mass {mass:.5f}")
    el = time.perf_counter() - t0
    ok = all_ok and el < 300.0
    assert _report(11, "global-bounds-and-mass", ok,
                   f"worst |mass-1| {worst_mass:.2e}, {el:.0f}s"
                   + (f"; failures: {details}" if details else ""))
