"""Command-line front door.

Subcommands: density, density-reg, vfield, boundary, critical, edge-profile,
connectivity, assumption, validate, example.

Exit codes: 0 success, 1 malformed configuration, 2 numerical failure
(diagnostic JSON on stderr).
"""

import argparse
import hashlib
import re
import json
import math
import os
import struct
import sys

import numpy as np

from . import catalog, density, dyson, geometry, rmt
from .kernels import GridSpec, assumption_check, model_from_dict, model_from_json


def _fmt(x):
    return format(float(x), ".17g")


def _config_hash(args):
    payload = {k: v for k, v in sorted(vars(args).items())
               if k not in ("func", "out") and v is not None}
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


def _write_csv(path, header, rows, cfg_hash):
    with open(path, "w", newline="") as fh:
        fh.write("# config-hash: %s\n" % cfg_hash)
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _write_pgm(path, values, vmax):
    """16-bit big-endian P5; vmax maps to 65535."""
    arr = np.clip(values / vmax, 0.0, 1.0)
    pix = np.round(arr * 65535.0).astype(">u2")
    ny, nx = pix.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n65535\n" % (nx, ny))
        fh.write(pix.tobytes())


def _load_model(args):
    if getattr(args, "example", None):
        model, _ = catalog.get_example(args.example)
        return model
    if getattr(args, "model", None):
        text = args.model
        if os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        return model_from_json(text)
    raise ValueError("either --model or --example is required")


def _grid(args, model=None):
    if args.box:
        x0, y0, x1, y1 = (float(v) for v in args.box.split(","))
        return GridSpec(complex(x0, y0), complex(x1, y1), args.res)
    if getattr(args, "example", None):
        return catalog.default_grid(args.example, args.res)
    if model is not None:
        r = model.norm_bound() + 1.5
        return GridSpec(complex(-r, -r), complex(r, r), args.res)
    raise ValueError("--box is required without --example")


def _t_list(args):
    return [float(v) for v in str(args.t).split(",")]


def _outpath(args, name):
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, name)


# -- subcommand bodies ------------------------------------------------------

def _cmd_density(args):
    model = _load_model(args)
    grid = _grid(args, model)
    t = float(args.t)
    vals = density.rho_grid(model, grid, t)
    Z = grid.points()
    rows = [(float(z.real), float(z.imag), float(r))
            for z, r in zip(Z.ravel(), vals.ravel())]
    _write_csv(_outpath(args, "density.csv"), ["re", "im", "rho"], rows,
               _config_hash(args))
    if args.pgm:
        _write_pgm(_outpath(args, "density.pgm"), vals, 1.0 / (math.pi * t))
    return 0


def _cmd_density_reg(args):
    model = _load_model(args)
    grid = _grid(args, model)
    t = float(args.t)
    Z = grid.points()
    vals = density.rho_reg_points(model, Z, args.eta, t)
    rows = [(float(z.real), float(z.imag), float(r))
            for z, r in zip(Z.ravel(), vals.ravel())]
    _write_csv(_outpath(args, "density_reg.csv"), ["re", "im", "rho_eta"],
               rows, _config_hash(args))
    if args.pgm:
        _write_pgm(_outpath(args, "density_reg.pgm"), vals, 1.0 / (math.pi * t))
    return 0


def _cmd_vfield(args):
    model = _load_model(args)
    grid = _grid(args, model)
    t = float(args.t)
    Z = grid.points()
    vals = np.array([dyson.solve_v(model, z, args.eta, t).v
                     for z in Z.ravel()]).reshape(Z.shape)
    rows = [(float(z.real), float(z.imag), float(v))
            for z, v in zip(Z.ravel(), vals.ravel())]
    _write_csv(_outpath(args, "vfield.csv"), ["re", "im", "v"], rows,
               _config_hash(args))
    return 0


def _cmd_boundary(args):
    model = _load_model(args)
    grid = _grid(args, model)
    t = float(args.t)
    curves = geometry.trace_boundary(model, t, grid)
    rows = []
    for ci, c in enumerate(curves):
        for vi, (z, gn) in enumerate(zip(c.vertices, c.grad_norms)):
            rows.append((ci, vi, float(z.real), float(z.imag), float(gn)))
    _write_csv(_outpath(args, "boundary.csv"),
               ["component", "vertex", "re", "im", "grad_norm"], rows,
               _config_hash(args))
    return 0


def _cmd_critical(args):
    model = _load_model(args)
    r = model.norm_bound() + 1.0
    pts = geometry.find_critical_points(model, (complex(-r, -r), complex(r, r)),
                                        seed_resolution=args.res or 60)
    recs = [{
        "re": p.z.real, "im": p.z.imag, "grad_norm": p.grad_norm,
        "hessian": p.H.tolist(), "eigvals": list(p.eigvals),
        "class": p.kind, "t_star": p.t_star,
    } for p in pts]
    with open(_outpath(args, "critical.json"), "w") as fh:
        json.dump({"config_hash": _config_hash(args), "points": recs}, fh,
                  indent=2)
    return 0


def _cmd_edge_profile(args):
    model = _load_model(args)
    x, y = (float(v) for v in args.point.split(","))
    dx, dy = (float(v) for v in args.direction.split(","))
    s = np.logspace(math.log10(args.smin), math.log10(args.smax), args.ns)
    rep = density.edge_profile(model, complex(x, y), float(args.t),
                               (dx, dy), s)
    with open(_outpath(args, "edge_profile.json"), "w") as fh:
        json.dump({"config_hash": _config_hash(args),
                   "z0": [rep.z0.real, rep.z0.imag], "class": rep.kind,
                   "jump": rep.jump, "exponent": rep.exponent,
                   "prefactor": rep.prefactor, "reference": rep.reference,
                   "residual": rep.residual, "samples": rep.samples}, fh,
                  indent=2)
    return 0


def _cmd_connectivity(args):
    model = _load_model(args)
    grid = _grid(args, model)
    counts, mono = geometry.connectivity_scan(model, _t_list(args), grid)
    out = {"config_hash": _config_hash(args), "t": _t_list(args),
           "counts": counts, "nonincreasing": mono}
    print(json.dumps(out))
    with open(_outpath(args, "connectivity.json"), "w") as fh:
        json.dump(out, fh, indent=2)
    return 0


def _cmd_assumption(args):
    model = _load_model(args)
    rep = assumption_check(model, float(args.t), resolution=args.res or 128)
    rep = dict(rep)
    rep["witnesses"] = [[z.real, z.imag, f] for z, f in rep["witnesses"]]
    rep["config_hash"] = _config_hash(args)
    if not math.isfinite(rep["min_f"]):
        rep["min_f"] = "inf"
    print(json.dumps(rep))
    with open(_outpath(args, "assumption.json"), "w") as fh:
        json.dump(rep, fh, indent=2)
    return 0


def _cmd_validate(args):
    model = _load_model(args)
    grid = _grid(args, model)
    seeds = [int(s) for s in args.seeds.split(",")]
    rep = rmt.validate(model, float(args.t), grid, args.N, args.eta, seeds)
    with open(_outpath(args, "validation.json"), "w") as fh:
        fh.write(rep.to_json())
    print(json.dumps(rep.summary))
    return 0


def _cmd_example(args):
    model, spec = catalog.get_example(args.name)
    ts = _t_list(args) if args.t else spec["t"]
    grid = GridSpec(spec["box"][0], spec["box"][1], args.res)
    for t in ts:
        tag = ("%g" % t).replace(".", "p")
        sub = argparse.Namespace(**vars(args))
        sub.t = t
        vals = density.rho_grid(model, grid, t)
        Z = grid.points()
        rows = [(float(z.real), float(z.imag), float(r))
                for z, r in zip(Z.ravel(), vals.ravel())]
        _write_csv(_outpath(args, f"{args.name}_density_t{tag}.csv"),
                   ["re", "im", "rho"], rows, _config_hash(sub))
        if args.pgm:
            _write_pgm(_outpath(args, f"{args.name}_density_t{tag}.pgm"),
                       vals, 1.0 / (math.pi * t))
        curves = geometry.trace_boundary(model, t, grid)
        rows = []
        for ci, c in enumerate(curves):
            for vi, (z, gn) in enumerate(zip(c.vertices, c.grad_norms)):
                rows.append((ci, vi, float(z.real), float(z.imag), float(gn)))
        _write_csv(_outpath(args, f"{args.name}_boundary_t{tag}.csv"),
                   ["component", "vertex", "re", "im", "grad_norm"], rows,
                   _config_hash(sub))
    r = model.norm_bound() + 1.0
    pts = geometry.find_critical_points(model, (complex(-r, -r), complex(r, r)))
    recs = [{"re": p.z.real, "im": p.z.imag, "class": p.kind,
             "t_star": p.t_star} for p in pts]
    with open(_outpath(args, f"{args.name}_critical.json"), "w") as fh:
        json.dump(recs, fh, indent=2)
    return 0


# -- argument parsing -------------------------------------------------------

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="brownedge",
        description="Brown measure of a + sqrt(t)x: densities, boundaries, "
                    "edges, and finite-matrix validation.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    # let values like "-2,-2,2,2" pass as arguments, not options
    neg = re.compile(r"^-\d[\d.,eE+-]*$")
    ap._negative_number_matcher = neg

    def common(p, needs_t=True):
        p._negative_number_matcher = neg
        p.add_argument("--model", help="model JSON (inline or file path)")
        p.add_argument("--example", help="named example from the catalog")
        if needs_t:
            p.add_argument("--t", required=True, help="time parameter")
        p.add_argument("--box", help="x0,y0,x1,y1 bounding box")
        p.add_argument("--res", type=int, default=200)
        p.add_argument("--out", help="output directory (default: cwd)")

    p = sub.add_parser("density", help="Brown-measure density grid")
    common(p)
    p.add_argument("--pgm", action="store_true")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("density-reg", help="eta-regularized density grid")
    common(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--pgm", action="store_true")
    p.set_defaults(func=_cmd_density_reg)

    p = sub.add_parser("vfield", help="subordination function v grid")
    common(p)
    p.add_argument("--eta", type=float, default=0.0)
    p.set_defaults(func=_cmd_vfield)

    p = sub.add_parser("boundary", help="trace the boundary level set")
    common(p)
    p.set_defaults(func=_cmd_boundary)

    p = sub.add_parser("critical", help="critical points of f")
    common(p, needs_t=False)
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("edge-profile", help="classify density decay at a point")
    common(p)
    p.add_argument("--point", required=True, help="x,y boundary point")
    p.add_argument("--direction", required=True, help="dx,dy inward ray")
    p.add_argument("--smin", type=float, default=1e-4)
    p.add_argument("--smax", type=float, default=1e-1)
    p.add_argument("--ns", type=int, default=12)
    p.set_defaults(func=_cmd_edge_profile)

    p = sub.add_parser("connectivity", help="component counts across t")
    common(p)
    p.set_defaults(func=_cmd_connectivity)

    p = sub.add_parser("assumption", help="regularity (f > 1/t on spec) check")
    common(p)
    p.set_defaults(func=_cmd_assumption)

    p = sub.add_parser("validate", help="random-matrix cross validation")
    common(p)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--seeds", default="1,2,3,4")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("example", help="run a canned catalog configuration")
    p.add_argument("name", help="a4 | haar | tangent | powerlaw | jacobi")
    p.add_argument("--t", help="override t list (comma separated)")
    p.add_argument("--res", type=int, default=150)
    p.add_argument("--out")
    p.add_argument("--pgm", action="store_true")
    p.set_defaults(func=_cmd_example)
    return ap


def run(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except (ArithmeticError, np.linalg.LinAlgError) as e:
        print(json.dumps({"numerical_failure": str(e)}), file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
