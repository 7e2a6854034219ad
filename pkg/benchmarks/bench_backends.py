"""Compare the compiled node-sum kernels against the NumPy fallback.

Run:  python benchmarks/bench_backends.py

The hot loop of every density grid is the per-point bisection of
m1(z, u) = 1/t over quadrature/atom nodes; this benchmark times exactly that
workload for both backends (force the fallback with BROWNEDGE_FORCE_PYTHON=1
in a separate process to cross-check import selection).
"""

import time

import numpy as np

from brownedge import _corepy

try:
    from brownedge import _corecy
except ImportError:
    _corecy = None


def _workload(rows=2048, nodes=4096, seed=0):
    rng = np.random.default_rng(seed)
    d2 = np.ascontiguousarray(rng.random((rows, nodes)) + 1e-3)
    w = np.ascontiguousarray(rng.random(nodes))
    w /= w.sum()
    target = np.full(rows, 2.0)
    lo = np.zeros(rows)
    hi = np.ones(rows)
    return d2, w, target, lo, hi


def bench(core, name, iters=60, repeat=3):
    d2, w, target, lo, hi = _workload()
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = core.bisect_u(d2, w, target, lo, hi, iters)
        best = min(best, time.perf_counter() - t0)
    rate = d2.size * iters / best / 1e9
    print(f"{name:8s}  bisect_u({d2.shape[0]}x{d2.shape[1]}, {iters} iters): "
          f"{best:8.3f} s   ({rate:.2f} Gnode-evals/s)")
    return out, best


def main():
    out_py, t_py = bench(_corepy, "numpy")
    if _corecy is None:
        print("compiled backend not available")
        return
    out_cy, t_cy = bench(_corecy, "cython")
    assert np.allclose(out_py, out_cy, rtol=1e-12, atol=1e-15), \
        "backends disagree"
    print(f"agreement OK; speedup x{t_py / t_cy:.1f}")


if __name__ == "__main__":
    main()
