"""Benchmark: compiled kernel extension vs the NumPy fallback.

Times the two hot paths (scaled batch evaluation of an exponential
polynomial sum, and a full order-function quadrature) on a Theorem-B
sized workload.  Run:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from nevanlab import _kernels_py
from nevanlab.curves import ExpPolySum, ProjectiveCurve

try:
    from nevanlab import _kernels_cy
except ImportError:
    _kernels_cy = None


def workload():
    """A 22-term sum like a degree-21 Fermat-Waring pullback."""
    rng = np.random.default_rng(0)
    terms = []
    for k in range(22):
        p = rng.standard_normal(22) + 1j * rng.standard_normal(22)
        terms.append((p, [0.0, float(k)]))
    return ExpPolySum.from_terms(terms)


def time_backend(impl, h, z, budget=0.3):
    pc, pl, qc, ql = h.packed
    impl.eval_sum_scaled(pc, pl, qc, ql, z)  # warm up
    t0 = time.perf_counter()
    calls = 0
    while time.perf_counter() - t0 < budget:
        impl.eval_sum_scaled(pc, pl, qc, ql, z)
        calls += 1
    return (time.perf_counter() - t0) / calls


def time_order_function(force_python: bool):
    import importlib
    import os

    if force_python:
        os.environ["NEVANLAB_PURE_PYTHON"] = "1"
    else:
        os.environ.pop("NEVANLAB_PURE_PYTHON", None)
    import nevanlab.kernels as K

    importlib.reload(K)
    import nevanlab.curves as C
    import nevanlab.nevanlinna as N

    importlib.reload(C)
    importlib.reload(N)
    one = C.ExpPolySum.const(1.0)
    zc = C.ExpPolySum.poly([0, 1.0])
    ez = C.ExpPolySum.exp_term([1.0], [0, 1.0])
    f = C.ProjectiveCurve((one, zc, ez), 25.0)
    t0 = time.perf_counter()
    for r in np.geomspace(2, 20, 10):
        N.order_function(f, float(r))
    return time.perf_counter() - t0, K.backend_name()


def main():
    h = workload()
    rng = np.random.default_rng(1)
    print("eval_sum_scaled, 22 terms (per call):")
    for n in (1, 8, 64, 512, 4096, 1 << 16):
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 3.0
        t_py = time_backend(_kernels_py, h, z)
        line = f"  n={n:6d}  python {t_py * 1e6:10.1f} us"
        if _kernels_cy is not None:
            t_cy = time_backend(_kernels_cy, h, z)
            line += f"   compiled {t_cy * 1e6:10.1f} us   ({t_py / t_cy:5.1f}x)"
        print(line)
    if _kernels_cy is None:
        print("  compiled backend not built (python setup.py build_ext --inplace)")

    dt_py, name_py = time_order_function(force_python=True)
    print(f"order-function sweep (10 radii): {name_py:8s} {dt_py * 1e3:8.1f} ms")
    if _kernels_cy is not None:
        dt_cy, name_cy = time_order_function(force_python=False)
        print(f"order-function sweep (10 radii): {name_cy:8s} {dt_cy * 1e3:8.1f} ms"
              f"   ({dt_py / dt_cy:.1f}x)")


if __name__ == "__main__":
    main()
