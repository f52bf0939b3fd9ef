"""Kernel backend selection.

The compiled extension dominates on small batches (single-point Newton
steps, derivative probing: ~20x over NumPy's per-call overhead), while
NumPy's SIMD transcendentals win on large quadrature batches.  With the
extension built, calls dispatch on batch size; without it, the NumPy
fallback handles everything.  Set ``NEVANLAB_PURE_PYTHON=1`` to force the
fallback (parity tests, benchmarks).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_cy = None
if os.environ.get("NEVANLAB_PURE_PYTHON") != "1":
    try:
        from . import _kernels_cy as _cy  # type: ignore[no-redef]
    except ImportError:
        _cy = None

#: below this many points the compiled per-point loop beats NumPy
SMALL_BATCH = 512

if _cy is None:
    eval_sum = _kernels_py.eval_sum
    eval_sum_scaled = _kernels_py.eval_sum_scaled
else:
    def eval_sum(pc, pl, qc, ql, z):
        z = np.asarray(z, dtype=np.complex128)
        impl = _cy if z.size <= SMALL_BATCH else _kernels_py
        return impl.eval_sum(pc, pl, qc, ql, z)

    def eval_sum_scaled(pc, pl, qc, ql, z):
        z = np.asarray(z, dtype=np.complex128)
        impl = _cy if z.size <= SMALL_BATCH else _kernels_py
        return impl.eval_sum_scaled(pc, pl, qc, ql, z)


def backend_name() -> str:
    """'compiled' when the extension is active (hybrid dispatch), else 'python'."""
    return "compiled" if _cy is not None else "python"
