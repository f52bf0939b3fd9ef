"""NumPy implementations of the hot evaluation kernels.

These are the reference kernels: the compiled extension in
``_kernels_cy.pyx`` mirrors this module function for function and is
selected at import time by :mod:`nevanlab.kernels` when available.

An exponential-polynomial sum  sum_j p_j(z) * exp(q_j(z))  arrives here
packed as four arrays (see ``curves.ExpPolySum.packed``):

* ``pc`` -- complex128 [T, PW]: coefficients of each p_j, ascending, padded
* ``pl`` -- int64 [T]: number of valid coefficients per row
* ``qc`` -- complex128 [T, QW]: coefficients of each q_j, ascending, padded
* ``ql`` -- int64 [T]

All kernels are pure functions of their array arguments.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _horner_rows(coeffs: np.ndarray, lengths: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate each row polynomial (ascending coefficients) at every z.

    Returns a [T, n] complex array.
    """
    T = coeffs.shape[0]
    out = np.empty((T, z.shape[0]), dtype=np.complex128)
    for j in range(T):
        m = int(lengths[j])
        acc = np.full(z.shape, coeffs[j, m - 1], dtype=np.complex128)
        for k in range(m - 2, -1, -1):
            acc *= z
            acc += coeffs[j, k]
        out[j] = acc
    return out


def eval_sum(pc, pl, qc, ql, z) -> np.ndarray:
    """Direct evaluation of sum_j p_j(z) exp(q_j(z)) at each point of z.

    No overflow protection: callers must ensure Re q_j(z) stays below the
    double-precision exp range (the curves layer checks this).
    """
    z = np.asarray(z, dtype=np.complex128)
    pv = _horner_rows(pc, pl, z)
    qv = _horner_rows(qc, ql, z)
    return np.sum(pv * np.exp(qv), axis=0)


def eval_sum_scaled(pc, pl, qc, ql, z):
    """Overflow-safe evaluation, returning (log-magnitude, phase) per point.

    Per term: log|p_j(z)| + Re q_j(z) and arg p_j(z) + Im q_j(z); terms are
    summed after factoring out the largest per-point log-magnitude, so the
    result is exact up to rounding even when exp(q_j) overflows a double.
    A point where the sum vanishes gets log-magnitude -inf and phase 0.
    """
    z = np.asarray(z, dtype=np.complex128)
    pv = _horner_rows(pc, pl, z)
    qv = _horner_rows(qc, ql, z)
    with np.errstate(divide="ignore"):
        logm = np.log(np.abs(pv)) + qv.real
    ph = np.angle(pv) + qv.imag
    M = np.max(logm, axis=0)
    with np.errstate(invalid="ignore"):
        delta = logm - M[None, :]
    # -inf - -inf gives nan: those terms (and whole all-zero columns) drop out.
    w = np.exp(np.where(np.isnan(delta), -np.inf, delta) + 1j * ph)
    s = np.sum(w, axis=0)
    nz = np.isfinite(M) & (s != 0)
    out_log = np.full(z.shape, -np.inf)
    out_ph = np.zeros(z.shape)
    with np.errstate(divide="ignore"):
        out_log[nz] = M[nz] + np.log(np.abs(s[nz]))
    out_ph[nz] = np.angle(s[nz])
    return out_log, out_ph
