# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernels_py``: same signatures, same semantics.

The inner loops fuse the per-term Horner evaluation, the exp, and the
scaled accumulation, so no [T, n] intermediates are allocated.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)
    double carg(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef extern from "math.h" nogil:
    double log(double)
    double exp(double)
    double cos(double)
    double sin(double)
    double hypot(double, double)
    double atan2(double, double)
    double INFINITY

BACKEND = "compiled"


cdef inline double complex _horner(const double complex* c, Py_ssize_t m,
                                   double complex z) nogil:
    cdef double complex acc = c[m - 1]
    cdef Py_ssize_t k
    for k in range(m - 2, -1, -1):
        acc = acc * z + c[k]
    return acc


def eval_sum(const double complex[:, ::1] pc, const cnp.int64_t[::1] pl,
             const double complex[:, ::1] qc, const cnp.int64_t[::1] ql,
             z):
    """Direct evaluation of sum_j p_j(z) exp(q_j(z)) at each point of z."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = \
        np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = zz.shape[0]
    cdef Py_ssize_t T = pc.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef const double complex[::1] zv = zz
    cdef Py_ssize_t i, j
    cdef double complex acc, pt
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(T):
                pt = _horner(&pc[j, 0], pl[j], zv[i])
                acc = acc + pt * cexp(_horner(&qc[j, 0], ql[j], zv[i]))
            ov[i] = acc
    return out


def eval_sum_scaled(const double complex[:, ::1] pc, const cnp.int64_t[::1] pl,
                    const double complex[:, ::1] qc, const cnp.int64_t[::1] ql,
                    z):
    """Overflow-safe evaluation, returning (log-magnitude, phase) per point.

    One Horner sweep per point fills per-term (log-magnitude, phase)
    scratch rows; terms more than 40 nats below the per-point maximum are
    skipped in the accumulation (they cannot move the double result).
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = \
        np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = zz.shape[0]
    cdef Py_ssize_t T = pc.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] outl = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] outp = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lm_buf = np.empty(T, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ph_buf = np.empty(T, dtype=np.float64)
    cdef double[::1] lv = outl
    cdef double[::1] phv = outp
    cdef double[::1] lmb = lm_buf
    cdef double[::1] phb = ph_buf
    cdef const double complex[::1] zv = zz
    cdef Py_ssize_t i, j
    cdef double complex pt, qt
    cdef double M, lm, ap, sa, w, sre, sim
    with nogil:
        for i in range(n):
            M = -INFINITY
            for j in range(T):
                pt = _horner(&pc[j, 0], pl[j], zv[i])
                ap = cabs(pt)
                if ap > 0.0:
                    qt = _horner(&qc[j, 0], ql[j], zv[i])
                    lm = log(ap) + creal(qt)
                    lmb[j] = lm
                    phb[j] = carg(pt) + cimag(qt)
                    if lm > M:
                        M = lm
                else:
                    lmb[j] = -INFINITY
                    phb[j] = 0.0
            if M == -INFINITY:
                lv[i] = -INFINITY
                phv[i] = 0.0
                continue
            sre = 0.0
            sim = 0.0
            for j in range(T):
                lm = lmb[j] - M
                if lm > -40.0:  # below that the term cannot move the sum
                    w = exp(lm)
                    sre += w * cos(phb[j])
                    sim += w * sin(phb[j])
            sa = hypot(sre, sim)
            if sa == 0.0:
                lv[i] = -INFINITY
                phv[i] = 0.0
            else:
                lv[i] = M + log(sa)
                phv[i] = atan2(sim, sre)
    return outl, outp


