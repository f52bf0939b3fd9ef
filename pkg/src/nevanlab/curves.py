"""Exponential-polynomial entire functions and projective curves.

An ``ExpPolySum`` is a finite sum  sum_j p_j(z) * exp(q_j(z))  with
univariate complex polynomials p_j, q_j.  The class keeps a canonical
form: the constant part of each q_j is folded into p_j, the q_j are
pairwise distinct and sorted by (degree, real parts, imaginary parts) of
their coefficient vectors, and no p_j is identically zero.  Canonical
form is what makes identity tests (ratio constancy, vanishing sums) a
finite symbolic check instead of an analytic one.

Values are double precision; coefficients produced by arithmetic are
cleaned with a relative 1e-12 threshold so floating cancellation cannot
leave phantom terms behind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels

CANCEL_TOL = 1e-12
Q_MATCH_TOL = 1e-12
#: Re q(z) beyond which exp() overflows double precision.
EXP_OVERFLOW_LIMIT = 700.0

# construction caps for user-supplied curve components
MAX_Q_DEGREE = 3
MAX_P_DEGREE = 30


class CurveError(ValueError):
    """Contract violation in curve construction or use."""


class EvaluationOverflow(ArithmeticError):
    """Direct evaluation would overflow; use log-scale evaluation instead."""


class NotReduced(CurveError):
    """All components of a projective curve vanish at a common point."""


def _trim(c: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Drop trailing coefficients with modulus <= tol."""
    c = np.asarray(c, dtype=np.complex128)
    n = c.shape[0]
    while n > 0 and abs(c[n - 1]) <= tol:
        n -= 1
    return c[:n].copy()


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.convolve(a, b)


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.complex128)
    out[: a.size] += a
    out[: b.size] += b
    return out


def _poly_der(a: np.ndarray) -> np.ndarray:
    if a.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return a[1:] * np.arange(1, a.size)


def _q_key(q: np.ndarray):
    return (q.size,) + tuple(float(v) for pair in ((c.real, c.imag) for c in q) for v in pair)


def _q_equal(a: np.ndarray, b: np.ndarray) -> bool:
    if a.size != b.size:
        return False
    if a.size == 0:
        return True
    scale = 1.0 + max(np.max(np.abs(a)), np.max(np.abs(b)))
    return bool(np.max(np.abs(a - b)) <= Q_MATCH_TOL * scale)


@dataclass(frozen=True, eq=False)
class ExpPolySum:
    """Canonical finite sum of p_j(z)*exp(q_j(z)) terms.

    Use the constructors (:func:`from_terms`, :func:`poly`, :func:`exp_term`)
    rather than instantiating directly: they canonicalize.  Identity
    questions go through canonical-form helpers (is_zero, ratio tests),
    not ==, which stays object identity.
    """

    terms: tuple[tuple[np.ndarray, np.ndarray], ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "ExpPolySum":
        return ExpPolySum(())

    @staticmethod
    def from_terms(raw: Iterable[tuple[Sequence[complex], Sequence[complex]]]) -> "ExpPolySum":
        """Canonicalize a list of (p coefficients, q coefficients) pairs."""
        folded: list[tuple[np.ndarray, np.ndarray]] = []
        for p, q in raw:
            p = np.asarray(p, dtype=np.complex128).copy()
            q = np.asarray(q, dtype=np.complex128).copy()
            if q.size:
                q0 = complex(q[0])
                if q0 != 0:
                    if abs(q0.real) > EXP_OVERFLOW_LIMIT:
                        raise EvaluationOverflow(
                            "constant exponent part out of double range"
                        )
                    p = p * np.exp(q0)
                    q = q.copy()
                    q[0] = 0.0
            q = _trim(q)
            if q.size == 1:  # only the zero constant survived
                q = np.zeros(0, dtype=np.complex128)
            folded.append((p, q))
        # the cancellation threshold references the largest coefficient
        # PRODUCED, i.e. before merging can cancel it away
        top = 0.0
        for p, _ in folded:
            if p.size:
                top = max(top, float(np.max(np.abs(p))))
        # merge terms with equal exponent polynomials
        folded.sort(key=lambda t: _q_key(t[1]))
        merged: list[tuple[np.ndarray, np.ndarray]] = []
        for p, q in folded:
            if merged and _q_equal(merged[-1][1], q):
                merged[-1] = (_poly_add(merged[-1][0], p), merged[-1][1])
            else:
                merged.append((p, q))
        cleaned: list[tuple[np.ndarray, np.ndarray]] = []
        for p, q in merged:
            p = p.copy()
            p[np.abs(p) <= CANCEL_TOL * top] = 0.0
            p = _trim(p)
            if p.size:
                cleaned.append((p, q))
        cleaned.sort(key=lambda t: _q_key(t[1]))
        return ExpPolySum(tuple((p, q) for p, q in cleaned))

    @staticmethod
    def poly(coeffs: Sequence[complex]) -> "ExpPolySum":
        """Plain polynomial c0 + c1 z + ... as an ExpPolySum."""
        return ExpPolySum.from_terms([(np.asarray(coeffs, dtype=np.complex128), [])])

    @staticmethod
    def const(c: complex) -> "ExpPolySum":
        return ExpPolySum.poly([c])

    @staticmethod
    def exp_term(p: Sequence[complex], q: Sequence[complex]) -> "ExpPolySum":
        """Single term p(z) * exp(q(z))."""
        return ExpPolySum.from_terms([(p, q)])

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_polynomial(self) -> bool:
        return all(q.size == 0 for _, q in self.terms)

    @property
    def never_vanishes(self) -> bool:
        """True when nonvanishing on all of C is certified symbolically.

        Holds exactly for a single term with constant nonzero p: then the
        function is c * exp(q) with c != 0.
        """
        return len(self.terms) == 1 and self.terms[0][0].size == 1

    @property
    def max_p_degree(self) -> int:
        return max((p.size - 1 for p, _ in self.terms), default=0)

    @property
    def max_q_degree(self) -> int:
        return max((q.size - 1 if q.size else 0 for _, q in self.terms), default=0)

    @cached_property
    def packed(self):
        """Arrays (pc, pl, qc, ql) in the layout the kernels expect."""
        T = max(len(self.terms), 1)
        pw = max((p.size for p, _ in self.terms), default=1)
        qw = max((max(q.size, 1) for _, q in self.terms), default=1)
        pc = np.zeros((T, pw), dtype=np.complex128)
        qc = np.zeros((T, qw), dtype=np.complex128)
        pl = np.ones(T, dtype=np.int64)
        ql = np.ones(T, dtype=np.int64)
        if not self.terms:
            # single padded zero term: evaluates to 0 everywhere
            pass
        for j, (p, q) in enumerate(self.terms):
            pc[j, : p.size] = p
            pl[j] = p.size
            if q.size:
                qc[j, : q.size] = q
                ql[j] = q.size
        return pc, pl, qc, ql

    # -- evaluation --------------------------------------------------------

    def evaluate(self, z: complex) -> complex:
        """Value at a single point; raises EvaluationOverflow when any
        term's exponent exceeds the double range (callers then switch to
        :meth:`eval_scaled`)."""
        for _, q in self.terms:
            if q.size:
                re = np.polynomial.polynomial.polyval(complex(z), q).real
                if re > EXP_OVERFLOW_LIMIT:
                    raise EvaluationOverflow(
                        f"Re q(z) = {re:.3g} > {EXP_OVERFLOW_LIMIT}: use log-scale evaluation"
                    )
        return complex(self.eval_batch(np.array([z], dtype=np.complex128))[0])

    def eval_batch(self, z: np.ndarray) -> np.ndarray:
        """Direct vectorized evaluation (no overflow guard)."""
        pc, pl, qc, ql = self.packed
        return kernels.eval_sum(pc, pl, qc, ql, np.asarray(z, dtype=np.complex128))

    def eval_scaled(self, z: np.ndarray):
        """(log|h(z)|, arg h(z)) per point, overflow-safe."""
        pc, pl, qc, ql = self.packed
        return kernels.eval_sum_scaled(pc, pl, qc, ql, np.asarray(z, dtype=np.complex128))

    # -- algebra -----------------------------------------------------------

    def derivative(self) -> "ExpPolySum":
        """d/dz of the sum; canonical, same exponent set or smaller."""
        raw = []
        for p, q in self.terms:
            dp = _poly_der(p)
            if q.size:
                dp = _poly_add(dp, _poly_mul(p, _poly_der(q)))
            raw.append((dp, q))
        return ExpPolySum.from_terms(raw)

    def __add__(self, other: "ExpPolySum") -> "ExpPolySum":
        return ExpPolySum.from_terms(list(self.terms) + list(other.terms))

    def __neg__(self) -> "ExpPolySum":
        return ExpPolySum.from_terms([(-p, q) for p, q in self.terms])

    def __sub__(self, other: "ExpPolySum") -> "ExpPolySum":
        return self + (-other)

    def __mul__(self, other: "ExpPolySum") -> "ExpPolySum":
        raw = []
        for p1, q1 in self.terms:
            for p2, q2 in other.terms:
                raw.append((_poly_mul(p1, p2), _poly_add(q1, q2)))
        return ExpPolySum.from_terms(raw)

    def scale(self, c: complex) -> "ExpPolySum":
        return ExpPolySum.from_terms([(p * c, q) for p, q in self.terms])

    def __pow__(self, k: int) -> "ExpPolySum":
        if k < 0:
            raise CurveError("negative powers are not exponential-polynomial sums")
        result = ExpPolySum.const(1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result


def ratio_is_constant(h1: ExpPolySum, h2: ExpPolySum, tol: float = 1e-10) -> complex | None:
    """c with h1 == c*h2 as canonical forms, else None.

    Requires identical exponent sets and a single proportionality constant
    across all polynomial coefficients (relative tolerance `tol`).
    """
    if h2.is_zero:
        raise CurveError("ratio against the identically-zero function")
    if h1.is_zero:
        return 0.0
    if len(h1.terms) != len(h2.terms):
        return None
    for (_, q1), (_, q2) in zip(h1.terms, h2.terms):
        if not _q_equal(q1, q2):
            return None
    # candidate constant from the largest coefficient of h2
    best = (0, 0)
    best_mag = -1.0
    for j, (p2, _) in enumerate(h2.terms):
        k = int(np.argmax(np.abs(p2)))
        if abs(p2[k]) > best_mag:
            best_mag = abs(p2[k])
            best = (j, k)
    j0, k0 = best
    p1 = h1.terms[j0][0]
    if k0 >= p1.size:
        return None
    c = complex(p1[k0] / h2.terms[j0][0][k0])
    scale = 0.0
    worst = 0.0
    for (pa, _), (pb, _) in zip(h1.terms, h2.terms):
        diff = _poly_add(pa, -c * np.asarray(pb))
        if diff.size:
            worst = max(worst, float(np.max(np.abs(diff))))
        if pa.size:
            scale = max(scale, float(np.max(np.abs(pa))))
        if pb.size:
            scale = max(scale, abs(c) * float(np.max(np.abs(pb))))
    if worst <= tol * max(scale, 1e-300):
        return c
    return None


@dataclass(frozen=True, eq=False)
class ProjectiveCurve:
    """Reduced representation [f_0 : ... : f_n] with a working radius.

    Reducedness (no common zero of all components) is only decidable on a
    bounded region numerically, so it is certified on |z| <= working_radius
    at construction.  Internal results of polynomial maps (which may land
    in coordinate planes) are built with validate=False.
    """

    components: tuple[ExpPolySum, ...]
    working_radius: float
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.working_radius <= 0:
            raise CurveError("working_radius must be positive")
        if all(c.is_zero for c in self.components):
            raise CurveError("all components identically zero")
        if self.validate:
            for i, c in enumerate(self.components):
                if c.max_q_degree > MAX_Q_DEGREE:
                    raise CurveError(
                        f"component {i}: exponent degree {c.max_q_degree} exceeds cap {MAX_Q_DEGREE}"
                    )
                if c.max_p_degree > MAX_P_DEGREE:
                    raise CurveError(
                        f"component {i}: polynomial degree {c.max_p_degree} exceeds cap {MAX_P_DEGREE}"
                    )
            self._check_reduced()

    def _check_reduced(self):
        # a component that never vanishes settles it
        if any(c.never_vanishes for c in self.components if not c.is_zero):
            return
        from .zerofind import zeros_in_disk  # deferred: zerofind depends on curves

        candidates: list[complex] | None = None
        for c in self.components:
            if c.is_zero:
                continue  # vanishes everywhere: no constraint
            zs = [loc for loc, _ in zeros_in_disk(c, self.working_radius).points]
            if candidates is None:
                candidates = zs
            else:
                candidates = [
                    a for a in candidates if any(abs(a - b) <= 1e-8 for b in zs)
                ]
            if not candidates:
                return
        if candidates:
            raise NotReduced(
                f"components share a zero near {candidates[0]:.6g} within the working radius"
            )

    @property
    def dim(self) -> int:
        """Ambient projective dimension n."""
        return len(self.components) - 1

    def log_max_norm(self, z: complex) -> float:
        """log max_i |f_i(z)|, computed in log scale per component."""
        arr = np.array([z], dtype=np.complex128)
        best = -np.inf
        for c in self.components:
            if c.is_zero:
                continue
            lm, _ = c.eval_scaled(arr)
            best = max(best, float(lm[0]))
        if best == -np.inf:
            raise NotReduced(f"all components vanish at {z}")
        return best

    def log_max_norm_batch(self, z: np.ndarray) -> np.ndarray:
        out = np.full(np.asarray(z).shape, -np.inf)
        for c in self.components:
            if c.is_zero:
                continue
            lm, _ = c.eval_scaled(z)
            out = np.maximum(out, lm)
        return out

    def scale_components(self, factor: ExpPolySum) -> "ProjectiveCurve":
        """Multiply every component by a common factor (same projective map)."""
        return ProjectiveCurve(
            tuple(c * factor for c in self.components),
            self.working_radius,
            validate=False,
        )


# ---------------------------------------------------------------------------
# JSON literal format:
#   { "components": [ { "terms": [ {"p": [[re,im],...], "q": [[re,im],...]} ] } ],
#     "radius": R }
# ---------------------------------------------------------------------------

def _complex_list(raw) -> list[complex]:
    out = []
    for v in raw:
        if isinstance(v, (list, tuple)):
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v), 0.0))
    return out


def curve_from_dict(obj: dict, validate: bool = True) -> ProjectiveCurve:
    try:
        comps_raw = obj["components"]
        radius = float(obj["radius"])
    except (KeyError, TypeError) as exc:
        raise CurveError(f"curve literal missing field: {exc}") from exc
    comps = []
    for c in comps_raw:
        raw_terms = [
            (_complex_list(t.get("p", [])), _complex_list(t.get("q", [])))
            for t in c.get("terms", [])
        ]
        comps.append(ExpPolySum.from_terms(raw_terms) if raw_terms else ExpPolySum.zero())
    return ProjectiveCurve(tuple(comps), radius, validate=validate)


def curve_from_json(text: str, validate: bool = True) -> ProjectiveCurve:
    return curve_from_dict(json.loads(text), validate=validate)


def curve_to_json(f: ProjectiveCurve) -> str:
    comps = []
    for c in f.components:
        comps.append(
            {
                "terms": [
                    {
                        "p": [[v.real, v.imag] for v in p],
                        "q": [[v.real, v.imag] for v in q],
                    }
                    for p, q in c.terms
                ]
            }
        )
    return json.dumps({"components": comps, "radius": f.working_radius})
