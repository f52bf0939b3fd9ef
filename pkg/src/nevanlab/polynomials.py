"""Multivariate complex polynomials: the exact-arithmetic substrate.

Two term-map types live here.  ``HomogeneousPolynomial`` carries the
projective hypersurface data (every exponent vector sums to the declared
degree); ``AffinePolynomial`` carries dehomogenized plane curves and
elimination by-products.  Coefficients are double-precision complex:
"exact" means exact exponent bookkeeping and threshold-guarded term
cancellation, not arbitrary precision.

The bivariate resultant uses the dense Sylvester matrix, evaluated
coefficient-wise at roots of unity and interpolated back by FFT; each
numeric determinant goes through LU with partial pivoting.  Convention:
``resultant(P, Q, var)`` builds deg_var(Q) rows of P's coefficients above
deg_var(P) rows of Q's, so swapping arguments flips the sign by
(-1)**(deg_var(P)*deg_var(Q)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .curves import ExpPolySum, ProjectiveCurve

# Relative threshold below which a produced coefficient is treated as a
# cancellation artifact and dropped.
CANCEL_TOL = 1e-12


class PolynomialError(ValueError):
    """Contract violation in polynomial construction or use."""


class DimensionMismatch(PolynomialError):
    """Point or curve arity does not match the polynomial's variables."""


class ZeroPolynomialError(PolynomialError):
    """Operation undefined for an identically-zero polynomial."""


Exponent = tuple[int, ...]
TermMap = dict[Exponent, complex]


def _clean(terms: Mapping[Exponent, complex], rel_tol: float = 0.0) -> TermMap:
    """Drop exact zeros, and optionally coefficients below rel_tol * max."""
    out: TermMap = {}
    cutoff = 0.0
    if rel_tol > 0.0 and terms:
        mags = [abs(c) for c in terms.values()]
        cutoff = rel_tol * max(mags, default=0.0)
    for e, c in terms.items():
        c = complex(c)
        if c != 0 and abs(c) > cutoff:
            out[tuple(int(k) for k in e)] = c
    return out


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Homogeneous polynomial in num_vars variables of fixed total degree."""

    num_vars: int
    degree: int
    terms: TermMap

    def __post_init__(self):
        if self.num_vars < 1:
            raise PolynomialError("num_vars must be >= 1")
        if self.degree < 0:
            raise PolynomialError("degree must be >= 0")
        object.__setattr__(self, "terms", _clean(self.terms))
        for e in self.terms:
            if len(e) != self.num_vars:
                raise DimensionMismatch(
                    f"exponent {e} has {len(e)} entries, expected {self.num_vars}"
                )
            if any(k < 0 for k in e):
                raise PolynomialError(f"negative exponent in {e}")
            if sum(e) != self.degree:
                raise PolynomialError(
                    f"exponent {e} sums to {sum(e)}, not the degree {self.degree}"
                )

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def eval(self, point: Iterable[complex]) -> complex:
        """Evaluate at a point with num_vars coordinates."""
        pt = [complex(v) for v in point]
        if len(pt) != self.num_vars:
            raise DimensionMismatch(
                f"point has {len(pt)} coordinates, expected {self.num_vars}"
            )
        total = 0j
        for e, c in self.terms.items():
            m = c
            for v, k in zip(pt, e):
                if k:
                    m *= v**k
            total += m
        return total

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an [n, num_vars] array of points."""
        pts = np.asarray(points, dtype=np.complex128)
        if pts.ndim != 2 or pts.shape[1] != self.num_vars:
            raise DimensionMismatch("points must be [n, num_vars]")
        exps, coeffs = self.packed
        with np.errstate(invalid="ignore"):
            powers = pts[:, None, :] ** exps[None, :, :]
        return np.prod(powers, axis=2) @ coeffs

    @property
    def packed(self) -> tuple[np.ndarray, np.ndarray]:
        """(exponent matrix, coefficient vector) in a fixed sorted order."""
        keys = sorted(self.terms)
        exps = np.array(keys, dtype=np.int64).reshape(len(keys), self.num_vars)
        coeffs = np.array([self.terms[k] for k in keys], dtype=np.complex128)
        return exps, coeffs

    def partial(self, var: int) -> "HomogeneousPolynomial":
        """Partial derivative with respect to variable index var."""
        if not 0 <= var < self.num_vars:
            raise DimensionMismatch(f"variable index {var} out of range")
        out: TermMap = {}
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            ne = list(e)
            ne[var] = k - 1
            key = tuple(ne)
            out[key] = out.get(key, 0j) + c * k
        deg = self.degree - 1 if out else max(self.degree - 1, 0)
        return HomogeneousPolynomial(self.num_vars, deg, out)

    def scaled(self, factor: complex) -> "HomogeneousPolynomial":
        return HomogeneousPolynomial(
            self.num_vars, self.degree, {e: c * factor for e, c in self.terms.items()}
        )

    def __add__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        if self.num_vars != other.num_vars or (
            not self.is_zero and not other.is_zero and self.degree != other.degree
        ):
            raise PolynomialError("can only add forms of equal arity and degree")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        deg = self.degree if not self.is_zero else other.degree
        return HomogeneousPolynomial(self.num_vars, deg, _clean(out, CANCEL_TOL))

    def __mul__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("arity mismatch in product")
        out: TermMap = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0j) + c1 * c2
        return HomogeneousPolynomial(
            self.num_vars, self.degree + other.degree, _clean(out, CANCEL_TOL)
        )

    def dehomogenize(self, chart: int) -> "AffinePolynomial":
        """Set variable `chart` to 1, keeping the other variables' exponents."""
        out: TermMap = {}
        for e, c in self.terms.items():
            key = tuple(k for i, k in enumerate(e) if i != chart)
            out[key] = out.get(key, 0j) + c
        return AffinePolynomial(self.num_vars - 1, _clean(out, CANCEL_TOL))


def monomial(num_vars: int, exps: Iterable[int], coeff: complex = 1.0) -> HomogeneousPolynomial:
    e = tuple(int(k) for k in exps)
    return HomogeneousPolynomial(num_vars, sum(e), {e: complex(coeff)})


def linear_form(coeffs: Iterable[complex]) -> HomogeneousPolynomial:
    cs = [complex(c) for c in coeffs]
    n = len(cs)
    terms = {}
    for i, c in enumerate(cs):
        e = [0] * n
        e[i] = 1
        terms[tuple(e)] = c
    return HomogeneousPolynomial(n, 1, terms)


def max_coeff_norm(p: "HomogeneousPolynomial | AffinePolynomial") -> float:
    """Largest coefficient modulus; rejects the zero polynomial."""
    if not p.terms:
        raise ZeroPolynomialError("max_coeff_norm of the zero polynomial")
    return max(abs(c) for c in p.terms.values())


def compose_with_curve(P: "HomogeneousPolynomial", f: "ProjectiveCurve") -> "ExpPolySum":
    """P(f_0, ..., f_n) as a canonical exponential-polynomial sum.

    Evaluating the result at any z agrees with eval(P, f(z)) up to the
    canonical-form cancellation threshold; the composition is symbolic.
    """
    from .curves import ExpPolySum

    if P.num_vars != len(f.components):
        raise DimensionMismatch(
            f"polynomial in {P.num_vars} variables composed with "
            f"{len(f.components)}-component curve"
        )
    total = ExpPolySum.zero()
    powers: list[dict[int, "ExpPolySum"]] = [dict() for _ in f.components]

    def comp_power(i: int, k: int) -> "ExpPolySum":
        if k not in powers[i]:
            powers[i][k] = f.components[i] ** k
        return powers[i][k]

    for e, c in sorted(P.terms.items()):
        term = ExpPolySum.const(c)
        for i, k in enumerate(e):
            if k:
                term = term * comp_power(i, k)
        total = total + term
    return total


@dataclass(frozen=True)
class AffinePolynomial:
    """Plain multivariate polynomial (no homogeneity constraint)."""

    num_vars: int
    terms: TermMap

    def __post_init__(self):
        if self.num_vars < 1:
            raise PolynomialError("num_vars must be >= 1")
        object.__setattr__(self, "terms", _clean(self.terms))
        for e in self.terms:
            if len(e) != self.num_vars:
                raise DimensionMismatch(
                    f"exponent {e} has {len(e)} entries, expected {self.num_vars}"
                )
            if any(k < 0 for k in e):
                raise PolynomialError(f"negative exponent in {e}")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=0)

    def eval(self, point: Iterable[complex]) -> complex:
        pt = [complex(v) for v in point]
        if len(pt) != self.num_vars:
            raise DimensionMismatch(
                f"point has {len(pt)} coordinates, expected {self.num_vars}"
            )
        total = 0j
        for e, c in self.terms.items():
            m = c
            for v, k in zip(pt, e):
                if k:
                    m *= v**k
            total += m
        return total

    def partial(self, var: int) -> "AffinePolynomial":
        out: TermMap = {}
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            ne = list(e)
            ne[var] = k - 1
            key = tuple(ne)
            out[key] = out.get(key, 0j) + c * k
        return AffinePolynomial(self.num_vars, out)

    def __add__(self, other: "AffinePolynomial") -> "AffinePolynomial":
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("arity mismatch in sum")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return AffinePolynomial(self.num_vars, _clean(out, CANCEL_TOL))

    def __mul__(self, other: "AffinePolynomial") -> "AffinePolynomial":
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("arity mismatch in product")
        out: TermMap = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0j) + c1 * c2
        return AffinePolynomial(self.num_vars, _clean(out, CANCEL_TOL))

    def scaled(self, factor: complex) -> "AffinePolynomial":
        return AffinePolynomial(
            self.num_vars, {e: c * factor for e, c in self.terms.items()}
        )

    def homogenize(self) -> HomogeneousPolynomial:
        """Add one trailing variable raised to fill each term to total degree."""
        d = self.total_degree
        out: TermMap = {}
        for e, c in self.terms.items():
            out[e + (d - sum(e),)] = c
        return HomogeneousPolynomial(self.num_vars + 1, d, out)

    def restrict(self, var: int, value: complex) -> "AffinePolynomial":
        """Substitute a value for one variable (arity drops by one)."""
        out: TermMap = {}
        for e, c in self.terms.items():
            coeff = c * (complex(value) ** e[var] if e[var] else 1.0)
            key = tuple(k for i, k in enumerate(e) if i != var)
            out[key] = out.get(key, 0j) + coeff
        return AffinePolynomial(self.num_vars - 1, _clean(out, CANCEL_TOL))

    def univariate(self) -> np.ndarray:
        """Ascending coefficient vector; only valid when num_vars == 1."""
        if self.num_vars != 1:
            raise DimensionMismatch("univariate() needs a one-variable polynomial")
        n = self.total_degree + 1
        c = np.zeros(n, dtype=np.complex128)
        for e, v in self.terms.items():
            c[e[0]] = v
        return c


def affine_from_univariate(coeffs: np.ndarray) -> AffinePolynomial:
    return AffinePolynomial(
        1, {(k,): complex(c) for k, c in enumerate(np.atleast_1d(coeffs))}
    )


def shift_bivariate(F: AffinePolynomial, x0: complex, y0: complex) -> AffinePolynomial:
    """Recenter a two-variable polynomial: returns G with G(u, v) = F(u+x0, v+y0).

    Taylor shift by repeated synthetic division along each axis.
    """
    if F.num_vars != 2:
        raise DimensionMismatch("shift_bivariate needs a two-variable polynomial")
    dx = F.degree_in(0)
    dy = F.degree_in(1)
    C = np.zeros((dx + 1, dy + 1), dtype=np.complex128)
    for (i, j), c in F.terms.items():
        C[i, j] = c
    for k in range(dx):
        for r in range(dx - 1, k - 1, -1):
            C[r, :] += x0 * C[r + 1, :]
    for k in range(dy):
        for r in range(dy - 1, k - 1, -1):
            C[:, r] += y0 * C[:, r + 1]
    terms: TermMap = {
        (i, j): C[i, j] for i in range(dx + 1) for j in range(dy + 1) if C[i, j] != 0
    }
    scale = max((abs(c) for c in terms.values()), default=0.0)
    return AffinePolynomial(
        2, {e: c for e, c in terms.items() if abs(c) > CANCEL_TOL * scale}
    )


def resultant_bivariate(P: AffinePolynomial, Q: AffinePolynomial, var: int) -> AffinePolynomial:
    """Sylvester resultant of two bivariate polynomials, eliminating `var`.

    The result is returned as a two-variable polynomial supported on the
    remaining variable.  Entries of the Sylvester matrix are univariate
    polynomials in the kept variable; the determinant is sampled at roots
    of unity (LU factorization per sample) and interpolated back by FFT.
    """
    if P.num_vars != 2 or Q.num_vars != 2:
        raise DimensionMismatch("resultant_bivariate expects two-variable inputs")
    if var not in (0, 1):
        raise DimensionMismatch("var must be 0 or 1")
    if P.is_zero or Q.is_zero:
        raise ZeroPolynomialError("resultant with an identically-zero polynomial")
    keep = 1 - var
    m = P.degree_in(var)
    n = Q.degree_in(var)
    if m == 0 and n == 0:
        # no elimination to do: classical convention Res = 1 (empty matrix)
        return AffinePolynomial(2, {(0, 0): 1.0 + 0j})

    # coefficient polynomials in the kept variable, index = power of `var`
    def coeff_rows(A: AffinePolynomial, deg: int) -> list[np.ndarray]:
        rows = [np.zeros(A.degree_in(keep) + 1, dtype=np.complex128) for _ in range(deg + 1)]
        for e, c in A.terms.items():
            rows[e[var]][e[keep]] += c
        return rows

    pc = coeff_rows(P, m)
    qc = coeff_rows(Q, n)
    bound = n * P.degree_in(keep) + m * Q.degree_in(keep)
    N = bound + 1
    ys = np.exp(2j * np.pi * np.arange(N) / N)

    size = m + n
    vals = np.empty(N, dtype=np.complex128)
    pv = np.array([np.polynomial.polynomial.polyval(ys, row) for row in pc])
    qv = np.array([np.polynomial.polynomial.polyval(ys, row) for row in qc])
    for s in range(N):
        S = np.zeros((size, size), dtype=np.complex128)
        for r in range(n):
            for k in range(m + 1):
                S[r, r + k] = pv[m - k, s]
        for r in range(m):
            for k in range(n + 1):
                S[n + r, r + k] = qv[n - k, s]
        vals[s] = np.linalg.det(S)
    coeffs = np.fft.fft(vals) / N
    scale = float(np.max(np.abs(coeffs))) if N else 0.0
    terms: TermMap = {}
    for k, c in enumerate(coeffs):
        if abs(c) > max(1e-10 * scale, 0.0) and scale > 0.0:
            e = [0, 0]
            e[keep] = k
            terms[tuple(e)] = complex(c)
    return AffinePolynomial(2, terms)


# ---------------------------------------------------------------------------
# JSON literal format:  { "vars": n+1, "terms": [ {"exp": [...], "re": a, "im": b} ] }
# ---------------------------------------------------------------------------

def poly_to_json(p: HomogeneousPolynomial) -> str:
    terms = [
        {"exp": list(e), "re": c.real, "im": c.imag}
        for e, c in sorted(p.terms.items())
    ]
    return json.dumps({"vars": p.num_vars, "terms": terms})


def poly_from_dict(obj: dict) -> HomogeneousPolynomial:
    try:
        nv = int(obj["vars"])
        raw = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise PolynomialError(f"polynomial literal missing field: {exc}") from exc
    terms: TermMap = {}
    degree = None
    for t in raw:
        e = tuple(int(k) for k in t["exp"])
        c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        if degree is None:
            degree = sum(e)
        terms[e] = terms.get(e, 0j) + c
    if degree is None:
        degree = 0
    return HomogeneousPolynomial(nv, degree, terms)


def poly_from_json(text: str) -> HomogeneousPolynomial:
    return poly_from_dict(json.loads(text))


def affine_from_dict(obj: dict) -> AffinePolynomial:
    """Same literal layout as the homogeneous format, without the degree
    constraint; used for plane curves."""
    try:
        nv = int(obj["vars"])
        raw = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise PolynomialError(f"polynomial literal missing field: {exc}") from exc
    terms: TermMap = {}
    for t in raw:
        e = tuple(int(k) for k in t["exp"])
        c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        terms[e] = terms.get(e, 0j) + c
    return AffinePolynomial(nv, terms)


def affine_from_json(text: str) -> AffinePolynomial:
    return affine_from_dict(json.loads(text))
