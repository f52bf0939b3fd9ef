"""Explicit hypersurface constructions and their certificates.

Builders for the degree-d surface family in CP^3 and for Fermat-Waring
hypersurfaces with verified subset-rank genericity; general-position and
smoothness certificates via iterated resultant elimination on affine
charts (exact mode) or seeded multi-start gradient minimization on the
sphere (probabilistic mode, explicitly labeled heuristic); plane-curve
genus through the ordinary-singularity formula; and the Grassmannian
codimension bookkeeping with a finite-field enumeration oracle.

Elimination never passes silently: systems it cannot decide raise
EliminationUndecided, and candidate points are only accepted after
direct evaluation of every polynomial in the subsystem.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .polynomials import (
    AffinePolynomial,
    HomogeneousPolynomial,
    linear_form,
    monomial,
    shift_bivariate,
)

WITNESS_TOL = 1e-7
COEFF_CLEAN = 1e-10
DEGREE_PRODUCT_CAP = 10_000
ROOT_MATCH_TOL = 1e-6


class GeometryError(ValueError):
    pass


class EliminationUndecided(RuntimeError):
    """The chart elimination could not certify either outcome."""


# ---------------------------------------------------------------------------
# multivariate Sylvester elimination (2 or 3 variables)
# ---------------------------------------------------------------------------

def _coeff_layers(A: AffinePolynomial, var: int, deg: int, kept: tuple[int, ...]):
    """Coefficient polynomials of A in `var`: layer k maps kept-exponents
    to the coefficient of var^k."""
    layers: list[dict] = [dict() for _ in range(deg + 1)]
    for e, c in A.terms.items():
        key = tuple(e[w] for w in kept)
        lay = layers[e[var]]
        lay[key] = lay.get(key, 0j) + c
    return layers


def _eval_layer_on_grid(layer: dict, axes: list[np.ndarray]) -> np.ndarray:
    """Evaluate one coefficient polynomial on the tensor grid of axes."""
    shape = tuple(a.size for a in axes)
    out = np.zeros(shape, dtype=np.complex128)
    for key, c in layer.items():
        term = np.complex128(c)
        prod = np.ones(shape, dtype=np.complex128)
        for w, k in enumerate(key):
            if k:
                axis_vals = axes[w] ** k
                shape_w = [1] * len(axes)
                shape_w[w] = axes[w].size
                prod = prod * axis_vals.reshape(shape_w)
        out += term * prod
    return out


def resultant_eliminate(P: AffinePolynomial, Q: AffinePolynomial, var: int) -> AffinePolynomial:
    """Sylvester resultant in `var` for polynomials in 2 or 3 variables.

    Entries are sampled on tensor grids of roots of unity in the kept
    variables, the determinant is taken per sample (LU), and coefficients
    come back by multidimensional FFT.  Raises EliminationUndecided when
    the interpolation grid would exceed the degree-product cap.
    """
    nv = P.num_vars
    if Q.num_vars != nv or nv not in (2, 3):
        raise GeometryError("resultant_eliminate expects 2 or 3 shared variables")
    m = P.degree_in(var)
    n = Q.degree_in(var)
    if m == 0 and n == 0:
        return AffinePolynomial(nv, {(0,) * nv: 1.0 + 0j})
    kept = tuple(w for w in range(nv) if w != var)
    bounds = [n * P.degree_in(w) + m * Q.degree_in(w) for w in kept]
    sizes = [b + 1 for b in bounds]
    if math.prod(sizes) > DEGREE_PRODUCT_CAP:
        raise EliminationUndecided(
            f"interpolation grid {sizes} exceeds the degree-product cap"
        )
    axes = [np.exp(2j * np.pi * np.arange(s) / s) for s in sizes]
    p_layers = _coeff_layers(P, var, m, kept)
    q_layers = _coeff_layers(Q, var, n, kept)
    pv = np.stack([_eval_layer_on_grid(l, axes) for l in p_layers])
    qv = np.stack([_eval_layer_on_grid(l, axes) for l in q_layers])
    size = m + n
    grid_shape = pv.shape[1:]
    S = np.zeros(grid_shape + (size, size), dtype=np.complex128)
    for r in range(n):
        for k in range(m + 1):
            S[..., r, r + k] = pv[m - k]
    for r in range(m):
        for k in range(n + 1):
            S[..., n + r, r + k] = qv[n - k]
    vals = np.linalg.det(S)
    coeffs = np.fft.fftn(vals) / math.prod(sizes)
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    terms = {}
    if scale > 0.0:
        it = np.nditer(coeffs, flags=["multi_index"])
        for v in it:
            if abs(v) > COEFF_CLEAN * scale:
                e = [0] * nv
                for w, k in zip(kept, it.multi_index):
                    e[w] = k
                terms[tuple(e)] = complex(v)
    return AffinePolynomial(nv, terms)


def _drop_var(A: AffinePolynomial, var: int) -> AffinePolynomial:
    """Remove a variable the polynomial does not use."""
    if A.degree_in(var) != 0:
        raise GeometryError("cannot drop an active variable")
    terms = {
        tuple(k for w, k in enumerate(e) if w != var): c for e, c in A.terms.items()
    }
    return AffinePolynomial(A.num_vars - 1, terms)


def _eval_scale(A: AffinePolynomial, pt) -> float:
    total = 0.0
    for e, c in A.terms.items():
        m = abs(c)
        for v, k in zip(pt, e):
            if k:
                m *= abs(v) ** k
        total += m
    return total


def _verified(polys, pt) -> bool:
    return all(abs(P.eval(pt)) <= WITNESS_TOL * max(_eval_scale(P, pt), 1e-12)
               for P in polys)


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.complex128)
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(0, dtype=np.complex128)
    n = c.size
    while n > 0 and abs(c[n - 1]) <= 1e-12 * scale:
        n -= 1
    c = c[:n]
    if c.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return np.roots(c[::-1])


def common_affine_zeros(polys: list[AffinePolynomial], find_all: bool = True,
                        _depth: int = 0) -> list[tuple[complex, ...]]:
    """Verified common zeros of a system in <= 3 variables.

    Candidates come from iterated pairwise resultants against a pivot
    (projection never loses true zeros); each lifted candidate is accepted
    only when every polynomial of the system evaluates below tolerance.
    Raises EliminationUndecided on degenerate eliminations it cannot
    settle (shared factors surviving random slicing).
    """
    if _depth > 6:
        raise EliminationUndecided("elimination recursion too deep")
    live = [P for P in polys if not P.is_zero]
    if not live:
        nv = polys[0].num_vars if polys else 1
        return [(0j,) * nv]  # every point is common; return one witness
    nv = live[0].num_vars
    for P in live:
        if P.total_degree == 0:
            return []  # nonzero constant in the ideal
    if nv == 1:
        pivot = min(live, key=lambda P: P.total_degree)
        roots = _poly_roots(pivot.univariate())
        out = []
        for r in roots:
            pt = (complex(r),)
            if _verified(live, pt):
                out.append(pt)
                if not find_all:
                    return out
        return _dedupe_points(out)

    # pick elimination variable and pivot of smallest positive degree
    best = None
    for v in range(nv):
        for P in live:
            dv = P.degree_in(v)
            if dv >= 1 and (best is None or dv < best[0]):
                best = (dv, v, P)
    assert best is not None
    _, v, pivot = best
    passthrough = []
    resultants = []
    for P in live:
        if P is pivot:
            continue
        if P.degree_in(v) == 0:
            passthrough.append(_drop_var(P, v))
        else:
            R = resultant_eliminate(pivot, P, v)
            if R.is_zero:
                # shared factor: decide on random slices of v
                return _slice_fallback(live, v, find_all, _depth)
            resultants.append(_drop_var(R, v))
    reduced = resultants + passthrough
    if not reduced:
        # single nontrivial polynomial: zeros form a hypersurface, nonempty
        fill = tuple([0.37 + 0.21j] * (nv - 1))
        restricted = _restrict_all_but(pivot, v, fill)
        roots = _poly_roots(restricted.univariate())
        out = []
        for r in roots:
            pt_list = list(fill)
            pt_list.insert(v, complex(r))
            pt = tuple(pt_list)
            if _verified(live, pt):
                out.append(pt)
        return _dedupe_points(out)
    base_pts = common_affine_zeros(reduced, find_all=find_all, _depth=_depth + 1)
    out = []
    for bp in base_pts:
        # lift: substitute the kept coordinates, solve for v
        roots = _poly_roots(_restrict_all_but(pivot, v, bp).univariate())
        if roots.size == 0:
            # pivot restriction collapsed: try the other polynomials' roots
            # plus v = 0 as candidates
            candidates = [0j]
            for P in live:
                if P is pivot:
                    continue
                rr = _poly_roots(_restrict_all_but(P, v, bp).univariate())
                candidates.extend(complex(r) for r in rr[:8])
            roots = np.array(candidates)
        for r in roots:
            pt_list = list(bp)
            pt_list.insert(v, complex(r))
            pt = tuple(pt_list)
            if _verified(live, pt):
                out.append(pt)
                if not find_all:
                    return _dedupe_points(out)
    return _dedupe_points(out)


def _restrict_all_but(P: AffinePolynomial, v: int, values) -> AffinePolynomial:
    """Substitute `values` (ordered by kept variable index) for every
    variable except v; the result is univariate in v."""
    out = P
    kept = [w for w in range(P.num_vars) if w != v]
    # restrict from the highest index down so lower positions stay stable
    for idx in range(len(kept) - 1, -1, -1):
        out = out.restrict(kept[idx], values[idx])
    return out


def _slice_fallback(live, v, find_all, depth) -> list[tuple[complex, ...]]:
    rng = np.random.default_rng(20240317 + depth)
    hits = []
    for _ in range(3):
        t = complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
        sliced = [P.restrict(v, t) for P in live]
        try:
            pts = common_affine_zeros(sliced, find_all=find_all, _depth=depth + 1)
        except EliminationUndecided:
            continue
        for bp in pts:
            pt_list = list(bp)
            pt_list.insert(v, t)
            pt = tuple(pt_list)
            if _verified(live, pt):
                hits.append(pt)
                if not find_all:
                    return hits
    if hits:
        return _dedupe_points(hits)
    raise EliminationUndecided(
        "resultant vanished identically and random slices found nothing"
    )


def _dedupe_points(pts: list[tuple[complex, ...]]) -> list[tuple[complex, ...]]:
    out: list[tuple[complex, ...]] = []
    for p in pts:
        if not any(max(abs(a - b) for a, b in zip(p, q)) < ROOT_MATCH_TOL for q in out):
            out.append(p)
    return out


def common_projective_zero(polys: list[HomogeneousPolynomial]) -> tuple[complex, ...] | None:
    """A verified common projective zero of homogeneous forms, or None.

    Works chart by chart (supported ambient dimension <= 3, i.e. up to 4
    variables); identically-zero forms impose no condition.
    """
    live = [P for P in polys if not P.is_zero]
    if not live:
        nv = polys[0].num_vars if polys else 1
        return (1.0 + 0j,) + (0j,) * (nv - 1)
    nv = live[0].num_vars
    if nv > 4:
        raise GeometryError("charts supported only up to ambient dimension 3")
    for chart in range(nv):
        affs = [P.dehomogenize(chart) for P in live]
        pts = common_affine_zeros(affs, find_all=False)
        if pts:
            pt = pts[0]
            full = list(pt[:chart]) + [1.0 + 0j] + list(pt[chart:])
            return tuple(full)
    return None


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def build_theorem_a_surface(d: int, a0: complex, a1: complex, a2: complex,
                            a3: complex) -> HomogeneousPolynomial:
    """The degree-d surface z0^d + z1^(d-2)(z1^2 + a0 z0^2)
    + z2^(d-2)(z2^2 + a1 z0^2) + z3^(d-2)(a2 z1^2 + a3 z2^2 + z3^2) in CP^3.

    Requires d >= 4 and all a_i nonzero; warns below the degree where the
    complement's hyperbolic embedding is guaranteed (d >= 19).
    """
    if d < 4:
        raise GeometryError("need d >= 4")
    if any(a == 0 for a in (a0, a1, a2, a3)):
        raise GeometryError("all coefficients a_i must be nonzero")
    if d < 19:
        warnings.warn("d < 19: outside the guaranteed range", stacklevel=2)
    terms = {
        (d, 0, 0, 0): 1.0 + 0j,
        (0, d, 0, 0): 1.0 + 0j,
        (2, d - 2, 0, 0): complex(a0),
        (0, 0, d, 0): 1.0 + 0j,
        (2, 0, d - 2, 0): complex(a1),
        (0, 2, 0, d - 2): complex(a2),
        (0, 0, 2, d - 2): complex(a3),
        (0, 0, 0, d): 1.0 + 0j,
    }
    return HomogeneousPolynomial(4, d, terms)


def theorem_a_component_family(d: int, a0, a1, a2, a3) -> list[HomogeneousPolynomial]:
    """The four summands of the surface, as the hypersurface family whose
    general position the degeneracy argument needs."""
    z = [monomial(4, [d if i == j else 0 for j in range(4)]) for i in range(4)]
    q1 = HomogeneousPolynomial(4, d, {(0, d, 0, 0): 1.0, (2, d - 2, 0, 0): complex(a0)})
    q2 = HomogeneousPolynomial(4, d, {(0, 0, d, 0): 1.0, (2, 0, d - 2, 0): complex(a1)})
    q3 = HomogeneousPolynomial(
        4, d, {(0, 2, 0, d - 2): complex(a2), (0, 0, 2, d - 2): complex(a3), (0, 0, 0, d): 1.0}
    )
    return [z[0], q1, q2, q3]


@dataclass(frozen=True)
class FermatWaringData:
    """m generic linear forms and the hypersurface sum of their d-th powers."""

    n: int
    m: int
    d: int
    forms: tuple[HomogeneousPolynomial, ...]
    D: HomogeneousPolynomial
    seed: int
    mode: str = "theorem"


def _expand_power_linear(coeffs: list[int], d: int, n: int) -> dict:
    """(c . z)^d expanded exactly over the integers."""
    out: dict = {}
    for comp in itertools.combinations_with_replacement(range(n + 1), d):
        exp = [0] * (n + 1)
        for i in comp:
            exp[i] += 1
        coef = math.factorial(d)
        val = 1
        for i, k in enumerate(exp):
            coef //= math.factorial(k)
            val *= coeffs[i] ** k
        key = tuple(exp)
        out[key] = out.get(key, 0) + coef * val
    return out


def build_fermat_waring(n: int, m: int, d: int, seed: int,
                        mode: str = "theorem") -> FermatWaringData:
    """Seeded Fermat-Waring data with verified subset-rank genericity.

    Integer coefficients are resampled until every (n+1)-subset of the
    forms has full rank (exact integer determinants).  Theorem mode
    enforces m >= 3n-1 and d >= m^2-m+1; explore mode only needs m > n.
    """
    if mode not in ("theorem", "explore"):
        raise GeometryError(f"unknown mode {mode!r}")
    if mode == "theorem" and (m < 3 * n - 1 or d < m * m - m + 1):
        raise GeometryError(
            f"theorem mode needs m >= 3n-1 and d >= m^2-m+1, got n={n}, m={m}, d={d}"
        )
    if m < n + 1:
        raise GeometryError("need at least n+1 forms")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        mat = rng.integers(-10, 11, size=(m, n + 1))
        ok = True
        for subset in itertools.combinations(range(m), n + 1):
            sub = mat[list(subset), :].astype(float)
            if abs(np.linalg.det(sub)) < 0.5:  # integer determinant: 0 or >= 1
                ok = False
                break
        if ok:
            break
    else:
        raise GeometryError("genericity unattainable after 100 resamples")
    forms = tuple(linear_form([complex(v) for v in row]) for row in mat)
    total: dict = {}
    for row in mat:
        for key, val in _expand_power_linear([int(v) for v in row], d, n).items():
            total[key] = total.get(key, 0) + val
    terms = {k: complex(v) for k, v in total.items() if v != 0}
    D = HomogeneousPolynomial(n + 1, d, terms)
    return FermatWaringData(n=n, m=m, d=d, forms=forms, D=D, seed=seed, mode=mode)


def check_general_position(D_list: list[HomogeneousPolynomial], n: int) -> bool:
    """True when every (n+1)-subset has no common projective zero.

    Chart-wise resultant elimination; raises EliminationUndecided rather
    than guessing when an elimination degenerates or overflows.
    """
    if len(D_list) < n + 1:
        raise GeometryError("need at least n+1 hypersurfaces")
    for P in D_list:
        if P.num_vars != n + 1:
            raise GeometryError("all forms must live in n+1 variables")
    for subset in itertools.combinations(range(len(D_list)), n + 1):
        witness = common_projective_zero([D_list[i] for i in subset])
        if witness is not None:
            return False
    return True


# ---------------------------------------------------------------------------
# smoothness certificates
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    """Outcome of a geometric check, JSON-serializable for the CLI."""

    object_name: str
    mode: str
    verdict: str
    witnesses: list = field(default_factory=list)
    seed: int | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "object": self.object_name,
                "mode": self.mode,
                "verdict": self.verdict,
                "witnesses": self.witnesses,
                "seed": self.seed,
                **({"detail": self.detail} if self.detail else {}),
            }
        )


def smoothness_check(P: HomogeneousPolynomial, mode: str = "exact",
                     seed: int = 42, starts: int = 200) -> Certificate:
    """Certify smoothness of a surface in CP^3.

    exact: eliminate chart by chart from the four partial derivatives and
    certify no common projective zero (degree <= 8).  probabilistic: seeded
    multi-start minimization of |grad P|^2 on the unit-sphere slice of the
    variety; the verdict reports the smallest gradient norm found and is
    explicitly a heuristic, never a proof.
    """
    if P.num_vars != 4:
        raise GeometryError("smoothness_check expects a surface in CP^3 (4 variables)")
    partials = [P.partial(i) for i in range(4)]
    if mode == "exact":
        if P.degree > 8:
            raise GeometryError("exact mode supports degree <= 8")
        witness = common_projective_zero(partials)
        if witness is None:
            return Certificate("surface", "exact", "smooth")
        w = [[v.real, v.imag] for v in witness]
        return Certificate("surface", "exact", "singular", witnesses=[w])
    if mode != "probabilistic":
        raise GeometryError(f"unknown mode {mode!r}")

    d = P.degree
    packed = [Q.packed for Q in partials]
    p_packed = P.packed

    def grad_norm_sq(x: np.ndarray) -> float:
        z = (x[:4] + 1j * x[4:]).reshape(1, 4)
        vals = [float(np.abs(ex_c @ np.prod(z ** ex_e, axis=1))) ** 2
                for ex_e, ex_c in packed]
        return float(sum(vals))

    def objective(x: np.ndarray) -> float:
        nrm = float(np.linalg.norm(x))
        if nrm < 1e-9:
            return 1e9
        xh = x / nrm
        z = (xh[:4] + 1j * xh[4:]).reshape(1, 4)
        g = 0.0
        for ex_e, ex_c in packed:
            g += float(np.abs(ex_c @ np.prod(z ** ex_e, axis=1))) ** 2
        pe, pcf = p_packed
        g += float(np.abs(pcf @ np.prod(z ** pe, axis=1))) ** 2
        return g

    rng = np.random.default_rng(seed)
    best = np.inf
    per_start = []
    for s in range(starts):
        x0 = rng.standard_normal(8)
        x0 /= np.linalg.norm(x0)
        res = minimize(objective, x0, method="L-BFGS-B",
                       options={"maxiter": 200, "ftol": 1e-14, "gtol": 1e-12})
        x = res.x / np.linalg.norm(res.x)
        gn = math.sqrt(grad_norm_sq(np.concatenate([x[:4], x[4:]])))
        per_start.append({"grad_norm": gn, "converged": bool(res.success)})
        best = min(best, gn)
    verdict = (
        "no singularity found above threshold 1e-6" if best > 1e-6 else "singular_candidate"
    )
    return Certificate(
        "surface",
        "probabilistic",
        verdict,
        seed=seed,
        detail={
            "min_grad_norm": best,
            "starts": starts,
            "degree": d,
            "note": "heuristic certificate, not a proof",
            "non_converged": sum(1 for r in per_start if not r["converged"]),
        },
    )


def search_theorem_a_coefficients(
    d: int, seed: int = 42, max_tries: int = 200, mode: str = "exact"
) -> tuple[tuple[int, int, int, int], Certificate]:
    """Random search for nonzero integer coefficients making the surface
    smooth and its component family general-position.

    Returns the first passing tuple with its smoothness certificate; the
    seed is recorded so the search replays identically.
    """
    rng = np.random.default_rng(seed)
    last_exc: Exception | None = None
    for _ in range(max_tries):
        a = tuple(int(v) for v in rng.integers(-5, 6, size=4))
        if any(v == 0 for v in a):
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            P = build_theorem_a_surface(d, *a)
            try:
                cert = smoothness_check(P, mode=mode, seed=seed)
            except EliminationUndecided as exc:
                last_exc = exc
                continue
            if mode == "exact" and cert.verdict != "smooth":
                continue
            if mode == "probabilistic" and cert.detail.get("min_grad_norm", 0.0) <= 1e-6:
                continue
            family = theorem_a_component_family(d, *a)
            try:
                if not check_general_position(family, 3):
                    continue
            except EliminationUndecided as exc:
                last_exc = exc
                continue
        cert.seed = seed
        cert.detail["coefficients"] = list(a)
        return a, cert
    raise GeometryError(f"no passing coefficients found in {max_tries} tries: {last_exc}")


# ---------------------------------------------------------------------------
# plane curve genus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneCurve:
    F: AffinePolynomial

    def __post_init__(self):
        if self.F.num_vars != 2:
            raise GeometryError("plane curves live in two affine variables")
        if self.F.is_zero:
            raise GeometryError("zero polynomial does not define a curve")

    @property
    def degree(self) -> int:
        return self.F.total_degree


@dataclass
class SingularPoint:
    location: tuple  # (x, y) affine or (x, y, 0) at infinity
    at_infinity: bool
    multiplicity: int
    ordinary: bool
    tangents: list


@dataclass
class GenusReport:
    verdict: str  # "ok" | "unsupported" | "undetermined"
    genus: int | None
    degree: int
    smooth: bool
    singularities: list
    note: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict,
                "genus": self.genus,
                "degree": self.degree,
                "smooth": self.smooth,
                "singularities": [
                    {
                        "location": [[v.real, v.imag] for v in s.location],
                        "at_infinity": s.at_infinity,
                        "multiplicity": s.multiplicity,
                        "ordinary": s.ordinary,
                    }
                    for s in self.singularities
                ],
                "note": self.note,
            }
        )


def _lowest_form(G: AffinePolynomial) -> tuple[int, dict]:
    """Order of vanishing at the origin and the coefficients of the lowest
    homogeneous part, after relative thresholding."""
    scale = max(abs(c) for c in G.terms.values())
    by_deg: dict[int, dict] = {}
    for e, c in G.terms.items():
        if abs(c) > 1e-7 * scale:
            by_deg.setdefault(e[0] + e[1], {})[e] = c
    if not by_deg:
        raise GeometryError("polynomial vanished under thresholding")
    mdeg = min(by_deg)
    return mdeg, by_deg[mdeg]


def _tangent_directions(mult: int, form: dict) -> tuple[list, bool]:
    """Directions (alpha, beta) of the lowest form; bool = all distinct."""
    coeffs = np.zeros(mult + 1, dtype=np.complex128)
    for (i, j), c in form.items():
        coeffs[j] = c  # u^i v^j with i + j = mult
    scale = float(np.max(np.abs(coeffs)))
    rp = mult
    while rp > 0 and abs(coeffs[rp]) <= 1e-9 * scale:
        rp -= 1
    roots = _poly_roots(coeffs[: rp + 1])
    dirs = [(1.0 + 0j, complex(r)) for r in roots]
    inf_mult = mult - rp
    if inf_mult >= 1:
        dirs.append((0j, 1.0 + 0j))
    distinct = inf_mult <= 1 and len(roots) == len(
        _dedupe_points([(complex(r),) for r in roots])
    )
    return dirs, distinct


def _line_divides(G: AffinePolynomial, direction) -> bool:
    """Does the line through the origin with this direction lie in {G=0}?"""
    alpha, beta = direction
    deg = G.total_degree
    coeffs = np.zeros(deg + 1, dtype=np.complex128)
    for (i, j), c in G.terms.items():
        coeffs[i + j] += c * (alpha**i) * (beta**j)
    scale = max(abs(c) for c in G.terms.values())
    return bool(np.all(np.abs(coeffs) <= 1e-7 * scale))


def plane_curve_genus(C: PlaneCurve) -> GenusReport:
    """Genus by the ordinary-singularity formula, with a full singularity
    enumeration (affine points by resultant elimination, plus the line at
    infinity chart by chart).

    Non-ordinary singularities yield verdict "unsupported" (never a wrong
    genus); repeated factors or split-off lines yield "undetermined".
    """
    F = C.F
    d = C.degree
    if d < 1:
        raise GeometryError("constant polynomial")
    fx = F.partial(0)
    fy = F.partial(1)
    if F.degree_in(0) == 0 or F.degree_in(1) == 0:
        return GenusReport("undetermined", None, d, False, [],
                           note="curve independent of one variable")
    # repeated-factor surrogate: discriminant-style resultants must not vanish
    try:
        if resultant_eliminate(F, fy, 1).is_zero or resultant_eliminate(F, fx, 0).is_zero:
            return GenusReport("undetermined", None, d, False, [],
                               note="repeated factor detected")
    except EliminationUndecided as exc:
        return GenusReport("undetermined", None, d, False, [], note=str(exc))

    sing: list[SingularPoint] = []
    try:
        affine_pts = common_affine_zeros([F, fx, fy], find_all=True)
    except EliminationUndecided as exc:
        return GenusReport("undetermined", None, d, False, [], note=str(exc))
    split_line = False
    for x0, y0 in affine_pts:
        G = shift_bivariate(F, x0, y0)
        mult, form = _lowest_form(G)
        if mult < 2:
            continue  # verification tolerance let a near-smooth point through
        dirs, distinct = _tangent_directions(mult, form)
        sing.append(SingularPoint((x0, y0), False, mult, distinct, dirs))
        split_line = split_line or any(_line_divides(G, t) for t in dirs)

    # line at infinity
    Fh = F.homogenize()  # (X, Y, Z), Z last
    top = {e: c for e, c in Fh.terms.items() if e[2] == 0}
    top_poly = np.zeros(d + 1, dtype=np.complex128)
    for (i, j, _), c in top.items():
        top_poly[j] = c
    inf_points = [(1.0 + 0j, complex(r)) for r in _poly_roots(top_poly)]
    scale_top = float(np.max(np.abs(top_poly)))
    if abs(top_poly[d]) <= 1e-9 * scale_top:
        inf_points.append((0j, 1.0 + 0j))
    grads = [Fh.partial(i) for i in range(3)]
    for x0, y0 in _dedupe_points(inf_points):
        pt3 = (x0, y0, 0j)
        is_sing = all(
            abs(g.eval(pt3)) <= WITNESS_TOL * max(_eval_scale_h(g, pt3), 1e-12)
            for g in grads
        )
        if not is_sing:
            continue
        chart = 0 if abs(x0) >= abs(y0) else 1
        aff = Fh.dehomogenize(chart)  # vars: (other, Z)
        u0 = y0 / x0 if chart == 0 else x0 / y0
        G = shift_bivariate(aff, u0, 0j)
        mult, form = _lowest_form(G)
        if mult < 2:
            continue
        dirs, distinct = _tangent_directions(mult, form)
        sing.append(SingularPoint((x0, y0, 0j), True, mult, distinct, dirs))
        split_line = split_line or any(_line_divides(G, t) for t in dirs)

    if split_line:
        return GenusReport("undetermined", None, d, False, sing,
                           note="a line through a singular point divides the curve")
    if any(not s.ordinary for s in sing):
        return GenusReport("unsupported", None, d, False, sing,
                           note="non-ordinary singularity")
    g = (d - 1) * (d - 2) // 2 - sum(s.multiplicity * (s.multiplicity - 1) // 2
                                     for s in sing)
    return GenusReport("ok", g, d, not sing, sing)


def _eval_scale_h(P: HomogeneousPolynomial, pt) -> float:
    total = 0.0
    for e, c in P.terms.items():
        m = abs(c)
        for v, k in zip(pt, e):
            if k:
                m *= abs(v) ** k
        total += m
    return total


# ---------------------------------------------------------------------------
# Grassmannian bookkeeping
# ---------------------------------------------------------------------------

def grassmann_gamma_codim(m: int, a: int, b: int, c: int) -> int:
    """Codimension (m-c)(a+b-c) of the incidence locus in Gr_{m,a}.

    Parameter range as stated: 1 <= a <= c <= m-1 and 1 <= b <= c <= a+b.
    """
    if not (1 <= a <= c <= m - 1):
        raise GeometryError(f"need 1 <= a <= c <= m-1, got a={a}, c={c}, m={m}")
    if not (1 <= b <= c <= a + b):
        raise GeometryError(f"need 1 <= b <= c <= a+b, got b={b}, c={c}, a={a}")
    return (m - c) * (a + b - c)


def _rank_mod_q(rows: list[list[int]], q: int) -> int:
    mat = [[v % q for v in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][col] % q:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], q - 2, q)
        mat[rank] = [(v * inv) % q for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] % q:
                f = mat[r][col]
                mat[r] = [(mat[r][j] - f * mat[rank][j]) % q for j in range(cols)]
        rank += 1
    return rank


def enumerate_subspaces(m: int, k: int, q: int):
    """All k-dimensional subspaces of F_q^m as reduced-row-echelon bases."""
    if k == 0:
        yield []
        return
    for pivots in itertools.combinations(range(m), k):
        free_pos = []
        for r, pc in enumerate(pivots):
            for col in range(pc + 1, m):
                if col not in pivots:
                    free_pos.append((r, col))
        for assign in itertools.product(range(q), repeat=len(free_pos)):
            rows = [[0] * m for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, col), v in zip(free_pos, assign):
                rows[r][col] = v
            yield rows


def gamma_count(m: int, a: int, b: int, c: int, q: int) -> int:
    """|Gamma| over F_q: codimension-a subspaces V with
    dim(V intersect Q_b) >= m - c, where Q_b = 0_b x F_q^(m-b).

    The incidence subspace is Q_b (matching the displayed codimension
    formula by a dimension count), with the threshold m - c.
    """
    k = m - a
    qb_rows = [[1 if j == i else 0 for j in range(m)] for i in range(b, m)]
    count = 0
    for rows in enumerate_subspaces(m, k, q):
        rank = _rank_mod_q(rows + qb_rows, q) if rows else len(qb_rows)
        inter_dim = k + (m - b) - rank
        if inter_dim >= m - c:
            count += 1
    return count


def gaussian_binomial(m: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def fit_count_dimension(n2: int, n3: int) -> int:
    """Degree of the unique polynomial with nonnegative integer
    coefficients taking value n2 at q=2 and n3 at q=3.

    Point counts of cell-decomposed varieties are such polynomials; two
    evaluations pin the degree exactly (the coefficient vector need not be
    unique, the degree must be).  Raises when no or several degrees fit.
    """
    if n2 < 1 or n3 < 1:
        raise GeometryError("counts must be positive")

    def feasible(deg: int) -> bool:
        # search coefficients from the top; prune by both constraints
        def rec(i: int, r2: int, r3: int) -> bool:
            if i < 0:
                return r2 == 0 and r3 == 0
            lo = 1 if i == deg else 0
            hi = min(r2 >> i, r3 // (3**i))
            for v in range(lo, hi + 1):
                if rec(i - 1, r2 - v * (2**i), r3 - v * (3**i)):
                    return True
            return False
        return rec(deg, n2, n3)

    hits = [deg for deg in range(n2.bit_length()) if feasible(deg)]
    if len(hits) != 1:
        raise GeometryError(f"dimension fit ambiguous or empty: {hits}")
    return hits[0]


def theorem_b_moduli_check(n: int, m: int, r: int, kappa_0: int,
                           M_size: int) -> tuple[int, int, bool]:
    """Moduli-dimension comparison: alpha = 2(m-n-r+1) against the bound
    beta <= m - kappa_0 - 2r + |M|; ok means alpha exceeds the bound."""
    if not 1 <= r <= m:
        raise GeometryError("need 1 <= r <= m")
    if not 0 <= M_size <= min(r, n):
        raise GeometryError("need 0 <= M_size <= min(r, n)")
    if kappa_0 < 0:
        raise GeometryError("kappa_0 must be >= 0")
    alpha = 2 * (m - n - r + 1)
    beta_bound = m - kappa_0 - 2 * r + M_size
    return alpha, beta_bound, alpha > beta_bound
