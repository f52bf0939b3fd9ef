"""Borel-type degeneracy analysis of pushed-forward curves.

Given a coordinate-wise polynomial map (each component a monomial times a
lower-degree form), the pushforward of an entire curve splits into classes
of components with pairwise constant ratios.  The partition, the constants,
the vanishing of class sums, and the span dimension of the component tuple
are all decided symbolically on canonical exponential-polynomial forms;
nowhere-vanishing hypotheses are certified globally when the sum collapses
to c*exp(q), and on the working disk otherwise.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .curves import ExpPolySum, ProjectiveCurve, ratio_is_constant
from .polynomials import HomogeneousPolynomial, monomial
from .nevanlinna import compose_with_curve
from .zerofind import zeros_in_disk

#: |b_s| below this times max|c| counts as a vanishing class sum
CLASS_SUM_TOL = 1e-10
RANK_TOL = 1e-8


class BorelError(ValueError):
    pass


@dataclass(frozen=True)
class PiMap:
    """Coordinate map z_i -> z_i^(d - delta_i) * Q_i(z), all of degree d."""

    components: tuple[HomogeneousPolynomial, ...]
    degree: int
    deltas: tuple[int, ...]
    in_theorem_range: bool

    @property
    def num_vars(self) -> int:
        return self.components[0].num_vars


def build_pi_map(
    Q_list: list[HomogeneousPolynomial], delta_list: list[int], d: int
) -> PiMap:
    """Assemble the map [z] -> [z_0^(d-d0) Q_0 : ... : z_n^(d-dn) Q_n].

    Warns (without failing) when d is not above n(n+1) + sum(deltas): the
    degeneracy statements only hold above that threshold, but callers may
    probe outside it.
    """
    n = len(Q_list) - 1
    if len(delta_list) != n + 1:
        raise BorelError("Q_list and delta_list lengths differ")
    comps = []
    for i, (Q, delta) in enumerate(zip(Q_list, delta_list)):
        if Q.num_vars != n + 1:
            raise BorelError(f"Q_{i} has arity {Q.num_vars}, expected {n + 1}")
        if Q.degree != delta or Q.is_zero:
            raise BorelError(f"Q_{i} must be nonzero of degree delta_{i} = {delta}")
        if d - delta < 0:
            raise BorelError(f"delta_{i} = {delta} exceeds d = {d}")
        exps = [0] * (n + 1)
        exps[i] = d - delta
        comps.append(monomial(n + 1, exps) * Q)
    threshold = n * (n + 1) + sum(delta_list)
    ok = d > threshold
    if not ok:
        warnings.warn(
            f"degree {d} not above the degeneracy threshold {threshold}",
            stacklevel=2,
        )
    return PiMap(tuple(comps), d, tuple(delta_list), ok)


def pushforward(pi: PiMap, f: ProjectiveCurve) -> ProjectiveCurve:
    """g = pi o f, componentwise composition.

    Identically-zero components are retained: the image may land inside
    coordinate planes, so the result skips the reducedness validation.
    """
    if pi.num_vars != len(f.components):
        raise BorelError(
            f"map on {pi.num_vars} coordinates applied to "
            f"{len(f.components)}-component curve"
        )
    comps = tuple(compose_with_curve(P, f) for P in pi.components)
    if all(c.is_zero for c in comps):
        raise BorelError("pushforward vanishes identically")
    return ProjectiveCurve(comps, f.working_radius, validate=False)


@dataclass(frozen=True)
class BorelPartition:
    """Partition of component indices: classes[0] is the zero class I_0."""

    classes: tuple[tuple[int, ...], ...]
    constants: dict  # (i, j) -> complex with g_i == c * g_j, within classes
    exceptional_class: int | None  # index into `classes`, never 0

    def class_of(self, i: int) -> int:
        for s, cls in enumerate(self.classes):
            if i in cls:
                return s
        raise KeyError(i)


def borel_partition(g: list[ExpPolySum]) -> BorelPartition:
    """Group components by constant ratios; find the nonvanishing class sum.

    The zero class collects identically-zero components.  For each other
    class the scaled sum b_s = sum_j c_(j, rep) decides exceptionality:
    exactly one class with b_s != 0 is singled out, else none is.
    """
    if not g:
        raise BorelError("empty component list")
    zero_class = tuple(i for i, h in enumerate(g) if h.is_zero)
    live = [i for i, h in enumerate(g) if not h.is_zero]
    classes: list[list[int]] = []
    for i in live:
        for cls in classes:
            if ratio_is_constant(g[i], g[cls[0]]) is not None:
                cls.append(i)
                break
        else:
            classes.append([i])
    constants: dict = {}
    for cls in classes:
        for i in cls:
            for j in cls:
                if i != j:
                    constants[(i, j)] = ratio_is_constant(g[i], g[j])
    exceptional = None
    nonzero_sums = []
    for s, cls in enumerate(classes, start=1):
        rep = cls[0]
        b = sum(constants[(j, rep)] if j != rep else 1.0 for j in cls)
        cmax = max(
            [abs(constants[(j, rep)]) for j in cls if j != rep] + [1.0]
        )
        if abs(b) > CLASS_SUM_TOL * cmax:
            nonzero_sums.append(s)
    if len(nonzero_sums) == 1:
        exceptional = nonzero_sums[0]
    return BorelPartition(
        classes=(zero_class,) + tuple(tuple(c) for c in classes),
        constants=constants,
        exceptional_class=exceptional,
    )


@dataclass
class BorelReport:
    """Clause-by-clause verdicts for the partition conclusions."""

    case: str  # "logarithmic" | "compact"
    clauses: dict  # {"i": bool, "ii": bool, "iii": bool, "iv": bool}
    hypothesis: str  # "certified_global" | "verified_to_radius" | "failed"
    radius: float
    partition: BorelPartition

    @property
    def all_pass(self) -> bool:
        return all(self.clauses.values())

    def to_json(self) -> str:
        return json.dumps(
            {
                "classes": [list(c) for c in self.partition.classes],
                "constants": [
                    {"i": i, "j": j, "re": c.real, "im": c.imag}
                    for (i, j), c in sorted(self.partition.constants.items())
                ],
                "exceptional": self.partition.exceptional_class,
                "clauses": dict(self.clauses),
                "hypothesis": self.hypothesis,
                "case": self.case,
                "radius": self.radius,
            }
        )


def verify_borel_conclusions(
    g: list[ExpPolySum],
    partition: BorelPartition,
    case: str,
    radius: float = 10.0,
) -> BorelReport:
    """Check the partition conclusions clause by clause.

    (i) the zero class is exactly the identically-zero components;
    (ii) class cardinality >= 2, with at most one exception in the
    logarithmic case, without exception in the compact case;
    (iii) every stored ratio constant is reproduced by the canonical-form
    identity test; (iv) class sums vanish identically, with exactly one
    exception (logarithmic) or none (compact).

    The hypothesis on sum(g): "nowhere vanishing" is certified globally
    when the canonical sum is c*exp(q), else checked on |z| <= radius
    (logarithmic); identically zero in canonical form (compact).
    """
    if case not in ("logarithmic", "compact"):
        raise BorelError(f"unknown case {case!r}")
    n_comp = len(g)
    if any(i >= n_comp for cls in partition.classes for i in cls):
        raise BorelError("partition does not match the component list")

    zero_set = tuple(i for i, h in enumerate(g) if h.is_zero)
    clause_i = partition.classes[0] == zero_set

    sizes = [len(c) for c in partition.classes[1:]]
    singletons = sum(1 for s in sizes if s < 2)
    clause_ii = singletons <= 1 if case == "logarithmic" else singletons == 0

    clause_iii = True
    for (i, j), c in partition.constants.items():
        got = ratio_is_constant(g[i], g[j])
        if got is None or abs(got - c) > 1e-8 * max(1.0, abs(c)):
            clause_iii = False
            break

    vanishing = []
    for cls in partition.classes[1:]:
        total = ExpPolySum.zero()
        for i in cls:
            total = total + g[i]
        vanishing.append(total.is_zero)
    nonvanishing = sum(1 for v in vanishing if not v)
    clause_iv = nonvanishing == 1 if case == "logarithmic" else nonvanishing == 0

    total = ExpPolySum.zero()
    for h in g:
        total = total + h
    if case == "compact":
        hypothesis = "certified_global" if total.is_zero else "failed"
    else:
        if total.is_zero:
            hypothesis = "failed"
        elif total.never_vanishes:
            hypothesis = "certified_global"
        else:
            try:
                divisor = zeros_in_disk(total, radius)
                hypothesis = "verified_to_radius" if not divisor.points else "failed"
            except Exception:
                hypothesis = "failed"

    return BorelReport(
        case=case,
        clauses={"i": clause_i, "ii": clause_ii, "iii": clause_iii, "iv": clause_iv},
        hypothesis=hypothesis,
        radius=radius,
        partition=partition,
    )


def span_dimension(
    g: list[ExpPolySum],
    samples: int,
    seed: int = 42,
    radius: float = 3.0,
) -> int:
    """Projective dimension of the linear span of the component tuple.

    Numerical rank (singular values above 1e-8 of the largest) of the
    samples-by-components evaluation matrix at seeded uniform points of
    the disk, minus one.  Rows are rescaled by their largest log-magnitude,
    which leaves the rank unchanged and avoids overflow for fast-growing
    exponential terms.
    """
    k = len(g)
    if samples < 2 * k:
        raise BorelError(f"need at least {2 * k} samples for {k} components")
    rng = np.random.default_rng(seed)
    rho = np.sqrt(rng.uniform(0.0, 1.0, samples)) * radius
    ang = rng.uniform(0.0, 2 * np.pi, samples)
    z = rho * np.exp(1j * ang)
    logm = np.full((samples, k), -np.inf)
    phase = np.zeros((samples, k))
    for j, h in enumerate(g):
        if h.is_zero:
            continue
        lm, ph = h.eval_scaled(z)
        logm[:, j] = lm
        phase[:, j] = ph
    row_max = np.max(logm, axis=1, keepdims=True)
    row_max[~np.isfinite(row_max)] = 0.0
    A = np.exp(logm - row_max + 1j * phase)
    A[logm == -np.inf] = 0.0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        raise BorelError("evaluation matrix vanished entirely")
    rank = int(np.sum(sv > RANK_TOL * sv[0]))
    return rank - 1
