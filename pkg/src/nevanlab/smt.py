"""Second-main-theorem experiment harness.

Each runner assembles a curve, a divisor family and an r grid, evaluates
both sides of one inequality per grid point, applies the frozen slack
model, and returns a machine-readable report.  A hypothesis failure
(linearly degenerate curve, constant curve) yields the distinct verdict
"degenerate" rather than a failed inequality: a broken hypothesis is not
a counterexample.  Runs whose left-hand coefficient is nonpositive are
labeled vacuous and always pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._util import pmap
from .borel import build_pi_map, pushforward, span_dimension
from .curves import ExpPolySum, ProjectiveCurve
from .geometry import FermatWaringData, check_general_position
from .nevanlinna import (
    PASS_FRACTION,
    SLACK_PARAMS,
    ImageInDivisor,
    NevanlinnaProfile,
    compose_with_curve,
    nevanlinna_profile,
    order_function,
    slack,
    truncated_counting,
    zeros_in_disk,
)
from .polynomials import HomogeneousPolynomial


class SmtError(ValueError):
    pass


@dataclass
class SmtReport:
    """One inequality evaluated over a grid, with the slack applied."""

    inequality_id: str
    profile: NevanlinnaProfile
    lhs: list[float]
    rhs: list[float]
    slack_values: list[float]
    pass_fraction: float
    slack_params: dict
    verdict: str  # "pass" | "fail" | "degenerate"
    vacuous: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def margins(self) -> list[float]:
        return [r + s - l for l, r, s in zip(self.lhs, self.rhs, self.slack_values)]

    def to_json(self) -> str:
        return json.dumps(
            {
                "inequality_id": self.inequality_id,
                "verdict": self.verdict,
                "vacuous": self.vacuous,
                "pass_fraction": self.pass_fraction,
                "slack_params": self.slack_params,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "slack": self.slack_values,
                "detail": self.detail,
                "profile": json.loads(self.profile.to_json()),
            }
        )

    @staticmethod
    def from_json(text: str) -> "SmtReport":
        obj = json.loads(text)
        prof = NevanlinnaProfile.from_json(json.dumps(obj["profile"]))
        return SmtReport(
            inequality_id=obj["inequality_id"],
            profile=prof,
            lhs=obj["lhs"],
            rhs=obj["rhs"],
            slack_values=obj["slack"],
            pass_fraction=obj["pass_fraction"],
            slack_params=obj["slack_params"],
            verdict=obj["verdict"],
            vacuous=obj["vacuous"],
            detail=obj.get("detail", {}),
        )


def default_grid(rational: bool, count: int | None = None) -> list[float]:
    """Log-spaced grids: [2, 10] for exponential curves, [2, 50] for
    rational ones (their zero counts grow polynomially, so wider is cheap)."""
    if rational:
        return list(np.geomspace(2.0, 50.0, count or 20))
    return list(np.geomspace(2.0, 10.0, count or 20))


def _is_rational(f: ProjectiveCurve) -> bool:
    return all(c.is_polynomial for c in f.components)


def _order_values(f: ProjectiveCurve, grid: list[float], jobs: int) -> dict:
    vals = pmap(lambda r: order_function(f, r), grid, jobs)
    return dict(zip(grid, vals))


def _assemble(
    inequality_id: str,
    f: ProjectiveCurve,
    D: HomogeneousPolynomial,
    level: float,
    grid: list[float],
    t_vals: dict,
    lhs: list[float],
    rhs: list[float],
    detail: dict,
    vacuous: bool,
    jobs: int,
    meta: dict | None = None,
) -> SmtReport:
    rational = _is_rational(f)
    slack_vals = [slack(t_vals[r], r, rational) for r in grid]
    hold = [l <= rr + s for l, rr, s in zip(lhs, rhs, slack_vals)]
    frac = sum(hold) / len(hold)
    verdict = "pass" if frac >= PASS_FRACTION else "fail"
    profile = nevanlinna_profile(
        f, D, level, grid, meta=dict(meta or {}, inequality=inequality_id),
        jobs=jobs, t_values=t_vals,
    )
    params = dict(SLACK_PARAMS, rational=rational, pass_fraction=PASS_FRACTION)
    return SmtReport(
        inequality_id=inequality_id,
        profile=profile,
        lhs=lhs,
        rhs=rhs,
        slack_values=slack_vals,
        pass_fraction=frac,
        slack_params=params,
        verdict=verdict,
        vacuous=vacuous,
        detail=detail,
    )


def _degenerate_report(inequality_id: str, reason: str) -> SmtReport:
    empty = NevanlinnaProfile(
        r_grid=[2.0], T=[0.0], N_trunc=[0.0], level=math.inf,
        prox=[0.0], residual=[0.0], meta={"degenerate": reason},
    )
    return SmtReport(
        inequality_id=inequality_id,
        profile=empty,
        lhs=[],
        rhs=[],
        slack_values=[],
        pass_fraction=0.0,
        slack_params=dict(SLACK_PARAMS),
        verdict="degenerate",
        detail={"reason": reason},
    )


def _hyperplanes_general_position(forms: list[HomogeneousPolynomial], n: int) -> bool:
    """For linear forms, general position is subset-rank fullness."""
    import itertools

    rows = []
    for H in forms:
        if H.degree != 1:
            raise SmtError("hyperplane family must consist of linear forms")
        row = np.zeros(n + 1, dtype=np.complex128)
        for e, c in H.terms.items():
            row[e.index(1)] = c
        rows.append(row)
    mat = np.array(rows)
    for subset in itertools.combinations(range(len(forms)), n + 1):
        sub = mat[list(subset), :]
        scale = np.max(np.abs(sub)) ** (n + 1)
        if abs(np.linalg.det(sub)) <= 1e-9 * max(scale, 1e-30):
            return False
    return True


def run_cartan_check(
    f: ProjectiveCurve,
    hyperplanes: list[HomogeneousPolynomial],
    r_grid,
    jobs: int = 1,
) -> SmtReport:
    """Truncated second main theorem for hyperplanes:
    (q - n - 1) T_f(r) <= sum_i N_f^[n](r, H_i) + S(r).

    Requires q >= n+2 hyperplanes in general position; a linearly
    degenerate curve yields verdict "degenerate".
    """
    grid = sorted(float(r) for r in r_grid)
    n = f.dim
    q = len(hyperplanes)
    if q < n + 2:
        raise SmtError(f"need q >= n+2 hyperplanes, got {q}")
    if not _hyperplanes_general_position(hyperplanes, n):
        raise SmtError("hyperplane family not in general position")
    if span_dimension(list(f.components), samples=2 * (n + 1) + 2) < n:
        return _degenerate_report("cartan_eq2", "curve is linearly degenerate")

    pullbacks = [compose_with_curve(H, f) for H in hyperplanes]
    for i, u in enumerate(pullbacks):
        if u.is_zero:
            raise ImageInDivisor(f"curve lies inside hyperplane {i}")
    rmax = max(grid)
    divisors = [zeros_in_disk(u, rmax * (1 + 2e-3)) for u in pullbacks]
    t_vals = _order_values(f, grid, jobs)
    lhs = [(q - n - 1) * t_vals[r] for r in grid]
    rhs = [
        sum(truncated_counting(E, r, n) for E in divisors) for r in grid
    ]
    product = hyperplanes[0]
    for H in hyperplanes[1:]:
        product = product * H
    return _assemble(
        "cartan_eq2", f, product, n, grid, t_vals, lhs, rhs,
        detail={"q": q, "n": n}, vacuous=False, jobs=jobs,
        meta={"targets": q},
    )


def run_prop21_check(
    f: ProjectiveCurve,
    Q_list: list[HomogeneousPolynomial],
    delta_list: list[int],
    d: int,
    r_grid,
    jobs: int = 1,
) -> SmtReport:
    """Degeneracy-threshold estimate for D = sum z_i^(d-delta_i) Q_i:
    [d - (n(n+1) + sum deltas)] T_f(r) <= N_f^[n](r, D) + S(r).

    Hypotheses: the component family is in general position and the pushed
    curve satisfies no nontrivial linear relation (else "degenerate").
    """
    grid = sorted(float(r) for r in r_grid)
    n = f.dim
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pi = build_pi_map(Q_list, delta_list, d)
    if not check_general_position(list(pi.components), n):
        return _degenerate_report("prop21", "component family not in general position")
    g = pushforward(pi, f)
    if span_dimension(list(g.components), samples=2 * (n + 1) + 2) < n:
        return _degenerate_report("prop21", "pushforward satisfies a linear relation")
    D = pi.components[0]
    for P in pi.components[1:]:
        D = D + P
    coeff = d - (n * (n + 1) + sum(delta_list))
    u = ExpPolySum.zero()
    for c in g.components:
        u = u + c
    if u.is_zero:
        raise ImageInDivisor("curve image lies inside D")
    rmax = max(grid)
    E = zeros_in_disk(u, rmax * (1 + 2e-3))
    t_vals = _order_values(f, grid, jobs)
    lhs = [coeff * t_vals[r] for r in grid]
    rhs = [truncated_counting(E, r, n) for r in grid]
    vacuous = coeff <= 0
    return _assemble(
        "prop21", f, D, n, grid, t_vals, lhs, rhs,
        detail={"d": d, "deltas": list(delta_list), "lhs_coefficient": coeff},
        vacuous=vacuous, jobs=jobs,
    )


def run_theorem_b_check(
    fw: FermatWaringData,
    f: ProjectiveCurve,
    r_grid,
    jobs: int = 1,
) -> SmtReport:
    """Fermat-Waring estimate (d - m(m-1)) T_f(r) <= N_f^[m-1](r, D) + S(r),
    with the defect surrogate and its bound m(m-1)/d in the detail block."""
    grid = sorted(float(r) for r in r_grid)
    if span_dimension(list(f.components), samples=2 * len(f.components) + 2) < 1:
        return _degenerate_report("theorem_b", "curve is constant")
    m, d = fw.m, fw.d
    u = compose_with_curve(fw.D, f)
    if u.is_zero:
        raise ImageInDivisor("curve image lies inside the hypersurface")
    rmax = max(grid)
    E = zeros_in_disk(u, rmax * (1 + 2e-3))
    coeff = d - m * (m - 1)
    level = m - 1
    t_vals = _order_values(f, grid, jobs)
    lhs = [coeff * t_vals[r] for r in grid]
    rhs = [truncated_counting(E, r, level) for r in grid]
    top = grid[-max(1, len(grid) // 4):]
    worst = max(
        truncated_counting(E, r, level) / (d * t_vals[r]) for r in top
    )
    surrogate = min(1.0, max(0.0, 1.0 - worst))
    return _assemble(
        "theorem_b", f, fw.D, level, grid, t_vals, lhs, rhs,
        detail={
            "n": fw.n, "m": m, "d": d, "seed": fw.seed,
            "lhs_coefficient": coeff,
            "defect_surrogate": surrogate,
            "defect_bound": m * (m - 1) / d,
        },
        vacuous=coeff <= 0, jobs=jobs,
    )


def run_fmt_check(
    f: ProjectiveCurve,
    D: HomogeneousPolynomial,
    r_grid,
    jobs: int = 1,
) -> SmtReport:
    """First-main-theorem closure: the residual m + N - dT must stay within
    0.05 * d * T(r_max) of its value across the grid."""
    grid = sorted(float(r) for r in r_grid)
    profile = nevanlinna_profile(f, D, math.inf, grid, jobs=jobs,
                                 meta={"inequality": "fmt"})
    res = profile.residual
    spread = max(res) - min(res)
    bound = 0.05 * D.degree * profile.T[-1]
    rational = _is_rational(f)
    params = dict(SLACK_PARAMS, rational=rational, pass_fraction=PASS_FRACTION)
    verdict = "pass" if spread <= bound else "fail"
    return SmtReport(
        inequality_id="fmt",
        profile=profile,
        lhs=[abs(v - res[0]) for v in res],
        rhs=[0.0 for _ in res],
        slack_values=[bound for _ in res],
        pass_fraction=1.0 if verdict == "pass" else 0.0,
        slack_params=params,
        verdict=verdict,
        detail={"residual_spread": spread, "spread_bound": bound},
    )


def emit_report(report: SmtReport, path: str | Path) -> dict[str, Path]:
    """Write CSV (r, lhs, rhs, slack, margin), full JSON, and a
    gnuplot-ready two-column margin file next to `path`."""
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    margin_path = base.with_suffix(".margin.dat")
    lines = ["r,lhs,rhs,slack,margin"]
    for r, l, rr, s, mg in zip(
        report.profile.r_grid, report.lhs, report.rhs,
        report.slack_values, report.margins,
    ):
        lines.append(f"{r!r},{l!r},{rr!r},{s!r},{mg!r}")
    csv_path.write_text("\n".join(lines) + "\n")
    json_path.write_text(report.to_json())
    margin_lines = [
        f"{r!r} {mg!r}" for r, mg in zip(report.profile.r_grid, report.margins)
    ]
    margin_path.write_text("\n".join(margin_lines) + "\n")
    return {"csv": csv_path, "json": json_path, "margin": margin_path}
