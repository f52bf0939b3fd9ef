"""Acceptance suite: one test per criterion, each printing a PASS line.

Every tolerance is pinned here, not configured elsewhere.  Run with
``pytest tests/test_acceptance.py -v -s`` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

from nevanlab.borel import borel_partition, build_pi_map, pushforward, verify_borel_conclusions
from nevanlab.curves import ExpPolySum, ProjectiveCurve, ratio_is_constant
from nevanlab.geometry import (
    PlaneCurve,
    build_fermat_waring,
    build_theorem_a_surface,
    check_general_position,
    fit_count_dimension,
    gamma_count,
    grassmann_gamma_codim,
    plane_curve_genus,
    search_theorem_a_coefficients,
    smoothness_check,
    theorem_a_component_family,
    theorem_b_moduli_check,
)
from nevanlab.nevanlinna import fmt_residual, order_function
from nevanlab.polynomials import AffinePolynomial, HomogeneousPolynomial, linear_form
from nevanlab.smt import run_cartan_check, run_theorem_b_check
from nevanlab.zerofind import zeros_in_disk


def _report(num: int, ok: bool, text: str):
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, text


def one():
    return ExpPolySum.const(1.0)


def z_coord():
    return ExpPolySum.poly([0, 1.0])


def e_z(rate=1.0):
    return ExpPolySum.exp_term([1.0], [0, rate])


def test_criterion_1_closed_form_order_functions():
    t0 = time.time()
    f_line = ProjectiveCurve((one(), z_coord()), 120.0)
    f_exp = ProjectiveCurve((one(), e_z()), 30.0)
    ok = True
    for r in (2.0, 5.0, 10.0, 50.0, 100.0):
        ok = ok and abs(order_function(f_line, r) - math.log(r)) < 1e-6
    for r in (2.0, 5.0, 10.0):
        ok = ok and abs(order_function(f_exp, r) - r / math.pi) < 1e-5
    elapsed = time.time() - t0
    ok = ok and elapsed < 5.0
    _report(1, ok, f"order functions match log r and r/pi ({elapsed:.2f}s < 5s)")


def test_criterion_2_fmt_residual_boundedness():
    t0 = time.time()
    z1 = linear_form([0.0, 1.0])
    sum3 = linear_form([1.0, 1.0, 1.0])
    fixtures = [
        (ProjectiveCurve((one(), z_coord()), 25.0), z1, True),
        (ProjectiveCurve((one(), e_z()), 25.0), z1, True),
        (ProjectiveCurve((one(), z_coord(), e_z()), 25.0), sum3, False),
        (ProjectiveCurve((one(), z_coord(), ExpPolySum.poly([0, 0, 1.0])), 25.0),
         sum3, False),
        (ProjectiveCurve((one(), e_z(), e_z(2.0)), 25.0), sum3, False),
    ]
    grid = list(np.geomspace(2.0, 20.0, 7))
    ok = True
    for f, D, exact in fixtures:
        res = fmt_residual(f, D, grid)
        spread = max(res) - min(res)
        bound = 0.05 * D.degree * order_function(f, 20.0)
        ok = ok and spread <= bound
        if exact:
            ok = ok and max(abs(v) for v in res) < 1e-5
    elapsed = time.time() - t0
    ok = ok and elapsed < 120.0
    _report(2, ok, f"FMT residual spreads bounded, first two exactly zero "
                   f"({elapsed:.1f}s < 120s)")


def test_criterion_3_argument_principle_exactness():
    h = ExpPolySum.from_terms([([1.0], [0, 1.0]), ([-1.0], [])])
    d = zeros_in_disk(h, 7.0)
    ok = len(d.points) == 3 and all(m == 1 for _, m in d.points)
    for target in (0.0, 2j * math.pi, -2j * math.pi):
        ok = ok and min(abs(z - target) for z, _ in d.points) < 1e-9
    h3 = ExpPolySum.poly(np.convolve(np.convolve([-0.5, 1], [-0.5, 1]), [-0.5, 1]))
    d3 = zeros_in_disk(h3, 1.0)
    ok = ok and len(d3.points) == 1 and d3.points[0][1] == 3
    ok = ok and abs(d3.points[0][0] - 0.5) < 1e-9
    _report(3, ok, "e^z - 1 gives three simple zeros at 0, +-2 pi i (1e-9); "
                   "(z - 1/2)^3 gives multiplicity 3")


def test_criterion_4_borel_partition_oracle():
    rng = np.random.default_rng(2024)
    q_pool = [[], [0, 1.0], [0, 2.0], [0, 1.0, 0.5]]
    ok = True
    for _ in range(50):
        n_comp = int(rng.integers(2, 7))
        qs = rng.choice(len(q_pool), size=3, replace=False)
        g = []
        for _ in range(n_comp):
            if rng.random() < 0.12:
                g.append(ExpPolySum.zero())
                continue
            q = q_pool[qs[rng.integers(0, 3)]]
            p = rng.integers(-4, 5, size=rng.integers(1, 3)).astype(complex)
            if not np.any(p):
                p = np.array([1.0 + 0j])
            g.append(ExpPolySum.from_terms([(p, q)]))
        part = borel_partition(g)
        zero = {i for i, h in enumerate(g) if h.is_zero}
        ok = ok and set(part.classes[0]) == zero
        classes = [set(c) for c in part.classes[1:]]
        for i in range(n_comp):
            for j in range(i + 1, n_comp):
                if i in zero or j in zero:
                    continue
                same = ratio_is_constant(g[i], g[j]) is not None
                together = any(i in c and j in c for c in classes)
                ok = ok and same == together

    # canonical fixtures with hand-computed clause expectations
    g1 = [e_z(), e_z().scale(-1), ExpPolySum.const(2.0), ExpPolySum.const(-1.0)]
    r1 = verify_borel_conclusions(g1, borel_partition(g1), "logarithmic")
    ok = ok and r1.clauses == {"i": True, "ii": True, "iii": True, "iv": True}
    ok = ok and r1.hypothesis == "certified_global"

    g2 = [e_z(), e_z().scale(-1), ExpPolySum.const(1.0), ExpPolySum.const(-1.0)]
    r2 = verify_borel_conclusions(g2, borel_partition(g2), "compact")
    ok = ok and r2.clauses == {"i": True, "ii": True, "iii": True, "iv": True}

    g3 = [e_z(), e_z(2.0), z_coord()]
    p3 = borel_partition(g3)
    ok = ok and len(p3.classes) == 4 and all(len(c) == 1 for c in p3.classes[1:])
    _report(4, ok, "partition matches the all-pairs oracle on 50 random tuples; "
                   "canonical fixtures verify clause by clause")


def test_criterion_5_cartan_desk_check():
    t0 = time.time()
    f = ProjectiveCurve((one(), z_coord(), e_z()), 25.0)
    lines = [
        linear_form([1, 0, 0]),
        linear_form([0, 1, 0]),
        linear_form([0, 0, 1]),
        linear_form([1, 2, 3]),
    ]
    rep = run_cartan_check(f, lines, np.geomspace(2, 20, 20))
    elapsed = time.time() - t0
    ok = rep.verdict == "pass" and rep.pass_fraction >= 0.9 and elapsed < 120.0
    _report(5, ok, f"hyperplane estimate passes at fraction "
                   f"{rep.pass_fraction:.2f} ({elapsed:.1f}s < 120s)")


def test_criterion_6_theorem_b_desk_check():
    t0 = time.time()
    fw = build_fermat_waring(2, 5, 21, seed=1)
    f = ProjectiveCurve((one(), z_coord(), e_z()), 11.0)
    rep = run_theorem_b_check(fw, f, np.geomspace(2, 10, 15))
    elapsed = time.time() - t0
    surrogate = rep.detail["defect_surrogate"]
    ok = (
        rep.verdict == "pass"
        and surrogate <= 20 / 21 + 0.02
        and rep.detail["defect_bound"] == pytest.approx(20 / 21)
        and elapsed < 600.0
    )
    _report(6, ok, f"power-sum estimate passes; defect surrogate "
                   f"{surrogate:.4f} <= {20 / 21 + 0.02:.4f} ({elapsed:.1f}s < 600s)")


def test_criterion_7_genus_reproduction():
    quintic = plane_curve_genus(PlaneCurve(
        AffinePolynomial(2, {(5, 0): 1.0, (0, 5): 1.0, (0, 0): 1.0})
    ))
    nodal = plane_curve_genus(PlaneCurve(
        AffinePolynomial(2, {(0, 2): 1.0, (3, 0): -1.0, (2, 0): -1.0})
    ))
    # d = 5, eps1 = 1, eps2 = 2; the hypothesis (+-i)^5 + (+-2i)^5 != 0 holds
    for s1 in (1j, -1j):
        for s2 in (2j, -2j):
            assert s1**5 + s2**5 != 0
    inst = plane_curve_genus(PlaneCurve(
        AffinePolynomial(2, {(5, 0): 1.0, (3, 0): 1.0, (0, 5): 1.0, (0, 3): 4.0})
    ))
    ok = quintic.verdict == "ok" and quintic.genus == 6 and quintic.smooth
    ok = ok and nodal.verdict == "ok" and nodal.genus == 0
    ok = ok and inst.verdict == "ok" and inst.genus is not None and inst.genus >= 2
    ok = ok and len(inst.singularities) == 1
    s = inst.singularities[0]
    ok = ok and s.multiplicity == 3 and s.ordinary and not s.at_infinity
    _report(7, ok, f"quintic g=6, nodal cubic g=0, low-degree instance "
                   f"g={inst.genus} >= 2 with its singularity list")


def test_criterion_8_finite_field_oracle():
    t0 = time.time()
    ok = True
    checked = 0
    for m in range(2, 5):
        for a in range(1, m):
            for c in range(a, m):
                for b in range(1, c + 1):
                    if c > a + b:
                        continue
                    n2 = gamma_count(m, a, b, c, 2)
                    n3 = gamma_count(m, a, b, c, 3)
                    fitted = fit_count_dimension(n2, n3)
                    expected = a * (m - a) - grassmann_gamma_codim(m, a, b, c)
                    ok = ok and fitted == expected
                    checked += 1
    elapsed = time.time() - t0
    ok = ok and elapsed < 60.0 and checked >= 10
    _report(8, ok, f"codimension formula matches the subspace enumeration on "
                   f"all {checked} valid tuples with m <= 4 ({elapsed:.2f}s < 60s)")


def test_criterion_9_moduli_algebra():
    ok = True
    for n in (2, 3, 4):
        for m in (3 * n - 2, 3 * n - 1, 3 * n + 1):
            gaps = set()
            oks = set()
            for r in range(n, m + 1):
                alpha, beta, good = theorem_b_moduli_check(n, m, r, 0, n)
                gaps.add(alpha - beta)
                oks.add(good)
            ok = ok and gaps == {m - 3 * n + 2}
            ok = ok and oks == {m >= 3 * n - 1}
    # tightness: exactly zero gap one step below the hypothesis
    alpha, beta, good = theorem_b_moduli_check(3, 7, 3, 0, 3)
    ok = ok and alpha - beta == 0 and not good
    _report(9, ok, "alpha - beta = m - 3n + 2 across r sweeps; "
                   "threshold tight at m = 3n - 2")


def test_criterion_10_surface_pipeline():
    # (a) degree 5: seeded search passes the exact certificate chain
    a5, cert5 = search_theorem_a_coefficients(5, seed=42, mode="exact")
    fam = theorem_a_component_family(5, *a5)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gp = check_general_position(fam, 3)
    ok = cert5.verdict == "smooth" and gp and all(v != 0 for v in a5)

    # (b) degree 19: probabilistic certificate over 200 starts
    P19 = build_theorem_a_surface(19, *a5)
    cert19 = smoothness_check(P19, mode="probabilistic", seed=42, starts=200)
    ok = ok and cert19.detail["min_grad_norm"] > 1e-6
    ok = ok and cert19.verdict.startswith("no singularity")

    # (c) witness curve: the component sum collapses to e^(d z), globally
    # nonvanishing by canonical form
    d = 19
    eps = np.exp(1j * np.pi / d)
    z2 = ExpPolySum.poly([0, 0, 1.0])
    f = ProjectiveCurve(
        (ExpPolySum.zero(), e_z(), z2, z2.scale(eps)), 10.0, validate=False
    )
    ones4 = HomogeneousPolynomial(4, 0, {(0, 0, 0, 0): 1.0 + 0j})
    Q0 = HomogeneousPolynomial(
        4, 2, {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): 0.49, (0, 0, 2, 0): 1.69}
    )
    pi = build_pi_map([Q0, ones4, ones4, ones4], [2, 0, 0, 0], d)
    g = pushforward(pi, f)
    total = ExpPolySum.zero()
    for comp in g.components:
        total = total + comp
    p, q = total.terms[0] if total.terms else (np.zeros(0), np.zeros(0))
    sum_is_exp_dz = (
        len(total.terms) == 1
        and np.allclose(p, [1.0])
        and np.allclose(q, [0, d])
        and total.never_vanishes
    )
    rep = verify_borel_conclusions(
        list(g.components), borel_partition(list(g.components)), "logarithmic"
    )
    ok = ok and sum_is_exp_dz and rep.all_pass and rep.hypothesis == "certified_global"
    _report(10, ok, f"degree-5 exact chain (seed 42 -> a = {a5}), degree-19 "
                    f"probabilistic min |grad| = {cert19.detail['min_grad_norm']:.2e} "
                    f"> 1e-6, witness sum collapses to a global unit")
