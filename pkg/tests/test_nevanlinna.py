import math

import numpy as np
import pytest

from nevanlab.curves import ExpPolySum, ProjectiveCurve
from nevanlab.nevanlinna import (
    ImageInDivisor,
    NevanlinnaProfile,
    compose_with_curve,
    counting_function,
    defect,
    fmt_residual,
    nevanlinna_profile,
    order_function,
    proximity,
    truncated_counting,
    zeros_in_disk,
)
from nevanlab.polynomials import linear_form
from nevanlab.zerofind import DivisorOnC


class TestTruncatedCounting:
    def test_origin_untruncated(self):
        E = DivisorOnC(((0j, 3),))
        assert truncated_counting(E, math.e, math.inf) == pytest.approx(3.0)

    def test_origin_level_one(self):
        E = DivisorOnC(((0j, 3),))
        assert truncated_counting(E, math.e, 1) == pytest.approx(1.0)

    def test_outside_unit_disk(self):
        E = DivisorOnC(((2.0 + 0j, 1),))
        assert truncated_counting(E, 4.0, 5) == pytest.approx(math.log(2))

    def test_points_beyond_radius_ignored(self):
        E = DivisorOnC(((2.0 + 0j, 1), (10.0 + 0j, 4)))
        assert truncated_counting(E, 4.0, math.inf) == pytest.approx(math.log(2))

    def test_requires_r_above_one(self):
        with pytest.raises(ValueError):
            truncated_counting(DivisorOnC(()), 1.0)

    def test_truncation_ordering(self):
        E = DivisorOnC(((0j, 4), (1.5 + 0j, 2), (0.5j, 1)))
        values = [truncated_counting(E, 6.0, m) for m in (1, 2, 3, math.inf)]
        assert values == sorted(values)


class TestCountingFunction:
    def test_line_against_coordinate(self, f_line):
        D = linear_form([0.0, 1.0])
        assert counting_function(f_line, D, 10.0) == pytest.approx(math.log(10))

    def test_exponential_never_hits(self, f_exp):
        D = linear_form([0.0, 1.0])
        assert counting_function(f_exp, D, 20.0) == 0.0

    def test_image_inside_divisor(self, f_line):
        ez = ExpPolySum.exp_term([1.0], [0, 1.0])
        f = ProjectiveCurve((ez, ez.scale(-1.0)), 10.0)
        with pytest.raises(ImageInDivisor):
            counting_function(f, linear_form([1.0, 1.0]), 5.0)

    def test_against_dense_scan_oracle(self, f_mixed, hyper_sum3):
        # independent oracle: coarse grid + Newton polish for 1 + z + e^z
        u = compose_with_curve(hyper_sum3, f_mixed)
        r = 5.0
        xs = np.linspace(-r, r, 61)
        seeds = (xs[None, :] + 1j * xs[:, None]).ravel()
        roots = []
        for z in seeds:
            for _ in range(50):
                v = 1 + z + np.exp(z)
                dv = 1 + np.exp(z)
                if abs(dv) < 1e-12:
                    break
                step = v / dv
                z = z - step
                if abs(step) < 1e-13:
                    break
            if abs(1 + z + np.exp(z)) < 1e-10 and abs(z) < r:
                if not any(abs(z - w) < 1e-6 for w in roots):
                    roots.append(z)
        expected = sorted(roots, key=lambda t: (t.real, t.imag))
        got = zeros_in_disk(u, r)
        assert len(got.points) == len(expected) == 3
        for z, m in got.points:
            assert m == 1 and min(abs(z - w) for w in expected) < 1e-8
        n_oracle = sum(
            math.log(r / abs(w)) if abs(w) > 1 else math.log(r) for w in expected
        )
        assert counting_function(f_mixed, hyper_sum3, r) == pytest.approx(
            n_oracle, abs=1e-9
        )


class TestProximity:
    def test_pole_at_infinity_direction(self, f_line):
        D = linear_form([1.0, 0.0])
        assert proximity(f_line, D, 10.0) == pytest.approx(math.log(10), abs=1e-6)

    def test_zero_direction(self, f_line):
        D = linear_form([0.0, 1.0])
        assert proximity(f_line, D, 10.0) == pytest.approx(0.0, abs=1e-6)

    def test_fmt_closure(self, f_line):
        # m + N - d T must vanish for [1:z] against z0 + z1
        D = linear_form([1.0, 1.0])
        r = 10.0
        m = proximity(f_line, D, r)
        n = counting_function(f_line, D, r)
        t = order_function(f_line, r)
        assert m + n - t == pytest.approx(0.0, abs=1e-4)


class TestOrderFunction:
    @pytest.mark.parametrize("r", [2.0, 5.0, 10.0, 50.0, 100.0])
    def test_line_is_log_r(self, f_line, r):
        assert order_function(f_line, r) == pytest.approx(math.log(r), abs=1e-6)

    @pytest.mark.parametrize("r", [2.0, 5.0, 10.0])
    def test_exponential_is_r_over_pi(self, f_exp, r):
        assert order_function(f_exp, r) == pytest.approx(r / math.pi, abs=1e-5)

    def test_constant_curve(self):
        f = ProjectiveCurve((ExpPolySum.const(1.0), ExpPolySum.const(1.0)), 50.0)
        for r in (2.0, 7.0, 30.0):
            assert order_function(f, r) == pytest.approx(0.0, abs=1e-12)

    def test_constant_in_r_for_any_constant_curve(self):
        f = ProjectiveCurve((ExpPolySum.const(3.0), ExpPolySum.const(4j)), 50.0)
        vals = [order_function(f, r) for r in (2.0, 11.0, 40.0)]
        assert max(vals) - min(vals) < 1e-12

    def test_monotone(self, f_mixed):
        grid = np.geomspace(2, 20, 12)
        T = [order_function(f_mixed, float(r)) for r in grid]
        assert all(b - a > -1e-9 for a, b in zip(T, T[1:]))

    def test_radius_contract(self, f_exp):
        with pytest.raises(ValueError):
            order_function(f_exp, 1.0)
        with pytest.raises(ValueError):
            order_function(f_exp, 100.0)


class TestFmtResidual:
    def test_line_coordinate_exactly_zero(self, f_line):
        res = fmt_residual(f_line, linear_form([0.0, 1.0]), [2, 5, 10])
        assert max(abs(v) for v in res) < 1e-5

    def test_exponential_coordinate_exactly_zero(self, f_exp):
        res = fmt_residual(f_exp, linear_form([0.0, 1.0]), [2, 5, 10])
        assert max(abs(v) for v in res) < 1e-5

    def test_mixed_curve_residual_constant(self, f_mixed, hyper_sum3):
        grid = list(np.geomspace(2, 20, 7))
        res = fmt_residual(f_mixed, hyper_sum3, grid)
        t20 = order_function(f_mixed, 20.0)
        assert max(res) - min(res) <= 0.05 * 1 * t20
        # Jensen: the constant equals -log|u(0)| = -log 2 here
        assert res[0] == pytest.approx(-math.log(2), abs=1e-4)


class TestDefect:
    def test_line_no_defect(self, f_line):
        assert defect(f_line, linear_form([0.0, 1.0]), math.inf, [2, 5, 10, 12]) == (
            pytest.approx(0.0, abs=1e-9)
        )

    def test_exponential_full_defect(self, f_exp):
        assert defect(f_exp, linear_form([1.0, 0.0]), math.inf, [2, 5, 10, 12]) == 1.0

    def test_needs_wide_grid(self, f_line):
        with pytest.raises(ValueError):
            defect(f_line, linear_form([0.0, 1.0]), math.inf, [2, 5])


class TestInvariants:
    def test_counting_monotone_and_fmt_bound(self, f_mixed, hyper_sum3):
        grid = list(np.geomspace(2, 15, 8))
        u = compose_with_curve(hyper_sum3, f_mixed)
        E = zeros_in_disk(u, 15.1)
        N = [truncated_counting(E, r, math.inf) for r in grid]
        assert all(b - a > -1e-9 for a, b in zip(N, N[1:]))
        # The counting function stays below the order function: with
        # residual(r) = m + N - dT constant and m >= -log C (the structural
        # proximity floor, C = binom(d+n, n)), N - dT <= residual(2) + log C
        # pointwise, with the grid slack on top.
        T = [order_function(f_mixed, r) for r in grid]
        res2 = fmt_residual(f_mixed, hyper_sum3, [2.0])[0]
        d = hyper_sum3.degree
        log_c = math.log(math.comb(d + f_mixed.dim, f_mixed.dim))
        for n_r, t_r in zip(N, T):
            assert n_r - d * t_r <= res2 + log_c + 0.05 * d * t_r + 1e-6

    def test_truncation_ordering_pointwise(self, f_mixed, hyper_sum3):
        u = compose_with_curve(hyper_sum3, f_mixed)
        E = zeros_in_disk(u, 12.0)
        for r in (3.0, 8.0, 11.5):
            n1 = truncated_counting(E, r, 1)
            n2 = truncated_counting(E, r, 2)
            ninf = truncated_counting(E, r, math.inf)
            assert n1 <= n2 + 1e-12 <= ninf + 2e-12


class TestProfile:
    def test_round_trip(self, f_mixed, hyper_sum3):
        grid = list(np.geomspace(2, 10, 5))
        prof = nevanlinna_profile(f_mixed, hyper_sum3, 2, grid)
        again = NevanlinnaProfile.from_json(prof.to_json())
        for a, b in zip(prof.T, again.T):
            assert abs(a - b) < 1e-9
        for a, b in zip(prof.N_trunc, again.N_trunc):
            assert abs(a - b) < 1e-9
        assert again.level == 2

    def test_csv_header(self, f_mixed, hyper_sum3):
        prof = nevanlinna_profile(f_mixed, hyper_sum3, math.inf, [2.0, 4.0])
        lines = prof.to_csv().strip().splitlines()
        assert lines[0] == "r,T,N_trunc,prox,residual"
        assert len(lines) == 3

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            NevanlinnaProfile(
                r_grid=[2.0, 1.5], T=[0, 0], N_trunc=[0, 0], level=1,
                prox=[0, 0], residual=[0, 0],
            )
