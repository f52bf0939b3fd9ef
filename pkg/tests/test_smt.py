import numpy as np
import pytest

from nevanlab.curves import ExpPolySum, ProjectiveCurve
from nevanlab.geometry import build_fermat_waring
from nevanlab.nevanlinna import order_function
from nevanlab.polynomials import HomogeneousPolynomial, linear_form
from nevanlab.smt import (
    SmtError,
    SmtReport,
    emit_report,
    run_cartan_check,
    run_fmt_check,
    run_prop21_check,
    run_theorem_b_check,
)


def ones_q(n):
    return HomogeneousPolynomial(n + 1, 0, {(0,) * (n + 1): 1.0 + 0j})


@pytest.fixture(scope="module")
def lines_cp2():
    return [
        linear_form([1, 0, 0]),
        linear_form([0, 1, 0]),
        linear_form([0, 0, 1]),
        linear_form([1, 2, 3]),
    ]


class TestCartan:
    def test_small_run_passes(self, f_mixed, lines_cp2):
        rep = run_cartan_check(f_mixed, lines_cp2, np.geomspace(2, 10, 6))
        assert rep.verdict == "pass"
        assert rep.pass_fraction >= 0.9
        assert rep.slack_params["t_coeff"] == 20.0

    def test_constant_curve_degenerate(self, lines_cp2):
        one = ExpPolySum.const(1.0)
        f = ProjectiveCurve((one, one.scale(2.0), one.scale(3.0)), 25.0)
        rep = run_cartan_check(f, lines_cp2, [2, 5, 10])
        assert rep.verdict == "degenerate"

    def test_linearly_degenerate_curve(self, lines_cp2):
        zc = ExpPolySum.poly([0, 1.0])
        f = ProjectiveCurve((ExpPolySum.const(1.0), zc, zc.scale(2.0)), 25.0)
        rep = run_cartan_check(f, lines_cp2, [2, 5, 10])
        assert rep.verdict == "degenerate"

    def test_dimension_one_specialization(self, f_exp):
        # q = 3 points on the line: lhs coefficient is 1, the only zeros come
        # from 1 - e^z, and the constant slack term covers small radii
        lines = [linear_form([1, 0]), linear_form([0, 1]), linear_form([1, -1])]
        rep = run_cartan_check(f_exp, lines, np.geomspace(2, 12, 8))
        assert rep.verdict == "pass"

    def test_too_few_hyperplanes(self, f_mixed):
        with pytest.raises(SmtError):
            run_cartan_check(f_mixed, [linear_form([1, 0, 0])] * 3, [2, 5])

    def test_not_general_position(self, f_mixed):
        bad = [
            linear_form([1, 0, 0]),
            linear_form([0, 1, 0]),
            linear_form([1, 1, 0]),
            linear_form([0, 0, 1]),
        ]
        with pytest.raises(SmtError):
            run_cartan_check(f_mixed, bad, [2, 5])

    def test_curve_inside_hyperplane_is_degenerate(self):
        # an image inside a hyperplane forces linear degeneracy, so the
        # hypothesis check fires before any pullback could vanish
        ez = ExpPolySum.exp_term([1.0], [0, 1.0])
        f = ProjectiveCurve((ExpPolySum.const(1.0), ez, ez.scale(-1.0)), 10.0)
        family = [
            linear_form([0, 1, 1]),   # vanishes on the curve's image
            linear_form([1, 0, 0]),
            linear_form([1, 1, 0]),
            linear_form([1, 0, 1]),
        ]
        rep = run_cartan_check(f, family, [2, 5])
        assert rep.verdict == "degenerate"


class TestProp21:
    def test_power_sum_case(self, f_mixed):
        rep = run_prop21_check(f_mixed, [ones_q(2)] * 3, [0, 0, 0], 8,
                               np.geomspace(2, 15, 8))
        assert rep.verdict == "pass"
        assert not rep.vacuous
        assert rep.detail["lhs_coefficient"] == 8 - 6

    def test_threshold_degree_vacuous(self, f_mixed):
        rep = run_prop21_check(f_mixed, [ones_q(2)] * 3, [0, 0, 0], 6,
                               np.geomspace(2, 6, 4))
        assert rep.vacuous and rep.verdict == "pass"
        assert rep.detail["lhs_coefficient"] == 0

    def test_degenerate_pushforward(self):
        zc = ExpPolySum.poly([0, 1.0])
        f = ProjectiveCurve((ExpPolySum.const(1.0), zc, zc), 20.0)
        rep = run_prop21_check(f, [ones_q(2)] * 3, [0, 0, 0], 8, [2, 5])
        assert rep.verdict == "degenerate"


class TestTheoremB:
    def test_rational_curve_constant_slack(self, f_rational):
        fw = build_fermat_waring(2, 5, 21, seed=1)
        rep = run_theorem_b_check(fw, f_rational, np.geomspace(2, 40, 8))
        assert rep.verdict == "pass"
        assert rep.slack_params["rational"] is True
        assert all(s == 5.0 for s in rep.slack_values)

    def test_vacuous_when_degree_at_bound(self, f_mixed):
        fw = build_fermat_waring(2, 5, 20, seed=2, mode="explore")
        rep = run_theorem_b_check(fw, f_mixed, np.geomspace(2, 6, 4))
        assert rep.vacuous and rep.verdict == "pass"

    def test_constant_curve_degenerate(self):
        one = ExpPolySum.const(1.0)
        f = ProjectiveCurve((one, one.scale(2.0), one.scale(1j)), 12.0)
        fw = build_fermat_waring(2, 5, 21, seed=1)
        rep = run_theorem_b_check(fw, f, [2, 5, 10])
        assert rep.verdict == "degenerate"

    def test_defect_fields_present(self, f_rational):
        fw = build_fermat_waring(2, 5, 21, seed=1)
        rep = run_theorem_b_check(fw, f_rational, np.geomspace(2, 40, 8))
        assert rep.detail["defect_bound"] == pytest.approx(20 / 21)
        assert 0.0 <= rep.detail["defect_surrogate"] <= 1.0


class TestFmtCheck:
    def test_line_fixture(self, f_line):
        rep = run_fmt_check(f_line, linear_form([0.0, 1.0]), [2, 5, 10, 20])
        assert rep.verdict == "pass"
        assert rep.detail["residual_spread"] < 1e-5


class TestScalingConsistency:
    def test_unit_factor_is_projectively_invisible(self, f_mixed):
        # multiplying every component by a nowhere-zero factor leaves the
        # projective map, hence T, N and m, unchanged up to quadrature noise
        from nevanlab.nevanlinna import counting_function, proximity

        g = f_mixed.scale_components(ExpPolySum.exp_term([1.0], [0, 1.0]))
        D = linear_form([1.0, 1.0, 1.0])
        for r in (2.0, 5.0, 10.0):
            assert order_function(g, r) == pytest.approx(
                order_function(f_mixed, r), abs=1e-5
            )
            assert counting_function(g, D, r) == pytest.approx(
                counting_function(f_mixed, D, r), abs=1e-9
            )
            assert proximity(g, D, r) == pytest.approx(
                proximity(f_mixed, D, r), abs=1e-5
            )


class TestJobs:
    def test_worker_count_does_not_change_results(self, f_mixed, lines_cp2):
        grid = np.geomspace(2, 10, 6)
        serial = run_cartan_check(f_mixed, lines_cp2, grid, jobs=1)
        threaded = run_cartan_check(f_mixed, lines_cp2, grid, jobs=4)
        assert serial.to_json() == threaded.to_json()


class TestEmitReport:
    def _report(self, f_rational):
        fw = build_fermat_waring(2, 5, 21, seed=1)
        return run_theorem_b_check(fw, f_rational, np.geomspace(2, 30, 6))

    def test_files_and_round_trip(self, f_rational, tmp_path):
        rep = self._report(f_rational)
        paths = emit_report(rep, tmp_path / "run")
        csv_lines = paths["csv"].read_text().strip().splitlines()
        assert csv_lines[0] == "r,lhs,rhs,slack,margin"
        assert len(csv_lines) == 1 + len(rep.profile.r_grid)
        again = SmtReport.from_json(paths["json"].read_text())
        assert again.pass_fraction == rep.pass_fraction  # bit-for-bit
        assert again.verdict == rep.verdict

    def test_margin_recomputation(self, f_rational, tmp_path):
        rep = self._report(f_rational)
        paths = emit_report(rep, tmp_path / "m")
        for line in paths["csv"].read_text().strip().splitlines()[1:]:
            _, lhs, rhs, slack, margin = (float(v) for v in line.split(","))
            assert abs(margin - (rhs + slack - lhs)) < 1e-12

    def test_deterministic_bytes(self, f_rational, tmp_path):
        rep1 = self._report(f_rational)
        rep2 = self._report(f_rational)
        p1 = emit_report(rep1, tmp_path / "a")
        p2 = emit_report(rep2, tmp_path / "b")
        assert p1["csv"].read_bytes() == p2["csv"].read_bytes()
        assert p1["json"].read_bytes() == p2["json"].read_bytes()

    def test_margin_file_two_columns(self, f_rational, tmp_path):
        rep = self._report(f_rational)
        paths = emit_report(rep, tmp_path / "g")
        for line in paths["margin"].read_text().strip().splitlines():
            assert len(line.split()) == 2
