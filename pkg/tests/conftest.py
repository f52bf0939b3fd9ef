import numpy as np
import pytest

from nevanlab.curves import ExpPolySum, ProjectiveCurve
from nevanlab.polynomials import HomogeneousPolynomial, linear_form


@pytest.fixture(scope="session")
def f_line():
    """[1 : z] with room for r = 100."""
    return ProjectiveCurve((ExpPolySum.const(1.0), ExpPolySum.poly([0, 1.0])), 120.0)


@pytest.fixture(scope="session")
def f_exp():
    """[1 : e^z]."""
    return ProjectiveCurve(
        (ExpPolySum.const(1.0), ExpPolySum.exp_term([1.0], [0, 1.0])), 30.0
    )


@pytest.fixture(scope="session")
def f_mixed():
    """[1 : z : e^z], the workhorse nondegenerate curve."""
    return ProjectiveCurve(
        (
            ExpPolySum.const(1.0),
            ExpPolySum.poly([0, 1.0]),
            ExpPolySum.exp_term([1.0], [0, 1.0]),
        ),
        25.0,
    )


@pytest.fixture(scope="session")
def f_rational():
    """[1 : z : z^2], rational so the slack drops to a constant."""
    return ProjectiveCurve(
        (
            ExpPolySum.const(1.0),
            ExpPolySum.poly([0, 1.0]),
            ExpPolySum.poly([0, 0, 1.0]),
        ),
        60.0,
    )


@pytest.fixture(scope="session")
def hyper_sum3():
    """z0 + z1 + z2."""
    return linear_form([1.0, 1.0, 1.0])


def random_homogeneous(rng: np.random.Generator, num_vars: int, degree: int,
                       terms: int = 6) -> HomogeneousPolynomial:
    """Random form with small integer-ish complex coefficients."""
    out = {}
    for _ in range(terms):
        cuts = sorted(rng.integers(0, degree + 1, num_vars - 1).tolist())
        exp = []
        prev = 0
        for c in cuts + [degree]:
            exp.append(c - prev)
            prev = c
        coeff = complex(int(rng.integers(-5, 6)), int(rng.integers(-5, 6)))
        if coeff != 0:
            out[tuple(exp)] = out.get(tuple(exp), 0j) + coeff
    if not out:
        out[(degree,) + (0,) * (num_vars - 1)] = 1.0 + 0j
    return HomogeneousPolynomial(num_vars, degree, out)
