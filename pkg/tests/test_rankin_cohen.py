from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from plusforms.classical import delta, eisenstein, theta
from plusforms.rankin_cohen import generalized_binomial, rc_bracket
from plusforms.series import dilate, theta_derivative
from plusforms.space import SpaceParams, check_epsilon

from .strategies import series

weights = st.sampled_from([Fraction(1, 2), Fraction(3, 2), 4, 6, Fraction(-5, 2), 12])


@given(series(), weights, series(), weights, st.integers(0, 4))
def test_bracket_antisymmetry(f, wf, g, wg, n):
    assert rc_bracket(f, wf, g, wg, n) == rc_bracket(g, wg, f, wf, n).scale((-1) ** n)


@given(series(), weights, series(), weights)
def test_first_bracket_formula(f, wf, g, wg):
    D = theta_derivative
    expected = (f * D(g)).scale(wf) - (D(f) * g).scale(wg)
    assert rc_bracket(f, wf, g, wg, 1) == expected


def test_zeroth_bracket_is_product():
    f, g = eisenstein(4, 30), eisenstein(6, 30)
    assert rc_bracket(f, 4, g, 6, 0) == f * g


def test_bracket_of_eisenstein_series_is_a_cusp_form():
    prec = 60
    b = rc_bracket(eisenstein(4, prec), 4, eisenstein(6, prec), 6, 1)
    assert b == delta(prec).scale(-3456)


def test_bracket_preserves_plus_support():
    prec = 120
    for N in (1, 7):
        params = SpaceParams.plus(N, 1)
        e = dilate(eisenstein(4, prec // (4 * N) + 1), 4 * N).truncate(prec)
        for n in range(4):
            b = rc_bracket(theta(prec), Fraction(1, 2), e, 4, n)
            # theta is in the plus space, E_4(4N tau) has support in 4N Z
            assert check_epsilon(b, SpaceParams.plus(N, 1 + 8 + 4 * n)).passed
            assert check_epsilon(theta(prec), params).passed


def test_generalized_binomial():
    assert generalized_binomial(5, 2) == 10
    assert generalized_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert generalized_binomial(3, -1) == 0
