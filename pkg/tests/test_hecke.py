from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plusforms.errors import BadPrime
from plusforms.hecke import (
    HeckeDescriptor,
    apply_T_ell2,
    apply_T_ell2n,
    apply_T_t2,
    plus_space_T4,
    pointwise_T_t2,
)
from plusforms.reduced import FormCache
from plusforms.series import LaurentSeries
from plusforms.space import SpaceParams, check_epsilon

from .strategies import small_rationals

spaces = st.sampled_from([(1, 3), (1, 5), (7, 1), (3, 3), (5, -1), (15, 1)])


@st.composite
def plus_series(draw, prec=900):
    N, k = draw(spaces)
    p = SpaceParams.plus(N, k)
    exps = draw(st.lists(st.integers(-6, prec - 1).filter(p.supports), min_size=1, max_size=8, unique=True))
    return p, LaurentSeries({e: draw(small_rationals) for e in exps}, prec)


def primes_for(p, count=2):
    return [ell for ell in (3, 5, 7, 11) if p.level % ell][:count]


@given(plus_series())
def test_hecke_preserves_support(data):
    p, f = data
    for ell in primes_for(p):
        assert check_epsilon(apply_T_ell2(f, ell, p), p).passed


@given(plus_series())
def test_hecke_operators_commute(data):
    p, f = data
    a, b = primes_for(p)
    ab = apply_T_ell2(apply_T_ell2(f, a, p), b, p)
    ba = apply_T_ell2(apply_T_ell2(f, b, p), a, p)
    assert ab.agrees_with(ba)
    assert ab.agrees_with(apply_T_t2(f, a * b, p))


@given(plus_series(), st.integers(2, 3))
def test_recursion_matches_composition(data, n):
    p, f = data
    ell = primes_for(p, 1)[0]
    corr = Fraction(ell) ** (p.k - 2)
    twice = apply_T_ell2(apply_T_ell2(f, ell, p), ell, p)
    assert apply_T_ell2n(f, ell, 2, p).agrees_with(twice - f.scale(corr))
    if n == 3:
        three = apply_T_ell2(apply_T_ell2n(f, ell, 2, p), ell, p) - apply_T_ell2(f, ell, p).scale(corr)
        assert apply_T_ell2n(f, ell, 3, p).agrees_with(three)
    assert apply_T_t2(f, ell**n, p).agrees_with(apply_T_ell2n(f, ell, n, p))


@given(plus_series(prec=500))
def test_pointwise_matches_series(data):
    p, f = data
    t = 1
    for ell in primes_for(p):
        t *= ell
    image = apply_T_t2(f, t, p)
    coeff = pointwise_T_t2(f.coefficient, t, p)
    assert all(coeff(n) == image.coefficient(n) for n in range(-3, image.precision))


def test_output_precision_shrinks_by_ell_squared():
    p = SpaceParams.plus(1, 3)
    f = LaurentSeries({-1: 1}, 100)
    assert apply_T_ell2(f, 3, p).precision == 12  # ceil(100 / 9)


def test_bad_primes_rejected():
    p = SpaceParams.plus(7, 1)
    f = LaurentSeries({0: 1}, 10)
    with pytest.raises(BadPrime):
        apply_T_ell2(f, 7, p)
    with pytest.raises(BadPrime):
        apply_T_ell2(f, 9, p)
    with pytest.raises(BadPrime):
        apply_T_t2(f, 14, p)
    assert HeckeDescriptor.from_t(45).factorization == ((3, 2), (5, 1))


def test_hecke_image_of_reduced_form_is_in_the_space():
    # for k = 3, N = 1 the cusp space vanishes, so the image is fixed by its principal part
    p = SpaceParams.plus(1, 3)
    cache = FormCache(p)
    for ell in (3, 5):
        f = cache.form(-1, 25 * ell * ell).series
        image = apply_T_ell2(f.truncate(25 * ell * ell), ell, p)
        expected = cache.form(-ell * ell, 25).series.scale(ell) + f
        assert image.agrees_with(expected)
        assert image.precision == 25


def test_operator_at_two_relates_first_reduced_forms():
    p = SpaceParams.plus(1, 3)
    cache = FormCache(p)
    f1 = cache.form(-1, 400).series.truncate(400)
    f4 = cache.form(-4, 100).series
    assert ((plus_space_T4(f1, p) - f1).scale(Fraction(1, 2))).agrees_with(f4)
