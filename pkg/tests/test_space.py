from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plusforms.errors import InsufficientPrecision, NotWeaklyHolomorphicHypothesis
from plusforms.series import LaurentSeries
from plusforms.space import (
    SpaceParams,
    certify_integrality,
    epsilon_support,
    index_gamma0,
    is_squarefree,
    kronecker,
    plus_support,
    s_of_m,
    sturm_data_for_order,
    thm12_checklist,
)

levels = st.sampled_from([1, 3, 5, 7, 15, 21, 35])
ks = st.sampled_from([-5, -3, -1, 1, 3, 5, 7, 9])


@given(levels, ks, st.integers(-500, 500))
def test_sign_vector_support_agrees_with_square_classes(N, k, n):
    p = SpaceParams.plus(N, k)
    assert epsilon_support(n, p) == plus_support(n, p)


@given(levels, ks)
def test_dual_of_plus_space_is_plus_space(N, k):
    p = SpaceParams.plus(N, k)
    d = p.dual()
    assert d == SpaceParams.plus(N, 4 - k)
    assert d.dual() == p


@given(st.integers(-300, 300), st.sampled_from([3, 5, 7, 11, 13]))
def test_kronecker_matches_euler_criterion(a, p):
    r = a % p
    expected = 0 if r == 0 else (1 if pow(r, (p - 1) // 2, p) == 1 else -1)
    assert kronecker(a, p) == expected


def test_parameter_validation():
    for N, k in [(2, 3), (9, 3), (0, 1), (7, 2)]:
        with pytest.raises(ValueError):
            SpaceParams.plus(N, k)
    assert is_squarefree(105) and not is_squarefree(45)


def test_scaling_constant():
    p = SpaceParams.plus(7, 1)
    assert s_of_m(0, p) == 2
    assert s_of_m(-7, p) == 2 and s_of_m(-28, p) == 2
    assert s_of_m(-3, p) == 1
    q = SpaceParams.plus(15, 1)
    assert s_of_m(-15, q) == 4 and s_of_m(-3 * 4, q) == 2


def test_index_gamma0():
    assert [index_gamma0(M) for M in (1, 4, 12, 28, 60)] == [1, 6, 24, 48, 144]


def test_checklist_for_level_seven_is_the_eight_displayed_forms():
    p = SpaceParams.plus(7, 1)
    assert thm12_checklist(-1, p) == [0, -3, -7, -12, -19, -20, -24, -27]


def test_checklist_restricted_to_existing_forms():
    p = SpaceParams.plus(1, 3)
    assert thm12_checklist(0, p) == [0, -1, -4]
    assert thm12_checklist(0, p, existing=[-1, -4, -5]) == [-1, -4]


def test_sturm_bound_formula():
    p = SpaceParams.plus(7, 1)
    data = sturm_data_for_order(-27, p)
    # k' = ceil(27 / 28) = 1 and the bound is -27 + (1 + 12)/12 * 48
    assert data.k_prime == 1 and data.bound == -27 + 52


def test_integrality_certificate_detects_denominators():
    p = SpaceParams.plus(1, 3)
    good = LaurentSeries({-1: 1, 0: -2, 3: 248}, 20)
    bad = LaurentSeries({-1: 1, 3: Fraction(1, 3)}, 20)
    assert certify_integrality(good, p).passed
    rep = certify_integrality(bad, p)
    assert not rep.passed and rep.witnesses == [(3, Fraction(1, 3))]
    with pytest.raises(InsufficientPrecision):
        certify_integrality(LaurentSeries({-1: 1}, 3), p)


def test_holomorphic_route_and_negative_weight():
    p = SpaceParams.plus(1, 3)
    rep = certify_integrality(LaurentSeries({0: 1, 1: 2}, 10), p)
    assert rep.details["route"] == "holomorphic"
    with pytest.raises(NotWeaklyHolomorphicHypothesis):
        certify_integrality(LaurentSeries({0: 1}, 10), SpaceParams.plus(1, -1))
