from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plusforms.errors import NonexistentForm, UnsupportedExponent
from plusforms.reduced import (
    FormCache,
    build_basis,
    certify_basis_integrality,
    compute_m_epsilon,
    echelon_reduce,
    level_seven_bracket_pool,
    m_epsilon_direct,
    m_epsilon_from_basis,
    spanning_pool,
)
from plusforms.series import linear_combination
from plusforms.space import SpaceParams, check_epsilon
from plusforms.traces import reduced_forms, singular_moduli_trace, weight_three_halves_level_four_coefficient

P7 = SpaceParams.plus(7, 1)
P13 = SpaceParams.plus(1, 3)


def coeffs(f, upto):
    return [f.coefficient(n) for n in range(f.valuation(), upto + 1)]


def test_weight_three_halves_level_four_forms():
    b = build_basis(P13, -8, 20)
    assert coeffs(b.forms[-1].series, 8) == [1, -2, 0, 0, 248, -492, 0, 0, 4119, -7256]
    f4 = b.forms[-4].series
    assert [f4.coefficient(n) for n in (0, 3, 4, 7)] == [-2, -26752, -143376, -8288256]
    assert b.existence_gaps == frozenset({0})


def test_trace_oracle_matches_dense_expansion():
    f = FormCache(P13).form(-1, 1500).series
    for d in range(1, 1500):
        assert weight_three_halves_level_four_coefficient(d) == f.coefficient(d), d


def test_class_numbers_and_small_traces():
    assert len(reduced_forms(23)) == 3 and len(reduced_forms(47)) == 5
    assert len(reduced_forms(3)) == 1 and reduced_forms(2) == []
    # J at the cube root of unity is -744, counted with weight 1/3
    assert singular_moduli_trace(3) == -248
    assert singular_moduli_trace(4) == 492


@pytest.mark.parametrize("k_big, k_small", [(3, 1), (5, -1)])
def test_duality_between_weights_at_level_four(k_big, k_small):
    big = build_basis(SpaceParams.plus(1, k_big), -24, 30)
    small = build_basis(SpaceParams.plus(1, k_small), -24, 30)
    for D, g in big.forms.items():
        for d, f in small.forms.items():
            if -D < 25 and -d < 25:
                assert g.series.coefficient(-d) == -f.series.coefficient(-D), (D, d)


def test_periodicity_of_pivots():
    b = build_basis(P7, -84, 40)
    assert all(m - 28 in b.forms for m in b.forms if m - 28 >= -84)


@settings(max_examples=15)
@given(st.randoms(use_true_random=False))
def test_echelon_is_independent_of_pool_order_and_mixing(rnd):
    prec = 60
    pool = spanning_pool(P7, -28, prec)
    reference = echelon_reduce(pool, P7, prec, -28)
    mixed = list(pool)
    rnd.shuffle(mixed)
    for _ in range(4):
        picks = rnd.sample(range(len(pool)), 3)
        mixed.append(linear_combination((Fraction(rnd.randint(-9, 9), rnd.randint(1, 5)), pool[i]) for i in picks))
    again = echelon_reduce(mixed, P7, prec, -28)
    assert {m: f.series for m, f in again.forms.items()} == {m: f.series for m, f in reference.forms.items()}


def test_bracket_pool_spans_the_same_space():
    prec = 60
    a = echelon_reduce(level_seven_bracket_pool(prec), P7, prec, -28)
    b = build_basis(P7, -28, prec)
    # the brackets reach the eight forms down to q^-27; F_-28 needs a j(28 tau) multiple
    assert sorted(a.forms) == [-27, -24, -20, -19, -12, -7, -3, 0]
    assert all(a.forms[m].series == b.forms[m].series for m in a.forms)
    assert all(check_epsilon(g, P7).passed for g in level_seven_bracket_pool(prec))


@pytest.mark.parametrize("params, targets", [(P7, (-31, -56, -59)), (P13, (-5, -8, -13, -16))])
def test_deep_extension_matches_direct_echelon(params, targets):
    direct = build_basis(params, min(targets) - 1, 60)
    cache = FormCache(params)
    for m in targets:
        assert cache.form(m, 60).series == direct.forms[m].series


def test_missing_and_unsupported_forms():
    b = build_basis(P13, -4, 10)
    with pytest.raises(NonexistentForm):
        b.form(0)
    with pytest.raises(UnsupportedExponent):
        b.form(-2)
    with pytest.raises(UnsupportedExponent):
        FormCache(P7).form(-5, 10)


@pytest.mark.parametrize("N, k, expected", [(7, 1, -1), (1, 3, 0), (1, 5, -1), (3, 1, -1), (5, 1, -1)])
def test_m_epsilon(N, k, expected):
    assert compute_m_epsilon(SpaceParams.plus(N, k)) == expected


def test_m_epsilon_two_routes_agree():
    for N, k in [(1, 1), (1, 3), (1, 5)]:
        p = SpaceParams.plus(N, k)
        assert m_epsilon_from_basis(build_basis(p, -p.level, 80)) == m_epsilon_direct(p, 60)


def test_integrality_certificate_level_four():
    b = build_basis(P13, -4, 40)
    rep = certify_basis_integrality(b, 0)
    assert rep.passed
    assert rep.details["checklist"] == [-1, -4]
    assert rep.details["bounds"] == {-1: Fraction(13, 2), -4: Fraction(7, 2)}


def test_json_dump_is_deterministic():
    a = build_basis(P7, -28, 30).to_json()
    b = build_basis(P7, -28, 30).to_json()
    assert a == b and list(a["forms"]) == ["0", "-3", "-7", "-12", "-19", "-20", "-24", "-27", "-28"]


def test_alternative_thirteenth_bracket_gives_same_forms():
    prec = 60
    a = echelon_reduce(level_seven_bracket_pool(prec), P7, prec, -27)
    b = echelon_reduce(level_seven_bracket_pool(prec, thirteenth_from_third=True), P7, prec, -27)
    common = set(a.forms) & set(b.forms)
    assert common == set(a.forms)
    assert all(a.forms[m].series == b.forms[m].series for m in common)


@settings(max_examples=10)
@given(st.lists(st.fractions(min_value=-20, max_value=20).filter(bool), min_size=18, max_size=18))
def test_pool_scaling_does_not_change_forms(scales):
    prec = 50
    pool = level_seven_bracket_pool(prec)
    ref = echelon_reduce(pool, P7, prec, -27)
    scaled = echelon_reduce([f.scale(c) for f, c in zip(pool, scales)], P7, prec, -27)
    assert {m: f.series for m, f in scaled.forms.items()} == {m: f.series for m, f in ref.forms.items()}


def test_each_form_vanishes_at_the_other_pivots():
    b = build_basis(P7, -84, 40)
    for m, f in b.forms.items():
        assert all(f.series.coefficient(p) == 0 for p in b.forms if p != m)


def test_known_bracket_combination_is_twice_f_minus_3():
    prec = 60
    pool = level_seven_bracket_pool(prec)
    rc, th = pool[:17], pool[17]
    weights = {
        1: Fraction(-92368453, 1197504000),
        2: Fraction(-1105849, 739031040),
        3: Fraction(-7775323, 804722688000),
        4: Fraction(31109, 68584320000),
        7: Fraction(-1, 49268736000),
        8: Fraction(1, 862202880000),
        12: Fraction(-1, 86910050304000),
        15: Fraction(1, 216309458534400),
    }
    combo = linear_combination([(c, rc[i - 1]) for i, c in weights.items()] + [(Fraction(83841213721, 1026432000), th)])
    assert combo == build_basis(P7, -28, prec).forms[-3].series.scale(2)
