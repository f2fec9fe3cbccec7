"""Spanning pools, echelon reduction, and reduced forms F_m = q^m + O(q^(m+1)).

A basis is computed on a window of principal exponents m >= pole_bound by
exact Gauss-Jordan elimination of a pool of forms known to lie in the space.
Forms with deeper poles are written as sum_b P_b(j(4N tau)) F_b over the
window forms F_b; the polynomials P_b are found from principal parts alone
and then evaluated at full precision.
"""

from __future__ import annotations

import heapq
from math import isqrt
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from flint import fmpq, fmpq_poly

from . import _dense
from .classical import delta, eisenstein, eta_power, j_function, theta, theta_alternating
from .errors import InsufficientPrecision, NonexistentForm, PoolDeficient, UnsupportedExponent
from .hecke import plus_space_T4
from .rankin_cohen import rc_bracket
from .report import VerificationReport
from .series import EXACT, LaurentSeries, add, dilate, invert, linear_combination, mul
from .space import (
    SpaceParams,
    certify_integrality,
    check_epsilon,
    epsilon_support,
    s_of_m,
    sturm_data_for_order,
    thm12_checklist,
)
from .traces import weight_three_halves_level_four_coefficient

EISENSTEIN_WEIGHTS = (4, 6, 8, 10, 12, 14)
MAX_BRACKET_ORDER = 4


# -- reduced forms -----------------------------------------------------------------


@dataclass(frozen=True)
class ReducedForm:
    """F_m = s(m) f_m, monic at q^m.

    ``oracle`` optionally supplies exact coefficients beyond the stored
    precision (only for forms with a closed coefficient formula).
    """

    m: int
    s: Fraction
    series: LaurentSeries
    params: SpaceParams
    oracle: Callable[[int], Fraction] | None = field(default=None, compare=False, repr=False)

    @property
    def precision(self):
        return self.series.precision

    def coefficient(self, n: int) -> Fraction:
        """B(m, n), the q^n-coefficient of F_m."""
        if n < self.series.precision:
            return self.series.coefficient(n)
        if self.oracle is not None:
            return self.oracle(n)
        raise InsufficientPrecision(f"F_{self.m} is known below q^{self.series.precision}, asked for q^{n}")

    def unscaled(self) -> LaurentSeries:
        """f_m itself."""
        return self.series.scale(1 / self.s)

    def to_json(self) -> dict:
        return {"m": self.m, "s": f"{self.s.numerator}/{self.s.denominator}", "series": self.series.to_json()}


@dataclass
class ReducedBasis:
    params: SpaceParams
    forms: dict[int, ReducedForm]
    pool_pole_bound: int
    precision: int
    existence_gaps: frozenset[int]
    pool_size: int = 0

    @property
    def pivots(self) -> list[int]:
        return sorted(self.forms)

    def form(self, m: int, prec: int | None = None) -> ReducedForm:
        if not epsilon_support(m, self.params):
            raise UnsupportedExponent(f"q^{m} is excluded by the support condition of {self.params}")
        if m in self.existence_gaps:
            raise NonexistentForm(f"no reduced form with principal exponent {m} for {self.params}")
        if m not in self.forms:
            if m < self.pool_pole_bound:
                if prec is None:
                    prec = self.precision
                return extend_to(self, m, prec)
            raise NonexistentForm(f"no reduced form with principal exponent {m} was found")
        form = self.forms[m]
        if prec is not None and form.precision < prec and form.oracle is None:
            raise InsufficientPrecision(f"F_{m} known below q^{form.precision}, need q^{prec}")
        return form

    def to_json(self) -> dict:
        return {
            "N": self.params.N,
            "k": self.params.k,
            "pole_bound": self.pool_pole_bound,
            "precision": self.precision,
            "forms": {str(m): self.forms[m].to_json() for m in sorted(self.forms, reverse=True)},
            "existence_gaps": sorted(self.existence_gaps),
        }


# -- seeds ---------------------------------------------------------------------------


def _weight_three_halves_seed(prec: int) -> LaurentSeries:
    """theta_1(tau) E_4(4 tau) / eta(4 tau)^6 = q^-1 - 2 + 248 q^3 - ..., theta_1 = sum (-1)^n q^(n^2)."""
    length = (prec + 1 + 3) // 4 + 1
    h = mul(eisenstein(4, length), eta_power(-6, length))
    g = mul(theta_alternating(prec + 1), dilate(h, 4)).shift(-1)
    return g.truncate(prec)


def _seeds(params: SpaceParams, pole_bound: int, prec: int) -> tuple[list[tuple[LaurentSeries, Fraction]], bool]:
    """Seed forms with their weights; the flag says whether they alone span over C[j(4N tau)]."""
    if params.k % 4 == 1:
        return [(theta(prec), Fraction(1, 2))], False
    if params.N == 1:
        needs_four = pole_bound <= -4
        g1 = _weight_three_halves_seed(4 * prec if needs_four else prec)
        seeds = [(g1.truncate(prec), Fraction(3, 2))]
        if needs_four:
            # (g1 | T(4) - g1) / 2 = q^-4 - 2 - 26752 q^3 - ...
            g4 = add(plus_space_T4(g1, SpaceParams.plus(1, 3)), -g1.truncate(prec)).scale(Fraction(1, 2))
            seeds.append((g4.truncate(prec), Fraction(3, 2)))
        return seeds, True
    raise PoolDeficient(f"no seed forms are available for weight {params.k}/2 at level 4*{params.N}")


def _shift_recipes(shift: int) -> list[tuple[int, int, int]]:
    """(a, n, j) with a + 2n - 12 j = shift: bracket with E_a(4N tau), order n, divide by Delta^j."""
    out = []
    for a in EISENSTEIN_WEIGHTS:
        for n in range(MAX_BRACKET_ORDER + 1):
            rest = a + 2 * n - shift
            if rest >= 0 and rest % 12 == 0:
                out.append((a, n, rest // 12))
    return out


class _LevelCache:
    """Dilated Eisenstein series and Delta powers at a fixed working precision."""

    def __init__(self, M: int, prec: int):
        self.M = M
        self.prec = prec
        self._eis = {}
        self._inv_delta = {}

    def eis(self, a: int) -> LaurentSeries:
        if a not in self._eis:
            self._eis[a] = dilate(eisenstein(a, self.prec // self.M + 2), self.M)
        return self._eis[a]

    def inv_delta_power(self, j: int) -> LaurentSeries:
        if j not in self._inv_delta:
            base = invert(dilate(delta(self.prec // self.M + 2 * j + 3), self.M))
            out = LaurentSeries.one()
            for _ in range(j):
                out = mul(out, base)
            self._inv_delta[j] = out
        return self._inv_delta[j]


def spanning_pool(params: SpaceParams, pole_bound: int, prec: int) -> list[LaurentSeries]:
    """Forms in the space whose span contains every reduced form with m >= pole_bound.

    Seeds are bracketed with Eisenstein series E_a(4N tau) (orders up to 4),
    divided by powers of Delta(4N tau), bracketed once more, and multiplied by
    powers of j(4N tau) until the pole bound is reached.
    """
    if not params.plus_family:
        raise PoolDeficient("pools are only constructed for the square-class family")
    M = params.level
    seed_weight = Fraction(1, 2) if params.k % 4 == 1 else Fraction(3, 2)
    shift = Fraction(params.k, 2) - seed_weight
    assert shift.denominator == 1 and shift % 2 == 0
    shift = int(shift)
    j_depth = -(pole_bound // M) + 1
    recipes1 = _shift_recipes(shift)
    recipes2 = [r for r in _shift_recipes(0) if r[1] >= 1]
    # working precision covers the Delta divisions and the j multiplications
    max_j1 = max((r[2] for r in recipes1), default=0)
    work = prec + M * (max_j1 + 1 + j_depth + 1)
    seeds, complete = _seeds(params, pole_bound, work)
    cache = _LevelCache(M, work)

    level0 = [s for s, _ in seeds]
    pool: list[LaurentSeries] = []
    if complete and shift == 0:
        base = list(level0)
    else:
        level1 = []
        for s, w in seeds:
            for a, n, j in recipes1:
                b = rc_bracket(s, w, cache.eis(a), a, n)
                if j:
                    b = mul(b, cache.inv_delta_power(j))
                if not b.is_zero():
                    level1.append(b)
        level2 = []
        target = Fraction(params.k, 2)
        for f in level1:
            for a, n, j in recipes2:
                b = rc_bracket(f, target, cache.eis(a), a, n)
                if j:
                    b = mul(b, cache.inv_delta_power(j))
                if not b.is_zero():
                    level2.append(b)
        base = (level0 if shift == 0 else []) + level1 + level2
    jq = dilate(j_function(work // M + 2), M)
    # every F_m with m >= pole_bound is a combination of j(4N tau)^l b over base
    # elements b, with l <= ceil(-pole_bound / 4N)
    for f in base:
        pool.append(f)
        g = f
        for _ in range(j_depth - 1):
            g = mul(g, jq)
            pool.append(g)
    out = []
    for f in pool:
        if f.precision < prec:
            raise InsufficientPrecision(f"pool element has precision {f.precision} < {prec}")
        out.append(f.truncate(prec))
    return out


def level_seven_bracket_pool(prec: int, thirteenth_from_third: bool = False) -> list[LaurentSeries]:
    """A fixed spanning set for weight 1/2 at level 28: seventeen brackets and theta.

    Brackets of theta with E_a(28 tau) (orders 1..4, a = 10, 8, 6, 4), then the
    same brackets applied to the first two of those, then to the third, each
    divided by Delta(28 tau), and one bracket of a fixed rational combination.
    By default the thirteenth element repeats the fifth;
    ``thirteenth_from_third`` builds it from the third bracket instead.
    """
    M = 28
    work = prec + 2 * M + 4
    cache = _LevelCache(M, work)
    inv = cache.inv_delta_power(1)
    half = Fraction(1, 2)
    th = theta(work)

    def rc(f, a, n):
        return mul(rc_bracket(f, half, cache.eis(a), a, n), inv)

    orders = ((10, 1), (8, 2), (6, 3), (4, 4))
    first = [rc(th, a, n) for a, n in orders]
    rc1, rc2, rc3, rc4 = first
    second = [rc(base, a, n) for base in (rc1, rc2) for a, n in orders]
    rc13 = rc(rc3 if thirteenth_from_third else rc1, 10, 1)
    third = [rc13] + [rc(rc3, a, n) for a, n in orders[1:]]
    f = linear_combination(
        [
            (Fraction(1, 5600), rc1),
            (Fraction(7, 103680), rc2),
            (Fraction(1, 80640), rc3),
            (Fraction(1, 705600), rc4),
            (Fraction(-41687, 1800), th),
        ]
    )
    rc17 = rc(f, 4, 4)
    pool = first + second + third + [rc17, th]
    return [g.truncate(prec) for g in pool]


# -- echelon reduction ------------------------------------------------------------------


def echelon_reduce(pool: Iterable[LaurentSeries], params: SpaceParams, prec: int, pole_bound: int | None = None) -> ReducedBasis:
    """Exact reduced row echelon form of the pool, pivots at the lowest exponents."""
    rows: dict[int, LaurentSeries] = {}
    pool = [f.truncate(prec) for f in pool]
    for f in pool:
        if f.precision < prec:
            raise InsufficientPrecision(f"pool element has precision {f.precision} < {prec}")
    for f in pool:
        r = f
        for p in sorted(rows):
            c = r.get(p, 0)
            if c:
                r = add(r, rows[p].scale(-c))
        if r.is_zero():
            continue
        v = r.valuation()
        r = r.scale(1 / Fraction(r.get(v)))
        for p in list(rows):
            c = rows[p].get(v, 0)
            if c:
                rows[p] = add(rows[p], r.scale(-c))
        rows[v] = r
    if pole_bound is None:
        pole_bound = min(rows) if rows else 0
    forms = {
        m: ReducedForm(m, s_of_m(m, params), series, params)
        for m, series in rows.items()
        if m >= pole_bound
    }
    gaps = frozenset(m for m in range(pole_bound, 1) if epsilon_support(m, params) and m not in forms)
    return ReducedBasis(params, forms, pole_bound, prec, gaps, len(pool))


def _check_periodicity(basis: ReducedBasis) -> None:
    M = basis.params.level
    for m in basis.forms:
        e = m - M
        if e >= basis.pool_pole_bound and e not in basis.forms:
            raise PoolDeficient(f"F_{m} exists but F_{e} = j(4N tau) F_{m} + ... was not found")


def build_basis(params: SpaceParams, pole_bound: int, prec: int) -> ReducedBasis:
    pool = spanning_pool(params, pole_bound, prec)
    for f in pool:
        if not check_epsilon(f, params).passed:
            raise AssertionError("pool element violates the support condition")
    basis = echelon_reduce(pool, params, prec, pole_bound)
    _check_periodicity(basis)
    _attach_oracles(basis)
    return basis


# dense expansions of forms with a closed coefficient formula stop here
ORACLE_DENSE_LIMIT = 20000


def coefficient_oracle(params: SpaceParams, m: int) -> Callable[[int], Fraction] | None:
    """Exact coefficient formula for F_m when one is known (traces of singular moduli at level 4)."""
    if params.N == 1 and params.k == 3 and params.plus_family and m == -1:
        return weight_three_halves_level_four_coefficient
    return None


def _attach_oracles(basis: ReducedBasis) -> None:
    for m, f in list(basis.forms.items()):
        oracle = coefficient_oracle(basis.params, m)
        if oracle is not None:
            basis.forms[m] = ReducedForm(f.m, f.s, f.series, f.params, oracle)


def reduced_form(m: int, params: SpaceParams, prec: int) -> ReducedForm:
    return default_cache(params).form(m, prec)


# -- deep poles ---------------------------------------------------------------------------


class _Split:
    """sum over residues r of q^r Q^off_r P_r(Q), Q = q^M, known below exponent ``hi``.

    Multiplication by a series in Q acts on each residue class separately,
    which avoids the zero padding of dilated products; only supported
    classes carry data.
    """

    __slots__ = ("M", "hi", "parts")

    def __init__(self, M: int, hi: int, parts: dict[int, tuple[int, fmpq_poly]]):
        self.M, self.hi, self.parts = M, hi, parts

    def _cap(self, r: int) -> int:
        # Q-exponents x with r + M x < hi
        return -((r - self.hi) // self.M)

    @classmethod
    def of(cls, f: LaurentSeries, M: int, hi: int) -> "_Split":
        grouped: dict[int, dict[int, object]] = {}
        for e, c in f.raw_items():
            if e < hi:
                grouped.setdefault(e % M, {})[e // M] = c
        out = cls(M, hi, {})
        for r, data in grouped.items():
            lo = min(data)
            out.parts[r] = (lo, _dense.to_poly(data, lo, out._cap(r)))
        return out

    def times_q_series(self, off: int, poly: fmpq_poly, hi: int | None = None) -> "_Split":
        """Multiply by Q^off poly(Q), keeping exponents below ``hi``."""
        out = _Split(self.M, self.hi if hi is None else hi, {})
        for r, (o, P) in self.parts.items():
            new_off = o + off
            n = out._cap(r) - new_off
            if n > 0:
                out.parts[r] = (new_off, _dense.mul_low(P, poly, n))
        return out

    def coeff(self, e: int):
        r = e % self.M
        part = self.parts.get(r)
        if part is None:
            return fmpq(0)
        i = e // self.M - part[0]
        return part[1][i] if i >= 0 else fmpq(0)

    def sub_scaled(self, c, other: "_Split") -> None:
        for r, (o2, P2) in other.parts.items():
            o1, P1 = self.parts.get(r, (o2, fmpq_poly([])))
            if o2 < o1:
                P1, o1 = P1.left_shift(o1 - o2), o2
            P = P1 - (P2 * c).left_shift(o2 - o1)
            self.parts[r] = (o1, P.truncate(max(self._cap(r) - o1, 0)))

    def to_series(self) -> LaurentSeries:
        data = {}
        for r, (o, P) in self.parts.items():
            for x, c in _dense.from_poly(P, o, EXACT).items():
                data[r + self.M * x] = c
        return LaurentSeries._raw(data, self.hi)


@lru_cache(maxsize=8)
def _j_times_q(length: int) -> fmpq_poly:
    """q j(q) as a power series with ``length`` coefficients."""
    j = j_function(length - 1)
    return _dense.to_poly(dict(j.raw_items()), -1, length - 1)


def _to_fmpq(c) -> fmpq:
    c = Fraction(c)
    return fmpq(c.numerator, c.denominator)


def _poly_in_j(coeffs: dict[int, Fraction], length: int) -> tuple[int, fmpq_poly]:
    """sum_l c_l j^l as q^(-D) S(q) with S known to ``length`` terms; returns (D, S).

    Baby-step giant-step: with U = q j, X = U^s and l = i s + r,
    sum_l c_l U^l q^(-l) = q^(-(s-1) - s I) sum_i A_i X^i q^(s (I - i)),
    A_i = sum_r c_(is+r) U^r q^(s-1-r), evaluated by Horner in X.  This needs
    about 2 sqrt(D) full-length products.
    """
    D = max(coeffs)
    s = max(1, isqrt(D + 1))
    top = D // s
    E = s - 1 + s * top
    n = length + E - D
    U = _j_times_q(n)
    baby = [fmpq_poly([1])]
    for _ in range(1, s):
        baby.append(_dense.mul_low(baby[-1], U, n))
    X = _dense.mul_low(baby[-1], U, n)

    def block(i: int) -> fmpq_poly:
        out = fmpq_poly([])
        for r in range(s):
            c = coeffs.get(i * s + r)
            if c:
                out += (baby[r] * _to_fmpq(c)).left_shift(s - 1 - r)
        return out.truncate(n)

    R = block(top)
    for i in range(top - 1, -1, -1):
        R = _dense.mul_low(R, X, n) + block(i).left_shift(s * (top - i))
        R = R.truncate(n)
    # R = q^(E - D) S
    return D, R.right_shift(E - D).truncate(length)


def _deep_plan(basis: ReducedBasis, target: int) -> dict[int, dict[int, Fraction]]:
    """Polynomials P_b with F_target = sum_b P_b(j(4N tau)) F_b, from principal parts.

    Greedy elimination: start from j^L F_r for the window form F_r in the
    class of the target, then clear each deeper pivot in ascending order with
    j^l F_b; the generators j^l F_b of each class are produced by repeated
    division by j(4N tau), everything truncated above the window.
    """
    M = basis.params.level
    pivots = basis.pivots
    B = basis.pool_pole_bound
    class_base: dict[int, int] = {}
    for b in pivots:
        class_base.setdefault(b % M, b)
    if target % M not in class_base:
        raise NonexistentForm(f"no reduced form in the residue class of {target} mod {M}")
    if target >= B:
        raise NonexistentForm(f"{target} is not below the window")
    hi = max(pivots) + 1
    need = hi + (max(pivots) - target)
    for b in pivots:
        if basis.forms[b].precision < need:
            raise InsufficientPrecision("window forms are too short for the principal-part solve")
    depth = {b: (b - target) // M for b in class_base.values() if b - target >= M}
    jlen = max(depth.values(), default=0) + (hi - B) // M + 3
    U = _j_times_q(jlen)
    inv_U = _dense.inverse(U, jlen)
    heap = []
    state = {}
    for b, L in depth.items():
        Fb = _Split.of(basis.forms[b].series, M, hi + M * L)
        G = Fb.times_q_series(-L, U.pow_trunc(L, jlen), hi)
        state[b] = (L, G)
        heap.append((b - M * L, b))
    heapq.heapify(heap)
    poly: dict[int, dict[int, Fraction]] = {}
    h = None
    while heap:
        e, b = heapq.heappop(heap)
        L, G = state[b]
        if e == target:
            h = G
            poly.setdefault(b, {})[L] = Fraction(1)
        elif h is not None:
            c = h.coeff(e)
            if c:
                h.sub_scaled(c, G)
                poly.setdefault(b, {})[L] = poly.get(b, {}).get(L, 0) - Fraction(int(c.p), int(c.q))
        if L > 1:
            state[b] = (L - 1, G.times_q_series(1, inv_U))
            heapq.heappush(heap, (b - M * (L - 1), b))
    assert h is not None
    for b in pivots:
        if b <= target:
            continue
        c = h.coeff(b)
        if c:
            h.sub_scaled(c, _Split.of(basis.forms[b].series, M, hi))
            poly.setdefault(b, {})[0] = poly.get(b, {}).get(0, 0) - Fraction(int(c.p), int(c.q))
    return {b: {l: c for l, c in p.items() if c} for b, p in poly.items()}


def extend_to(basis: ReducedBasis, target: int, prec: int) -> ReducedForm:
    """F_target for target below the window, to precision ``prec``."""
    params = basis.params
    if not epsilon_support(target, params):
        raise UnsupportedExponent(f"q^{target} is excluded by the support condition")
    M = params.level
    plan = _deep_plan(basis, target)
    total = None
    for b, coeffs in sorted(plan.items()):
        if not coeffs:
            continue
        Fb = basis.forms[b].series
        D = max(coeffs)
        if Fb.precision < prec + M * D:
            raise InsufficientPrecision(f"F_{b} needs precision {prec + M * D}, has {Fb.precision}")
        # P_b(j(4N tau)) = Q^(-D) S(Q); S is needed through Q^(D + ceil((prec - b) / M))
        length = D - ((b - prec) // M) + 1
        D_, S = _poly_in_j(coeffs, length)
        term = _Split.of(Fb, M, prec + M * D).times_q_series(-D_, S, prec)
        if total is None:
            total = term
        else:
            for r, (o, P) in term.parts.items():
                total.sub_scaled(fmpq(-1), _Split(M, prec, {r: (o, P)}))
    assert total is not None
    series = total.to_series()
    _assert_reduced(series, target, basis)
    return ReducedForm(target, s_of_m(target, params), series, params)


def _assert_reduced(series: LaurentSeries, target: int, basis: ReducedBasis) -> None:
    if series.valuation() != target or series.get(target) != 1:
        raise AssertionError(f"extension of F_{target} is not monic at q^{target}")
    M = basis.params.level
    classes = {b % M for b in basis.forms}
    for e, _ in series.raw_items():
        if e == target:
            continue
        # below the window every exponent in an occupied class is a pivot
        if e in basis.forms or (e < basis.pool_pole_bound and e % M in classes):
            raise AssertionError(f"extension of F_{target} has a nonzero coefficient at the pivot {e}")


# -- form cache --------------------------------------------------------------------------


class FormCache:
    """Builds and remembers bases so that each request pays only for what it needs."""

    def __init__(self, params: SpaceParams, window: int | None = None):
        self.params = params
        self.window = -params.level if window is None else window
        self._bases: list[ReducedBasis] = []
        self._deep: dict[int, ReducedForm] = {}

    def basis(self, pole_bound: int, prec: int) -> ReducedBasis:
        for b in self._bases:
            if b.pool_pole_bound <= pole_bound and b.precision >= prec:
                return b
        b = build_basis(self.params, pole_bound, prec)
        self._bases.append(b)
        return b

    def form(self, m: int, prec: int) -> ReducedForm:
        p = self.params
        if not epsilon_support(m, p):
            raise UnsupportedExponent(f"q^{m} is excluded by the support condition of {p}")
        if m >= self.window:
            if coefficient_oracle(p, m) is not None:
                prec = min(prec, ORACLE_DENSE_LIMIT)
            basis = self.basis(min(m, 0), prec)
            f = basis.form(m)
            if f.precision < prec and f.oracle is None:
                raise InsufficientPrecision(f"F_{m} only reached q^{f.precision}")
            return f
        cached = self._deep.get(m)
        if cached is not None and cached.precision >= prec:
            return cached
        probe = self.basis(self.window, 4 * p.level)
        top = max(probe.pivots) if probe.pivots else 0
        base = self.basis(self.window, prec - m + max(top, 0) + p.level + 1)
        f = extend_to(base, m, prec)
        self._deep[m] = f
        return f


_CACHES: dict[SpaceParams, FormCache] = {}


def default_cache(params: SpaceParams) -> FormCache:
    if params not in _CACHES:
        _CACHES[params] = FormCache(params)
    return _CACHES[params]


# -- existence of dual forms --------------------------------------------------------------


def dual_is_constructible(params: SpaceParams) -> bool:
    dual = params.dual()
    return dual.k % 4 == 1 or dual.N == 1


def m_epsilon_from_basis(basis: ReducedBasis) -> int:
    """Largest principal exponent of a dual reduced form, read off the original basis.

    A dual form with principal exponent m* >= 0 exists exactly when f_(-m*)
    is missing from the original space, and one with m* < 0 exists exactly
    when -m* is not a (holomorphic) pivot of the original space.
    """
    params = basis.params
    dual = params.dual()
    candidates = [-g for g in basis.existence_gaps if g <= 0]
    if candidates:
        return max(candidates)
    m = -1
    while True:
        if epsilon_support(m, dual) and -m not in basis.forms:
            if -m >= basis.precision:
                raise InsufficientPrecision("basis precision does not cover the positive pivots needed")
            return m
        m -= 1


def m_epsilon_direct(params: SpaceParams, prec: int) -> int:
    """Largest pivot of the dual space, computed from its own basis."""
    dual = params.dual()
    basis = build_basis(dual, -dual.level, prec)
    return max(basis.pivots)


def compute_m_epsilon(params: SpaceParams, prec: int = 60) -> int:
    if dual_is_constructible(params):
        return m_epsilon_direct(params, prec)
    return m_epsilon_from_basis(build_basis(params, -params.level, prec))


# -- integrality -----------------------------------------------------------------------


def checklist_precision(params: SpaceParams, m_epsilon: int) -> int:
    lower = -params.level - m_epsilon
    bound = sturm_data_for_order(min(lower, -1), params).bound
    return int(bound) + params.level + 1


def certify_basis_integrality(basis: ReducedBasis, m_epsilon: int) -> VerificationReport:
    """Integrality of all s(m) a(m, n), from pole-bound checks on the finite checklist."""
    checklist = thm12_checklist(m_epsilon, basis.params, basis.forms.keys())
    lower = -basis.params.level - m_epsilon
    missing = [m for m in range(lower, 1) if epsilon_support(m, basis.params) and m not in basis.forms and m not in basis.existence_gaps]
    if missing or lower < basis.pool_pole_bound:
        raise InsufficientPrecision(f"basis does not cover the checklist (missing {missing})")
    reports = {}
    witnesses = []
    for m in checklist:
        rep = certify_integrality(basis.forms[m].series, basis.params)
        reports[m] = rep
        witnesses.extend(rep.witnesses)
    passed = all(r.passed for r in reports.values())
    details = {
        "N": basis.params.N,
        "k": basis.params.k,
        "m_epsilon": m_epsilon,
        "checklist": checklist,
        "bounds": {m: r.details["bound"] for m, r in reports.items()},
        "certificate": "s(m) a(m, n) is integral for every reduced form" if passed else None,
    }
    return VerificationReport("integrality-checklist", passed, witnesses, details)
