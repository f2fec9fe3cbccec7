"""Hecke operators T(l^2), T(l^2n) and T(t^2) on half-integral weight q-expansions.

The coefficient of q^n in f | T(l^2) is

    a(l^2 n) + l^(lambda-1) ((-1)^lambda n / l) a(n) + l^(2 lambda - 1) a(n / l^2),

with a(n / l^2) = 0 unless l^2 | n.  Higher powers follow the three-term
recursion T(l^2n) = T(l^(2n-2)) T(l^2) - l^(k-2) T(l^(2n-4)), and T(t^2) is
multiplicative in t.

Besides whole-series application, every operator can be evaluated one
coefficient at a time from a coefficient oracle; this is how coefficients at
very large indices are reached without expanding full series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable

from flint import fmpz

from .errors import BadPrime
from .series import EXACT, LaurentSeries, add
from .space import SpaceParams, kronecker

Coefficients = Callable[[int], Fraction]


@dataclass(frozen=True)
class HeckeDescriptor:
    t: int
    factorization: tuple[tuple[int, int], ...]

    @classmethod
    def from_t(cls, t: int, params: SpaceParams | None = None) -> "HeckeDescriptor":
        if t < 1:
            raise ValueError("t must be a positive integer")
        if params is not None and gcd(t, params.level) != 1:
            raise BadPrime(f"t={t} is not coprime to 4N={params.level}")
        fac = tuple((int(p), int(e)) for p, e in fmpz(t).factor()) if t > 1 else ()
        return cls(t, fac)


def _check_prime(ell: int, params: SpaceParams) -> None:
    if ell < 2 or not fmpz(ell).is_prime():
        raise BadPrime(f"{ell} is not a prime")
    if params.level % ell == 0:
        raise BadPrime(f"l={ell} divides 4N={params.level}")


def _power(ell: int, e: int) -> Fraction | int:
    return ell**e if e >= 0 else Fraction(1, ell ** (-e))


def t_ell2_coefficient(a: Coefficients, n: int, ell: int, lam: int) -> Fraction:
    """Coefficient of q^n in f | T(l^2), given the coefficients a of f."""
    sq = ell * ell
    value = a(sq * n)
    symbol = kronecker((-1) ** (lam % 2) * n, ell)
    if symbol:
        value += symbol * _power(ell, lam - 1) * a(n)
    if n % sq == 0:
        value += _power(ell, 2 * lam - 1) * a(n // sq)
    return Fraction(value)


def _output_precision(prec, ell: int):
    if prec == EXACT:
        return EXACT
    sq = ell * ell
    return -((-prec) // sq)


def _apply_formula(f: LaurentSeries, ell: int, lam: int) -> LaurentSeries:
    sq = ell * ell
    out_prec = _output_precision(f.precision, ell)
    support = [e for e, _ in f.raw_items()]
    candidates = set()
    for e in support:
        if e % sq == 0:
            candidates.add(e // sq)
        candidates.add(e)
        candidates.add(sq * e)
    candidates = sorted(n for n in candidates if n < out_prec)

    def a(x: int):
        return f.get(x, 0)

    data = {}
    for n in candidates:
        v = t_ell2_coefficient(a, n, ell, lam)
        if v:
            data[n] = v
    return LaurentSeries(data, out_prec)


def apply_T_ell2(f: LaurentSeries, ell: int, params: SpaceParams) -> LaurentSeries:
    _check_prime(ell, params)
    return _apply_formula(f, ell, params.lam)


def apply_T_ell2n(f: LaurentSeries, ell: int, n: int, params: SpaceParams) -> LaurentSeries:
    """f | T(l^2n) by the three-term recursion; n = 0 is the identity."""
    _check_prime(ell, params)
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    if n == 0:
        return f
    corr = _power(ell, params.k - 2)
    older, cur = f, _apply_formula(f, ell, params.lam)
    for _ in range(2, n + 1):
        older, cur = cur, add(_apply_formula(cur, ell, params.lam), older.scale(-corr))
    return cur


def apply_T_t2(f: LaurentSeries, desc: HeckeDescriptor | int, params: SpaceParams) -> LaurentSeries:
    if isinstance(desc, int):
        desc = HeckeDescriptor.from_t(desc, params)
    if gcd(desc.t, params.level) != 1:
        raise BadPrime(f"t={desc.t} is not coprime to 4N={params.level}")
    out = f
    for ell, e in desc.factorization:
        out = apply_T_ell2n(out, ell, e, params)
    return out


def plus_space_T4(f: LaurentSeries, params: SpaceParams) -> LaurentSeries:
    """Plus-space operator at the prime 2 for level 4.

    Same coefficient formula with the Kronecker symbol at 2, followed by the
    projection to the plus space (exponents outside the support are dropped).
    """
    if params.N != 1:
        raise BadPrime("the operator at 2 is only provided for level 4")
    out = _apply_formula(f, 2, params.lam)
    return LaurentSeries({e: c for e, c in out.raw_items() if params.supports(e)}, out.precision)


# -- pointwise evaluation ------------------------------------------------------


class _Memo:
    __slots__ = ("fn", "cache")

    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, n):
        try:
            return self.cache[n]
        except KeyError:
            v = self.cache[n] = self.fn(n)
            return v


def pointwise_T_ell2n(a: Coefficients, ell: int, n: int, params: SpaceParams) -> Coefficients:
    """Coefficient function of f | T(l^2n) built from the coefficient function of f."""
    _check_prime(ell, params)
    if n == 0:
        return a
    lam = params.lam
    corr = _power(ell, params.k - 2)
    levels: list[Coefficients] = [a]
    levels.append(_Memo(lambda x, g=a: t_ell2_coefficient(g, x, ell, lam)))
    for j in range(2, n + 1):
        g1, g2 = levels[j - 1], levels[j - 2]
        levels.append(_Memo(lambda x, g1=g1, g2=g2: t_ell2_coefficient(g1, x, ell, lam) - corr * g2(x)))
    return levels[n]


def pointwise_T_t2(a: Coefficients, desc: HeckeDescriptor | int, params: SpaceParams) -> Coefficients:
    if isinstance(desc, int):
        desc = HeckeDescriptor.from_t(desc, params)
    out = a
    for ell, e in desc.factorization:
        out = pointwise_T_ell2n(out, ell, e, params)
    return out


def required_precision(t: int, d: int) -> int:
    """Input precision needed to read the d-th coefficient after T(t^2)."""
    return t * t * d + 1 if d >= 0 else d + 1


def b_coefficient(source, m: int, t: int, d: int) -> Fraction:
    """B_t(m, d): the d-th coefficient of F_m | T(t^2).

    ``source`` supplies reduced forms through ``form(m, prec)``; both a
    fixed basis and the growing form cache qualify.
    """
    form = source.form(m, required_precision(t, d))
    return pointwise_T_t2(form.coefficient, t, form.params)(d)
