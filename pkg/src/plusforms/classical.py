"""q-expansions of the classical generators: theta, Eisenstein series, Delta, j."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from flint import fmpz_poly, fmpq_poly

from . import _dense
from .series import LaurentSeries, invert, mul


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k from sum_{j<=k} C(k+1, j) B_j = 0 (B_1 = -1/2)."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2:
        return Fraction(0)
    total = Fraction(0)
    for j in range(k):
        bj = bernoulli(j) if j != 1 else Fraction(-1, 2)
        total += comb(k + 1, j) * bj
    return -total / (k + 1)


def sigma(r: int, n: int) -> int:
    """Divisor power sum sum_{d | n} d^r."""
    if n < 1:
        raise ValueError("sigma needs n >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**r
            e = n // d
            if e != d:
                total += e**r
        d += 1
    return total


def sigma_table(r: int, count: int) -> list[int]:
    """[sigma_r(0)=0, sigma_r(1), ..., sigma_r(count-1)] by a divisor sieve."""
    table = [0] * max(count, 0)
    for d in range(1, count):
        p = d**r
        for m in range(d, count, d):
            table[m] += p
    return table


def eisenstein(k: int, prec: int) -> LaurentSeries:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise ValueError("Eisenstein weight must be even and at least 4")
    if prec < 1:
        return LaurentSeries.zero(max(prec, 0))
    factor = -Fraction(2 * k) / bernoulli(k)
    sig = sigma_table(k - 1, prec)
    data = {0: Fraction(1)}
    for n in range(1, prec):
        data[n] = factor * sig[n]
    return LaurentSeries(data, prec)


def _pentagonal(length: int, step: int = 1) -> list[int]:
    """Coefficients of prod (1 - q^(step*n)) below q^length (Euler's pentagonal theorem)."""
    c = [0] * length
    k = 0
    while True:
        a = step * (k * (3 * k - 1) // 2)
        if a >= length:
            break
        sign = -1 if k % 2 else 1
        c[a] = sign
        b = step * (k * (3 * k + 1) // 2)
        if b < length and k:
            c[b] = sign
        k += 1
    return c


def eta_power(r: int, prec: int) -> LaurentSeries:
    """prod_{n>=1} (1 - q^n)^r below q^prec, for any integer r (no q^(r/24) factor)."""
    if prec <= 0:
        return LaurentSeries.zero(max(prec, 0))
    base = fmpz_poly(_pentagonal(prec))
    if r >= 0:
        poly = base.pow_trunc(r, prec) if r else fmpz_poly([1])
        return LaurentSeries.from_dense((int(c) for c in poly.coeffs()), 0, prec)
    denom = fmpq_poly(base.pow_trunc(-r, prec))
    inv = _dense.inverse(denom, prec)
    return LaurentSeries._raw(_dense.from_poly(inv, 0, prec), prec)


def delta(prec: int) -> LaurentSeries:
    """Delta = q prod (1 - q^n)^24."""
    return eta_power(24, max(prec - 1, 0)).shift(1)


def theta(prec: int) -> LaurentSeries:
    """theta = sum_{n in Z} q^(n^2)."""
    data = {}
    n = 0
    while n * n < prec:
        data[n * n] = 1 if n == 0 else 2
        n += 1
    return LaurentSeries._raw(data, prec)


def theta_alternating(prec: int) -> LaurentSeries:
    """sum_{n in Z} (-1)^n q^(n^2) = eta(tau)^2 / eta(2 tau)."""
    data = {}
    n = 0
    while n * n < prec:
        data[n * n] = 1 if n == 0 else (2 if n % 2 == 0 else -2)
        n += 1
    return LaurentSeries._raw(data, prec)


def j_function(prec: int) -> LaurentSeries:
    """Klein's j = E_4^3 / Delta with coefficients below q^prec."""
    if prec < -1:
        return LaurentSeries.zero(prec)
    e4 = eisenstein(4, prec + 1)
    e4cubed = mul(mul(e4, e4), e4)
    return mul(e4cubed, invert(delta(prec + 2)))


def inverse_j(prec: int) -> LaurentSeries:
    """1/j = Delta / E_4^3, an integral power series with valuation 1."""
    d = delta(prec)
    e4 = eisenstein(4, prec)
    return mul(d, invert(mul(mul(e4, e4), e4)))
