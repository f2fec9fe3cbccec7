"""Dense polynomial kernels backed by FLINT.

Long series products and inverses are routed through ``fmpq_poly`` so that
the quadratic schoolbook loop only runs on short inputs.  Everything stays
exact: FLINT works with integer numerators over a common denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from flint import fmpq_poly


def to_poly(coeffs, lo: int, hi: int) -> fmpq_poly:
    """Pack the coefficients at exponents ``lo <= e < hi`` into a polynomial in q**(e - lo)."""
    den = 1
    for e, c in coeffs.items():
        if lo <= e < hi and type(c) is Fraction:
            den = lcm(den, c.denominator)
    ints = [0] * max(hi - lo, 0)
    if den == 1:
        for e, c in coeffs.items():
            if lo <= e < hi:
                ints[e - lo] = int(c)
    else:
        for e, c in coeffs.items():
            if lo <= e < hi:
                if type(c) is Fraction:
                    ints[e - lo] = c.numerator * (den // c.denominator)
                else:
                    ints[e - lo] = c * den
    return fmpq_poly(ints, den)


def from_poly(poly: fmpq_poly, lo: int, hi: int | float) -> dict:
    """Unpack a polynomial whose constant term sits at exponent ``lo``; drop exponents >= hi."""
    den = int(poly.denom())
    out = {}
    for i, c in enumerate(poly.numer().coeffs()):
        if c:
            e = lo + i
            if e >= hi:
                break
            v = int(c)
            out[e] = v if den == 1 else _reduce(v, den)
    return out


def _reduce(num: int, den: int):
    q = Fraction(num, den)
    return q.numerator if q.denominator == 1 else q


def mul_low(a: fmpq_poly, b: fmpq_poly, n: int) -> fmpq_poly:
    if n <= 0:
        return fmpq_poly([])
    return a.mul_low(b, n)


def inverse(f: fmpq_poly, n: int) -> fmpq_poly:
    """Power-series inverse of ``f`` (nonzero constant term) modulo x**n by Newton iteration."""
    c0 = f.coeffs()[0]
    g = fmpq_poly([1 / c0])
    have = 1
    while have < n:
        have = min(2 * have, n)
        fg = f.mul_low(g, have)
        g = g * 2 - g.mul_low(fg, have)
        g = g.truncate(have)
    return g
