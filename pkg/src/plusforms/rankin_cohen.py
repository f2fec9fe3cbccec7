"""Rankin-Cohen brackets of q-expansions."""

from __future__ import annotations

from fractions import Fraction

from .series import LaurentSeries, add, mul, theta_derivative


def generalized_binomial(x, s: int) -> Fraction:
    """x(x-1)...(x-s+1)/s! for rational x."""
    if s < 0:
        return Fraction(0)
    x = Fraction(x)
    out = Fraction(1)
    for i in range(s):
        out = out * (x - i) / (i + 1)
    return out


def _derivatives(f: LaurentSeries, n: int) -> list[LaurentSeries]:
    out = [f]
    for _ in range(n):
        out.append(theta_derivative(out[-1]))
    return out


def rc_bracket(f: LaurentSeries, wf, g: LaurentSeries, wg, n: int) -> LaurentSeries:
    """n-th Rankin-Cohen bracket [f, g]_n with D = q d/dq.

    [f, g]_n = sum_r (-1)^r C(wf+n-1, n-r) C(wg+n-1, r) D^r f D^(n-r) g,
    a form of weight wf + wg + 2n.
    """
    if n < 0:
        raise ValueError("bracket order must be nonnegative")
    wf, wg = Fraction(wf), Fraction(wg)
    for w in (wf, wg):
        if w.denominator not in (1, 2):
            raise ValueError("weights must be integers or half-integers")
    df = _derivatives(f, n)
    dg = _derivatives(g, n)
    total = None
    for r in range(n + 1):
        c = (-1) ** r * generalized_binomial(wf + n - 1, n - r) * generalized_binomial(wg + n - 1, r)
        if not c:
            continue
        term = mul(df[r], dg[n - r]).scale(c)
        total = term if total is None else add(total, term)
    if total is None:
        return mul(f, g).scale(0)
    return total
