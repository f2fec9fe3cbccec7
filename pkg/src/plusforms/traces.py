"""Traces of singular moduli, evaluated exactly with rigorous ball arithmetic.

For d > 0 let Tr(d) be the sum of J(alpha_Q)/w_Q over the Gamma-classes of
positive definite binary quadratic forms Q of discriminant -d (primitive or
not), with J = j - 744, alpha_Q the root in the upper half plane and w_Q = 3,
2 or 1 according as Q is equivalent to a multiple of x^2+xy+y^2, of x^2+y^2,
or neither.  The weight 3/2 form with principal part q^-1 on Gamma_0(4) has
q^d-coefficient -Tr(d), which lets its coefficients be read at indices far
beyond any affordable series precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt, log2, pi

from flint import acb, arb, ctx

_MARGIN_BITS = 64


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """Reduced forms (a, b, c) with b^2 - 4ac = -d: |b| <= a <= c, b >= 0 if |b| = a or a = c."""
    if d <= 0:
        raise ValueError("discriminant -d must be negative")
    if d % 4 not in (0, 3):
        return []
    out = []
    amax = isqrt(d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + d) % (4 * a):
                continue
            c = (b * b + d) // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            out.append((a, b, c))
    return out


def _weight(a: int, b: int, c: int) -> int:
    if a == b == c:
        return 3
    if b == 0 and a == c:
        return 2
    return 1


def _trace_ball(d: int, extra_bits: int) -> tuple[arb, arb]:
    forms = reduced_forms(d)
    root = pi * d**0.5
    guard = _MARGIN_BITS + extra_bits + int(log2(len(forms) + 1)) + 1
    values = []
    old = ctx.prec
    try:
        for a, b, c in forms:
            # |J(alpha_Q)| is about exp(pi sqrt(d) / a); each term gets just enough bits
            ctx.prec = int(root / (a * 0.6931471805599453)) + guard
            tau = acb(arb(-b) / (2 * a), arb(d).sqrt() / (2 * a))
            values.append((tau.modular_j() - 744) / _weight(a, b, c))
        # the running sum must carry the precision of the largest term
        ctx.prec = int(root / 0.6931471805599453) + guard
        total = acb(0)
        for v in values:
            total += v
    finally:
        ctx.prec = old
    return total.real, total.imag


@lru_cache(maxsize=4096)
def singular_moduli_trace(d: int) -> int:
    """Tr(d) as an exact integer (0 when no form of discriminant -d exists)."""
    if d % 4 not in (0, 3):
        return 0
    extra = 0
    for _ in range(8):
        re, im = _trace_ball(d, extra)
        if re.rad() < 0.25 and im.contains(0):
            unique = re.unique_fmpz()
            if unique is not None:
                return int(unique)
            lo = re.floor()
            hi = re.ceil()
            if lo.unique_fmpz() is not None and lo == hi:
                return int(lo.unique_fmpz())
        extra = 2 * extra + 64
    raise ArithmeticError(f"could not isolate the trace for d={d}")


def weight_three_halves_level_four_coefficient(d: int) -> Fraction:
    """Coefficient of q^d in the reduced form q^-1 - 2 + 248 q^3 - ... of weight 3/2 on Gamma_0(4)."""
    if d < -1:
        return Fraction(0)
    if d == -1:
        return Fraction(1)
    if d == 0:
        return Fraction(-2)
    return Fraction(-singular_moduli_trace(d))
