"""Truncated Laurent series in q with exact rational coefficients.

A series stores only its nonzero coefficients together with an exclusive
precision bound: coefficients at exponents >= ``precision`` are unknown.
``precision`` may be ``math.inf`` for exact (finite) expressions such as
monomials.  Integral coefficients are kept as ``int`` internally for speed;
``coefficient`` always hands back a ``Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from flint import fmpz

from . import _dense
from .errors import PrecisionExceeded, ZeroSeries

Number = Union[int, Fraction]
Precision = Union[int, float]

EXACT = math.inf

# products with more than this many term pairs go through FLINT
_DENSE_THRESHOLD = 6000


def _clean(value) -> Number:
    if type(value) is int:
        return value
    q = Fraction(value)
    return q.numerator if q.denominator == 1 else q


def _check_precision(precision) -> Precision:
    if precision == EXACT:
        return EXACT
    if isinstance(precision, bool) or not isinstance(precision, int):
        raise TypeError(f"precision must be an int or math.inf, got {precision!r}")
    return precision


class LaurentSeries:
    """Immutable truncated Laurent series ``sum a(n) q^n + O(q^precision)``."""

    __slots__ = ("_coeffs", "_precision", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]] = (), precision: Precision = EXACT):
        precision = _check_precision(precision)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        data: dict[int, Number] = {}
        for e, c in items:
            e = int(e)
            if e >= precision:
                continue
            c = _clean(c)
            if c:
                data[e] = data.get(e, 0) + c
                if not data[e]:
                    del data[e]
        self._coeffs = data
        self._precision = precision
        self._hash = None

    @classmethod
    def _raw(cls, data: dict, precision: Precision) -> "LaurentSeries":
        # trusted constructor: data already cleaned, nonzero and below precision
        obj = cls.__new__(cls)
        obj._coeffs = data
        obj._precision = precision
        obj._hash = None
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, precision: Precision = EXACT) -> "LaurentSeries":
        return cls._raw({}, _check_precision(precision))

    @classmethod
    def one(cls) -> "LaurentSeries":
        return cls._raw({0: 1}, EXACT)

    @classmethod
    def monomial(cls, exponent: int, coeff=1, precision: Precision = EXACT) -> "LaurentSeries":
        return cls({exponent: coeff}, precision)

    @classmethod
    def from_dense(cls, values: Iterable, start: int = 0, precision: Precision | None = None) -> "LaurentSeries":
        """Build from a list of coefficients beginning at exponent ``start``.

        Without an explicit precision the list is taken as known up to its end.
        """
        values = list(values)
        if precision is None:
            precision = start + len(values)
        return cls(((start + i, c) for i, c in enumerate(values)), precision)

    # -- basic accessors ---------------------------------------------------

    @property
    def precision(self) -> Precision:
        return self._precision

    @property
    def is_exact(self) -> bool:
        return self._precision == EXACT

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def exponents(self) -> list[int]:
        return sorted(self._coeffs)

    def items(self) -> list[tuple[int, Fraction]]:
        """Nonzero terms in ascending exponent order, as Fractions."""
        return [(e, Fraction(self._coeffs[e])) for e in sorted(self._coeffs)]

    def raw_items(self) -> Iterator[tuple[int, Number]]:
        return iter(self._coeffs.items())

    def valuation(self) -> int:
        if not self._coeffs:
            raise ZeroSeries("valuation of a series with no nonzero coefficient")
        return min(self._coeffs)

    def _effective_valuation(self) -> Precision:
        # a vanishing series is known to be zero below its precision
        return min(self._coeffs) if self._coeffs else self._precision

    def leading_coefficient(self) -> Fraction:
        return Fraction(self._coeffs[self.valuation()])

    def coefficient(self, n: int) -> Fraction:
        if n >= self._precision:
            raise PrecisionExceeded(f"coefficient of q^{n} requested but precision is {self._precision}")
        return Fraction(self._coeffs.get(n, 0))

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficient(n)

    def get(self, n: int, default=0) -> Number:
        """Raw coefficient lookup without the precision check."""
        return self._coeffs.get(n, default)

    def principal_part(self) -> "LaurentSeries":
        return LaurentSeries._raw({e: c for e, c in self._coeffs.items() if e < 0}, EXACT)

    def has_integral_coefficients(self) -> bool:
        return all(type(c) is int for c in self._coeffs.values())

    # -- precision handling ------------------------------------------------

    def truncate(self, precision: Precision) -> "LaurentSeries":
        precision = _check_precision(precision)
        if precision >= self._precision:
            return self
        return LaurentSeries._raw({e: c for e, c in self._coeffs.items() if e < precision}, precision)

    def with_precision(self, precision: Precision) -> "LaurentSeries":
        """Declare a new precision; raising it is only sound for exact data."""
        precision = _check_precision(precision)
        if precision > self._precision:
            raise PrecisionExceeded(f"cannot raise precision from {self._precision} to {precision}")
        return self.truncate(precision)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._raw({e: -c for e, c in self._coeffs.items()}, self._precision)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, LaurentSeries):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if isinstance(other, LaurentSeries):
            return mul(self, invert(other))
        return NotImplemented

    def __pow__(self, e: int):
        return power(self, e)

    def scale(self, c) -> "LaurentSeries":
        c = _clean(c)
        if not c:
            return LaurentSeries._raw({}, self._precision)
        if c == 1:
            return self
        if type(c) is int:
            data = {e: v * c for e, v in self._coeffs.items()}
        else:
            data = {e: _clean(v * c) for e, v in self._coeffs.items()}
        return LaurentSeries._raw(data, self._precision)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by q^k."""
        return LaurentSeries._raw({e + k: c for e, c in self._coeffs.items()}, self._precision + k)

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self._precision == other._precision and self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._precision, frozenset(self._coeffs.items())))
        return self._hash

    def agrees_with(self, other: "LaurentSeries", below: Precision | None = None) -> bool:
        """True when both series have the same coefficients below the common precision."""
        bound = min(self._precision, other._precision)
        if below is not None:
            bound = min(bound, below)
        mine = {e: c for e, c in self._coeffs.items() if e < bound}
        theirs = {e: c for e, c in other._coeffs.items() if e < bound}
        return mine == theirs

    # -- display -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"LaurentSeries({self.pretty(12)})"

    def pretty(self, max_terms: int | None = None, var: str = "q") -> str:
        terms = []
        exps = sorted(self._coeffs)
        shown = exps if max_terms is None else exps[:max_terms]
        for e in shown:
            c = Fraction(self._coeffs[e])
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = _fmt(mag).removesuffix("/1")
            else:
                mono = var if e == 1 else f"{var}^{e}"
                body = mono if mag == 1 else f"{_fmt(mag).removesuffix('/1')}*{mono}"
            terms.append((sign, body))
        if max_terms is not None and len(exps) > max_terms:
            terms.append(("+", "..."))
        if self._precision != EXACT:
            terms.append(("+", f"O({var}^{self._precision})"))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        prec = None if self._precision == EXACT else self._precision
        return {
            "precision": prec,
            "coeffs": [[e, _fmt(self._coeffs[e])] for e in sorted(self._coeffs)],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "LaurentSeries":
        prec = obj["precision"]
        return cls(((int(e), _parse(c)) for e, c in obj["coeffs"]), EXACT if prec is None else int(prec))


def _fmt(c: Number) -> str:
    c = Fraction(c)
    return f"{fmpz(c.numerator)}/{fmpz(c.denominator)}"


def _parse(text: str) -> Fraction:
    num, _, den = str(text).partition("/")
    return Fraction(int(fmpz(num.strip())), int(fmpz(den.strip())) if den else 1)


def _coerce(x):
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentSeries({0: x}, EXACT)
    return NotImplemented


# -- module-level operations -----------------------------------------------


def add(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    prec = min(f._precision, g._precision)
    if len(f._coeffs) < len(g._coeffs):
        f, g = g, f
    data = {e: c for e, c in f._coeffs.items() if e < prec}
    for e, c in g._coeffs.items():
        if e < prec:
            v = data.get(e, 0) + c
            if v:
                data[e] = v if type(v) is int else _clean(v)
            else:
                data.pop(e, None)
    return LaurentSeries._raw(data, prec)


def mul(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    vf = f._effective_valuation()
    vg = g._effective_valuation()
    prec = min(f._precision + vg, g._precision + vf)
    if not f._coeffs or not g._coeffs:
        return LaurentSeries._raw({}, prec)
    if len(f._coeffs) * len(g._coeffs) > _DENSE_THRESHOLD:
        return _mul_dense(f, g, vf, vg, prec)
    fe = sorted(f._coeffs.items())
    ge = sorted(g._coeffs.items())
    acc: dict[int, Number] = {}
    for ea, ca in fe:
        if ea + vg >= prec:
            break
        for eb, cb in ge:
            e = ea + eb
            if e >= prec:
                break
            acc[e] = acc.get(e, 0) + ca * cb
    data = {}
    for e, c in acc.items():
        if c:
            data[e] = c if type(c) is int else _clean(c)
    return LaurentSeries._raw(data, prec)


def _mul_dense(f: LaurentSeries, g: LaurentSeries, vf: int, vg: int, prec: Precision) -> LaurentSeries:
    hf = max(f._coeffs) + 1 if prec == EXACT else min(prec - vg, max(f._coeffs) + 1)
    hg = max(g._coeffs) + 1 if prec == EXACT else min(prec - vf, max(g._coeffs) + 1)
    pf = _dense.to_poly(f._coeffs, vf, hf)
    pg = _dense.to_poly(g._coeffs, vg, hg)
    if prec == EXACT:
        prod = pf * pg
    else:
        prod = _dense.mul_low(pf, pg, prec - vf - vg)
    return LaurentSeries._raw(_dense.from_poly(prod, vf + vg, prec), prec)


def invert(f: LaurentSeries, precision: Precision | None = None) -> LaurentSeries:
    """Multiplicative inverse to the precision that ``f`` supports.

    For an exact input the target precision must be supplied.
    """
    if not f._coeffs:
        raise ZeroSeries("cannot invert a series with no nonzero coefficient")
    v = min(f._coeffs)
    if f._precision == EXACT:
        if precision is None:
            if len(f._coeffs) == 1:
                return LaurentSeries._raw({-v: _clean(Fraction(1) / Fraction(f._coeffs[v]))}, EXACT)
            raise ValueError("inverting an exact series needs an explicit precision")
        prec = precision
    else:
        prec = f._precision - 2 * v
        if precision is not None:
            prec = min(prec, precision)
    rel = prec + v  # number of known coefficients of the inverse
    if rel <= 0:
        return LaurentSeries._raw({}, prec)
    if len(f._coeffs) * rel > _DENSE_THRESHOLD:
        pf = _dense.to_poly(f._coeffs, v, v + rel)
        inv = _dense.inverse(pf, rel)
        return LaurentSeries._raw(_dense.from_poly(inv, -v, prec), prec)
    # short series: direct recurrence
    a0 = Fraction(f._coeffs[v])
    rest = [(e - v, Fraction(c)) for e, c in sorted(f._coeffs.items()) if e != v and e - v < rel]
    b = [Fraction(0)] * rel
    b[0] = 1 / a0
    for n in range(1, rel):
        s = Fraction(0)
        for i, c in rest:
            if i > n:
                break
            s += c * b[n - i]
        b[n] = -s / a0
    return LaurentSeries._raw({i - v: _clean(c) for i, c in enumerate(b) if c}, prec)


def power(f: LaurentSeries, e: int) -> LaurentSeries:
    if e < 0:
        raise ValueError("negative exponents: invert first")
    result = LaurentSeries.one()
    base = f
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def theta_derivative(f: LaurentSeries) -> LaurentSeries:
    """Apply q d/dq."""
    return LaurentSeries._raw({e: e * c for e, c in f._coeffs.items() if e}, f._precision)


def dilate(f: LaurentSeries, M: int) -> LaurentSeries:
    """Substitute q -> q^M."""
    if M < 1:
        raise ValueError("dilation factor must be positive")
    return LaurentSeries._raw({M * e: c for e, c in f._coeffs.items()}, f._precision * M)


def coefficient(f: LaurentSeries, n: int) -> Fraction:
    return f.coefficient(n)


def linear_combination(terms: Iterable[tuple[object, LaurentSeries]]) -> LaurentSeries:
    out = None
    for c, s in terms:
        s = s.scale(c)
        out = s if out is None else add(out, s)
    return out if out is not None else LaurentSeries.zero()
