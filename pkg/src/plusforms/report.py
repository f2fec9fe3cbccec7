"""Structured pass/fail evidence returned by every check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from flint import fmpz


def format_rational(x) -> str:
    # fmpz prints integers of any size; str(int) refuses past a few thousand digits
    x = Fraction(x)
    return f"{fmpz(x.numerator)}/{fmpz(x.denominator)}"


@dataclass
class VerificationReport:
    check: str
    passed: bool
    witnesses: list[tuple[int, Fraction]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "pass": self.passed,
            "witnesses": [{"n": int(n), "value": format_rational(v)} for n, v in self.witnesses],
        }
        for key, value in self.details.items():
            out[key] = _jsonable(value)
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if self.witnesses:
            shown = ", ".join(f"n={n}: {format_rational(v)}" for n, v in self.witnesses[:5])
            extra = f" [{shown}{', ...' if len(self.witnesses) > 5 else ''}]"
        return f"{status} {self.check}{extra}"


def _jsonable(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return value if value.bit_length() < 10000 else str(fmpz(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)
