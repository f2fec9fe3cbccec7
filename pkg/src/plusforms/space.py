"""Space parameters, the support sieve, s(m), and pole-based integrality bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import ceil, gcd
from typing import Collection, Mapping

from flint import fmpz

from .errors import InsufficientPrecision, NotWeaklyHolomorphicHypothesis
from .report import VerificationReport
from .series import LaurentSeries


def prime_factors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("prime_factors needs a positive integer")
    return [int(p) for p, _ in fmpz(n).factor()]


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in fmpz(n).factor())


def kronecker(a: int, p: int) -> int:
    """Kronecker symbol (a/p) for a prime p (including p = 2)."""
    if p == 2:
        if a % 2 == 0:
            return 0
        return 1 if a % 8 in (1, 7) else -1
    return int(fmpz(a % p).jacobi(p))


@dataclass(frozen=True)
class SpaceParams:
    """Level N (odd, square-free), weight k/2 (k odd), and the sign vector of the space.

    ``epsilon`` maps each prime p | N to +1 or -1 and ``eps2`` is the sign at 2.
    ``plus_family`` marks the square-class support law: (-1)^lambda n must be a
    square mod 4N, which corresponds to eps2 = (-1)^lambda and
    eps_p = (-1/p)^lambda.
    """

    N: int
    k: int
    epsilon: tuple[tuple[int, int], ...]
    eps2: int
    plus_family: bool = False
    _squares: frozenset = field(default=frozenset(), compare=False, repr=False)

    @classmethod
    def plus(cls, N: int, k: int) -> "SpaceParams":
        _validate(N, k)
        lam = (k - 1) // 2
        eps = tuple((p, kronecker(-1, p) ** (lam % 2)) for p in prime_factors(N)) if N > 1 else ()
        squares = frozenset((x * x) % (4 * N) for x in range(4 * N))
        return cls(N, k, eps, (-1) ** (lam % 2), True, squares)

    @classmethod
    def with_signs(cls, N: int, k: int, epsilon: Mapping[int, int], eps2: int) -> "SpaceParams":
        _validate(N, k)
        primes = prime_factors(N) if N > 1 else []
        if sorted(epsilon) != primes:
            raise ValueError(f"signs must be given for exactly the primes {primes}")
        if eps2 not in (1, -1) or any(s not in (1, -1) for s in epsilon.values()):
            raise ValueError("signs must be +1 or -1")
        candidate = cls(N, k, tuple((p, epsilon[p]) for p in primes), eps2, False)
        plus = cls.plus(N, k)
        if candidate.epsilon == plus.epsilon and candidate.eps2 == plus.eps2:
            return plus
        return candidate

    @property
    def lam(self) -> int:
        return (self.k - 1) // 2

    @property
    def level(self) -> int:
        return 4 * self.N

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.epsilon]

    @property
    def weight(self) -> Fraction:
        return Fraction(self.k, 2)

    def sign(self, p: int) -> int:
        return dict(self.epsilon)[p]

    def dual(self) -> "SpaceParams":
        """The space of weight 2 - k/2 paired with this one (eps*_p = (-1/p) eps_p)."""
        eps = {p: kronecker(-1, p) * s for p, s in self.epsilon}
        return SpaceParams.with_signs(self.N, 4 - self.k, eps, -self.eps2)

    def supports(self, n: int) -> bool:
        return epsilon_support(n, self)

    @cached_property
    def supported_residues(self) -> frozenset[int]:
        M = self.level
        return frozenset(r for r in range(M) if epsilon_support(r, self))

    def __str__(self) -> str:
        return f"(N={self.N}, k={self.k})"


def _validate(N: int, k: int) -> None:
    if N < 1 or N % 2 == 0 or not is_squarefree(N):
        raise ValueError(f"level N must be odd, square-free and positive, got {N}")
    if k % 2 == 0:
        raise ValueError(f"weight numerator k must be odd, got {k}")


def plus_support(n: int, params: SpaceParams) -> bool:
    """(-1)^lambda n is a square modulo 4N."""
    if not params.plus_family:
        raise ValueError("plus_support is defined for the square-class family only")
    squares = params._squares or frozenset((x * x) % params.level for x in range(params.level))
    return ((-1) ** (params.lam % 2) * n) % params.level in squares


def epsilon_support(n: int, params: SpaceParams) -> bool:
    """False iff n = 2 or -eps2 mod 4, or (n/p) = -eps_p for a prime p | N."""
    r = n % 4
    if r == 2 or r == (-params.eps2) % 4:
        return False
    for p, s in params.epsilon:
        if kronecker(n, p) == -s:
            return False
    return True


def check_epsilon(f: LaurentSeries, params: SpaceParams) -> VerificationReport:
    bad = [(e, c) for e, c in f.items() if not epsilon_support(e, params)]
    return VerificationReport("support", not bad, bad, {"N": params.N, "k": params.k})


def s_of_m(m: int, params: SpaceParams) -> Fraction:
    """Product of (1 + p/|D_p|) = 2 over the primes p dividing gcd(N, m)."""
    g = gcd(params.N, m) if m else params.N
    out = Fraction(1)
    for p in params.primes:
        if g % p == 0:
            out *= 2
    return out


def index_gamma0(M: int) -> int:
    """[SL_2(Z) : Gamma_0(M)] = M prod_{p | M} (1 + 1/p)."""
    if M < 1:
        raise ValueError("index_gamma0 needs M >= 1")
    out = Fraction(M)
    if M > 1:
        for p in prime_factors(M):
            out *= Fraction(p + 1, p)
    return int(out)


@dataclass(frozen=True)
class SturmData:
    ord_inf: int
    k_prime: int
    bound: Fraction
    index: int

    def last_index(self) -> int:
        """Largest exponent n with n <= bound."""
        return self.bound.numerator // self.bound.denominator


def sturm_data(f: LaurentSeries, params: SpaceParams) -> SturmData:
    if f.is_zero() or f.valuation() >= 0:
        raise NotWeaklyHolomorphicHypothesis("the pole-based bound needs a nonzero coefficient at a negative exponent")
    return sturm_data_for_order(f.valuation(), params)


def sturm_data_for_order(order: int, params: SpaceParams) -> SturmData:
    depth = Fraction(-order, params.level)
    kp = max(1, ceil(depth))
    while params.k + 12 * kp <= 0:
        kp += 1
    index = index_gamma0(params.level)
    bound = order + Fraction(params.k + 12 * kp, 12) * index
    return SturmData(order, kp, bound, index)


def holomorphic_bound(params: SpaceParams) -> Fraction:
    """Integrality bound (k/12) [SL_2 : Gamma_0(4N)] for holomorphic forms of positive weight."""
    if params.k <= 0:
        raise NotWeaklyHolomorphicHypothesis("holomorphic bound needs positive weight")
    return Fraction(params.k, 12) * index_gamma0(params.level)


def certify_integrality(f: LaurentSeries, params: SpaceParams) -> VerificationReport:
    """Integrality of every coefficient, certified by checking those up to the bound."""
    if not f.is_zero() and f.valuation() < 0:
        data = sturm_data(f, params)
        bound = data.bound
        details = {"route": "pole", "ord_inf": data.ord_inf, "k_prime": data.k_prime, "bound": bound, "index": data.index}
    else:
        bound = holomorphic_bound(params)
        details = {"route": "holomorphic", "bound": bound, "index": index_gamma0(params.level)}
    if f.precision <= bound:
        raise InsufficientPrecision(f"precision {f.precision} does not exceed the bound {bound}")
    bad = [(e, c) for e, c in f.items() if e <= bound and c.denominator != 1]
    return VerificationReport("integrality", not bad, bad, details)


def thm12_checklist(m_epsilon: int, params: SpaceParams, existing: Collection[int] | None = None) -> list[int]:
    """Reduced forms whose integrality propagates to all others (descending order).

    All supported m with -4N - m_epsilon <= m <= 0; with ``existing`` given,
    restricted to those forms and extended by any positive pivots.
    """
    lower = -params.level - m_epsilon
    out = [m for m in range(0, lower - 1, -1) if epsilon_support(m, params)]
    if existing is not None:
        exist = set(existing)
        out = [m for m in out if m in exist]
        out = sorted({m for m in exist if m > 0}, reverse=True) + out
    return out
