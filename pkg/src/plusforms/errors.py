"""Exception hierarchy shared by every module of the package."""


class PlusFormsError(Exception):
    """Base class for all package errors."""


class ZeroSeries(PlusFormsError, ZeroDivisionError):
    """Raised when inverting a series with no nonzero coefficient."""


class PrecisionExceeded(PlusFormsError, IndexError):
    """A coefficient was requested at or beyond the known precision."""


class InsufficientPrecision(PlusFormsError):
    """An operation needs more q-precision than its input carries."""


class NotWeaklyHolomorphicHypothesis(PlusFormsError):
    """The series has no pole, so the pole-based integrality bound does not apply."""


class PoolDeficient(PlusFormsError):
    """The spanning pool does not reach a pivot that is required."""


class NonexistentForm(PlusFormsError):
    """No reduced form with the requested principal exponent exists."""


class UnsupportedExponent(PlusFormsError):
    """The exponent is excluded by the support condition of the space."""


class BadPrime(PlusFormsError, ValueError):
    """The prime divides the level 4N, so the Hecke operator is not defined here."""


class HypothesisUnverified(PlusFormsError):
    """A standing hypothesis (vanishing cusp space) could not be established."""


class HypothesisViolated(PlusFormsError, ValueError):
    """The parameters violate a clause-specific hypothesis."""
