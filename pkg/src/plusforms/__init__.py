"""Reduced bases, Hecke operators and coefficient identities for half-integral weight plus spaces."""

from .errors import *  # noqa: F401,F403
from .series import LaurentSeries
from .space import SpaceParams

__all__ = ["LaurentSeries", "SpaceParams"]
