"""Coefficient rings.

Every computation in this package is parameterized by exactly one of two
rings: the integers (exact, with torsion phenomena) or the rationals (a
field, where homology reduces to dimension counts).  Scalars are stored
as Python ints in integer mode and as ``fractions.Fraction`` in rational
mode; both are arbitrary precision.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .errors import WrongRing


class Ring(enum.Enum):
    INTEGERS = "z"
    RATIONALS = "q"

    @classmethod
    def from_flag(cls, flag: str) -> "Ring":
        try:
            return cls(flag.lower())
        except ValueError:
            raise WrongRing(f"unknown ring flag {flag!r}; expected 'z' or 'q'") from None

    @property
    def is_field(self) -> bool:
        return self is Ring.RATIONALS

    def __str__(self) -> str:
        return "Z" if self is Ring.INTEGERS else "Q"


def parse_scalar(token: str) -> Fraction:
    """Parse an exact scalar token: an integer like ``-7`` or a ratio like ``3/2``.

    The denominator, when present, must be a positive integer.
    """
    text = token.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        if not den.isdigit() or int(den) == 0:
            raise ValueError(f"bad scalar {token!r}: denominator must be a positive integer")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_scalar(value) -> str:
    """Render an exact scalar as ``'3'`` or ``'-1/2'``, never as a decimal."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def coerce(ring: Ring, value):
    """Coerce an exact value into the ring: int for Z, Fraction for Q.

    Raises WrongRing if an integer is requested for a non-integral value.
    """
    if ring is Ring.INTEGERS:
        if isinstance(value, int):
            return value
        f = Fraction(value)
        if f.denominator != 1:
            raise WrongRing(f"{value} is not an integer")
        return f.numerator
    return value if isinstance(value, Fraction) else Fraction(value)
