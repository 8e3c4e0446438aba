"""Small shared helpers."""

from __future__ import annotations

from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Exact rational from a float/str/int/Fraction parameter; floats snap to
    the nearest small rational so 1/3 passed as 0.333... compares exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**6)
