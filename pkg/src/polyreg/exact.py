"""Exact rational helpers shared by certificates, windows and reports."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Any

Number = int | float | Fraction


def to_fraction(value: Any) -> Fraction:
    """Exact rational from int, Fraction, "p/q" text, or a float read as its shortest decimal."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to a rational")


def fraction_to_json(value: Fraction | None) -> int | str | None:
    """Integers stay integers; other rationals become "p/q" strings."""
    if value is None:
        return None
    value = Fraction(value)
    if value.denominator == 1:
        return int(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fraction_text(value: Fraction | None) -> str:
    """Short display text; rationals that came from floats print as decimals."""
    if value is None:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    if value.denominator > 10**6:
        return f"{float(value):.12g}"
    return f"{value.numerator}/{value.denominator}"
