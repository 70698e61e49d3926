"""Lossless conversion between user-facing numbers and exact rationals."""

from __future__ import annotations

from fractions import Fraction


def exact(value) -> Fraction:
    """``p/q`` strings, decimal strings, ints and floats to a Fraction.

    Floats go through their shortest decimal repr, so ``1.846`` becomes
    ``923/500`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if type(value).__name__ == "mpq":
        return Fraction(int(value.numerator), int(value.denominator))
    text = str(value).strip()
    try:
        return Fraction(text)
    except ValueError as exc:
        raise ValueError(f"not a rational number: {value!r}") from exc


def fmt(value: Fraction) -> str:
    value = exact(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def pair(value: Fraction) -> dict:
    """JSON form: exact string plus a decimal for humans."""
    value = exact(value)
    return {"exact": fmt(value), "decimal": float(value)}
