"""Exact money arithmetic in SEK, kept at hundredths (öre)."""

from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Union

Money = Decimal

CENT = Decimal("0.01")
ZERO = Decimal("0.00")

Number = Union[int, str, Decimal, Fraction]


def rate(value) -> Decimal:
    """Coerce a per-minute rate to Decimal without passing through binary floats."""
    if isinstance(value, float):
        value = repr(value)
    return Decimal(value)


def money(value: Number) -> Money:
    """Round an exact quantity to hundredths with round-half-even."""
    if isinstance(value, Fraction):
        cents = round(value * 100)  # Fraction.__round__ is half-even
        return Decimal(cents).scaleb(-2)
    return Decimal(value).quantize(CENT, rounding=ROUND_HALF_EVEN)


def to_cents(m: Money) -> int:
    return int(m.scaleb(2).to_integral_value())


def from_cents(cents: int) -> Money:
    return Decimal(cents).scaleb(-2).quantize(CENT)
