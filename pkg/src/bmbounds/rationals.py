"""Parsing and canonical formatting of exact rationals.

Every number on the certification path is a ``fractions.Fraction``; the
textual form is a decimal-free ``p/q`` string (plain ``p`` when q == 1).
Decimal literals are rejected on purpose: they would smuggle rounding into
an exact pipeline.
"""

from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/([+-]?\d+))?$")


class RationalFormatError(ValueError):
    """A string is not a valid p/q rational literal."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into a Fraction in lowest terms.

    Raises RationalFormatError for decimals, zero denominators or any
    other malformed input.
    """
    if not isinstance(text, str):
        raise RationalFormatError(f"expected a rational string, got {type(text).__name__}")
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise RationalFormatError(f"not a p/q rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalFormatError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    """Canonical decimal-free string: ``p`` for integers, else ``p/q`` with q > 0."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
