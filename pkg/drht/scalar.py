"""
Scalar backends shared by every drht module.

Exact rationals (`fractions.Fraction`, exposed as `ExactRational`) carry all
distances and scales in the core, because every homotopy decision is a
threshold comparison. `ApproxFloat` is a tolerance-aware float used only by
the sampled circle example.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

logger = logging.getLogger(__name__)

ExactRational = Fraction

DEFAULT_TOLERANCE = 1e-9
LIPSCHITZ_SLACK = 1e-6

_INTEGER = re.compile(r"^[+-]?\d+$")
_FRACTION = re.compile(r"^([+-]?\d+)\s*/\s*([+-]?\d+)$")
_DECIMAL = re.compile(r"^([+-]?)(\d*)\.(\d+)$")


class ScalarParseError(ValueError):
    """Raised for malformed scalar literals."""


@total_ordering
@dataclass(frozen=True)
class ApproxFloat:
    """Binary float compared with an absolute tolerance.

    Two values are equal when they differ by at most `eps`. Arithmetic
    keeps the tolerance of the left operand.
    """

    value: float
    eps: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"tolerance must be positive, got {self.eps}")

    def _coerce(self, other) -> float:
        if isinstance(other, ApproxFloat):
            return other.value
        if isinstance(other, (int, float, Fraction)):
            return float(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return abs(self.value - v) <= self.eps

    def __lt__(self, other) -> bool:
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self.value < v - self.eps

    def __hash__(self):
        # tolerance equality is not transitive
        raise TypeError("ApproxFloat is unhashable")

    def __add__(self, other):
        return ApproxFloat(self.value + self._coerce(other), self.eps)

    def __sub__(self, other):
        return ApproxFloat(self.value - self._coerce(other), self.eps)

    def __mul__(self, other):
        return ApproxFloat(self.value * self._coerce(other), self.eps)

    def __truediv__(self, other):
        return ApproxFloat(self.value / self._coerce(other), self.eps)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return ApproxFloat(self._coerce(other) - self.value, self.eps)

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"ApproxFloat({self.value!r}, eps={self.eps!r})"


def parse_scalar(text: Union[str, int, Fraction]) -> ExactRational:
    """
    Parse an integer, "p/q" fraction or decimal literal into an exact rational.

    Decimals are read as fractions over powers of ten, so "0.5" gives 1/2
    exactly.

    Raises:
        ScalarParseError: malformed literal or zero denominator.
    """
    if isinstance(text, bool):
        raise ScalarParseError(f"not a scalar literal: {text!r}")
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ScalarParseError(f"not a scalar literal: {text!r}")

    literal = text.strip()
    if _INTEGER.match(literal):
        return Fraction(int(literal))

    match = _FRACTION.match(literal)
    if match:
        numerator, denominator = int(match.group(1)), int(match.group(2))
        if denominator == 0:
            raise ScalarParseError(f"zero denominator in {text!r}")
        return Fraction(numerator, denominator)

    match = _DECIMAL.match(literal)
    if match and (match.group(2) or match.group(3)):
        sign, whole, digits = match.groups()
        value = Fraction(int(whole or "0")) + Fraction(int(digits), 10 ** len(digits))
        return -value if sign == "-" else value

    raise ScalarParseError(f"malformed scalar literal: {text!r}")


def format_scalar(value: Fraction) -> str:
    """Render a rational in the "p/q" wire format ("p" for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def common_denominator(values) -> int:
    """Least common multiple of the denominators of `values` (1 if empty)."""
    result = 1
    for v in values:
        result = math.lcm(result, Fraction(v).denominator)
    return result


def rationalize(x: float, denominator: int = 10**6) -> ExactRational:
    """Round a float to the nearest rational with the given denominator."""
    return Fraction(round(x * denominator), denominator)
