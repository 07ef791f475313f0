"""Exact rational helpers.

Every Real/float value in the pipeline is a :class:`fractions.Fraction`. This module
converts between fractions and the decimal literals of the three text formats.

>>> format_float(Fraction(1, 4))
'0.25'
>>> format_float(Fraction(1, 3)) is None
True
>>> format_float(parse_decimal("3.402823e+38"))
'3.402823e+38'
"""

from typing import Optional, Tuple, Union

import re
from fractions import Fraction

Number = Union[int, Fraction]

_DECIMAL = re.compile(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")
_PLAIN_LIMIT = 32


def parse_decimal(text: str) -> Fraction:
    """Convert a decimal or scientific literal into its exact value."""
    if not _DECIMAL.fullmatch(text):
        raise ValueError(f"not a decimal literal: {text!r}")
    return Fraction(text)


def as_fraction(value: Union[int, Fraction, str]) -> Fraction:
    if isinstance(value, str):
        return parse_decimal(value)
    return Fraction(value)


def normalize(value: Fraction) -> Number:
    """Collapse integral fractions to ``int``."""
    if value.denominator == 1:
        return value.numerator
    return value


def decimal_parts(value: Fraction) -> Optional[Tuple[bool, str, int]]:
    """Return ``(negative, digits, exponent)`` with ``|value| = digits * 10**exponent``.

    ``None`` when the decimal expansion does not terminate.
    """
    denominator = value.denominator
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return None
    scale = max(twos, fives)
    scaled = abs(value.numerator) * 10 ** scale // value.denominator
    exponent = -scale
    if scaled == 0:
        return (False, "0", 0)
    while scaled % 10 == 0:
        scaled //= 10
        exponent += 1
    return (value < 0, str(scaled), exponent)


def format_float(value: Number, max_digits: Optional[int] = None) -> Optional[str]:
    """Render ``value`` as an exact float literal (always with a point or exponent)."""
    parts = decimal_parts(Fraction(value))
    if parts is None:
        return None
    negative, digits, exponent = parts
    if max_digits is not None and len(digits) > max_digits:
        return None
    sign = "-" if negative else ""
    if exponent >= 0:
        plain = digits + "0" * exponent + ".0"
    else:
        padded = digits.rjust(-exponent + 1, "0")
        plain = padded[:exponent] + "." + padded[exponent:]
    if len(plain) <= _PLAIN_LIMIT:
        return sign + plain
    power = exponent + len(digits) - 1
    mantissa = digits[0] + "." + (digits[1:] or "0")
    return f"{sign}{mantissa}e{'+' if power >= 0 else '-'}{abs(power)}"


def format_float_approx(value: Fraction, significant: int = 17) -> str:
    """Lossy rendering with ``significant`` digits, for non-terminating values."""
    negative = value < 0
    magnitude = abs(value)
    if magnitude == 0:
        return "0.0"
    power = 0
    while magnitude >= 10:
        magnitude /= 10
        power += 1
    while magnitude < 1:
        magnitude *= 10
        power -= 1
    scaled = round(magnitude * 10 ** (significant - 1))
    approx = Fraction(scaled, 10 ** (significant - 1)) * Fraction(10) ** power
    text = format_float(approx)
    assert text is not None
    return ("-" + text.lstrip("-")) if negative else text


def trunc_div(a: int, b: int) -> int:
    """Integer division rounding toward zero (FlatZinc and MiniZinc ``div``).

    >>> trunc_div(-7, 2), trunc_div(7, -2)
    (-3, -3)
    """
    quotient = abs(a) // abs(b)
    return -quotient if (a < 0) != (b < 0) else quotient


def trunc_mod(a: int, b: int) -> int:
    """Remainder with the sign of the dividend, paired with :func:`trunc_div`."""
    return a - b * trunc_div(a, b)


def euclid_div(a: int, b: int) -> int:
    """SMT-LIB ``div``: the remainder is always non-negative.

    >>> euclid_div(-7, 2), euclid_div(-7, -2)
    (-4, 4)
    """
    return (a - euclid_mod(a, b)) // b


def euclid_mod(a: int, b: int) -> int:
    return a % abs(b)
