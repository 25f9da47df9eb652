"""Exact rational helpers and the "a/b" string format used in all files."""

from fractions import Fraction
from math import floor, gcd
import re

from .errors import SchemaError

_RAT = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text, *, strict=True):
    """Parse ``"a/b"`` or ``"a"`` into a Fraction.

    With ``strict`` the string must already be in lowest terms with b > 0,
    which is what every file this package writes looks like.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise SchemaError(f"expected rational string, got {text!r}")
    m = _RAT.match(text)
    if m is None:
        raise SchemaError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise SchemaError(f"zero denominator in {text!r}")
    if strict and gcd(num, den) != 1 and not (num == 0 and den == 1):
        raise SchemaError(f"rational {text!r} is not in lowest terms")
    return Fraction(num, den)


def fmt(x):
    """Lowest-terms string, ``"1"`` for integers."""
    return str(Fraction(x))


def frac(x):
    """Fractional part in [0, 1)."""
    return x - floor(x)


def lcm(a, b):
    return a // gcd(a, b) * b
