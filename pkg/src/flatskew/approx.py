"""Approximate (floating point) flow for irrational slopes.

Exploratory only.  Every run is replayed at higher precision with mpmath
and the two square itineraries are compared; a mismatch means the double
precision answer cannot be trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .surface import SquareTiledSurface


@dataclass(frozen=True)
class ApproxRun:
    square: int
    x: float
    y: float
    itinerary: tuple[int, ...]
    trusted: bool


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _run(surface, square, x, slope, levels, floor):
    itinerary = [square]
    for _ in range(levels):
        top = x + slope
        m = int(floor(top))
        square = surface.v[surface.h_pow(m, square)]
        x = top - m
        itinerary.append(square)
        if x == 0 and surface.singular_square[square]:
            break
    return square, x, itinerary


def approx_flow(surface: SquareTiledSurface, square, x, slope, levels, *, digits=50):
    """Flow the bottom point (square, x) for whole levels at slope dx/dy = ``slope``.

    ``slope`` may be an mpmath number or decimal string so the replay sees
    more digits than the double run.
    """
    sq, xf, itin = _run(surface, square, float(x), float(slope), levels, math.floor)
    with mpmath.workdps(digits):
        _, _, ref = _run(surface, square, _mp(x), _mp(slope), levels,
                         mpmath.floor)
    return ApproxRun(sq, xf, 0.0, tuple(itin), tuple(itin) == tuple(ref))


def golden_slope(digits=50):
    with mpmath.workdps(digits):
        return (mpmath.sqrt(5) - 1) / 2
