"""Collections of cuts and their lifts to a square-tiled surface.

Planar coordinates put the marked point at the origin: a planar point ``P``
lifts to the endpoint of the straight segment of displacement ``P`` traced
from the marked point.  A cut segment starts at the lift of its planar start
point and has displacement ``length * (a, b)`` for its primitive slope vector
``(a, b)``, so lengths are measured in units of that vector.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

from .errors import LiftHitsSingularity
from .groups import GroupElement, GroupSpec
from .surface import SquareTiledSurface, SurfacePoint

DYADIC_DEN = 2 ** 32


@dataclass(frozen=True)
class Cut:
    """One pair of parallel congruent segments carrying values +g / -g."""

    start_plus: tuple[Fraction, Fraction]
    start_minus: tuple[Fraction, Fraction]
    slope: tuple[int, int]
    length: Fraction
    value: GroupElement

    def __post_init__(self):
        a, b = (int(c) for c in self.slope)
        if (a, b) == (0, 0):
            raise ValueError("cut slope must be a nonzero vector")
        g = gcd(abs(a), abs(b))
        object.__setattr__(self, "slope", (a // g, b // g))
        object.__setattr__(self, "length", Fraction(self.length))
        if self.length <= 0:
            raise ValueError("cut length must be positive")
        object.__setattr__(self, "start_plus", tuple(Fraction(c) for c in self.start_plus))
        object.__setattr__(self, "start_minus", tuple(Fraction(c) for c in self.start_minus))

    @property
    def displacement(self):
        a, b = self.slope
        return self.length * a, self.length * b


@dataclass(frozen=True)
class CutCollection:
    group: GroupSpec
    cuts: tuple[Cut, ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        if not self.cuts:
            raise ValueError("a cut collection needs at least one pair")

    def __len__(self):
        return len(self.cuts)

    @property
    def values(self):
        return [c.value for c in self.cuts]


@dataclass(frozen=True)
class Piece:
    """Part of a lifted segment inside one closed square, parameter range [t0, t1]."""

    square: int
    x0: Fraction
    y0: Fraction
    x1: Fraction
    y1: Fraction
    t0: Fraction
    t1: Fraction


@dataclass(frozen=True)
class LiftedSegment:
    cut_index: int
    sign: int
    value: GroupElement  # already signed
    slope: tuple[int, int]
    length: Fraction
    start: SurfacePoint
    end: SurfacePoint
    pieces: tuple[Piece, ...]

    def point_at(self, surface, t):
        """Surface point at arc parameter t (0 <= t <= length)."""
        for pc in self.pieces:
            if pc.t0 <= t <= pc.t1 and pc.t1 > pc.t0:
                r = (t - pc.t0) / (pc.t1 - pc.t0)
                return surface.normalize(pc.square, pc.x0 + r * (pc.x1 - pc.x0),
                                         pc.y0 + r * (pc.y1 - pc.y0))
        raise ValueError(f"parameter {t} outside the segment")


@dataclass(frozen=True)
class LiftedCuts:
    group: GroupSpec
    segments: tuple[LiftedSegment, ...]
    surface: SquareTiledSurface = field(repr=False)

    def drop_minus(self):
        """Unpaired variant keeping only the +g segments (breaks mean zero on purpose)."""
        return replace(self, segments=tuple(s for s in self.segments if s.sign > 0))

    def select(self, cut_indices):
        keep = set(cut_indices)
        return replace(self, segments=tuple(s for s in self.segments if s.cut_index in keep))

    def total_value(self):
        total = self.group.zero()
        for seg in self.segments:
            total = total + seg.value
        return total


def trace_segment(surface: SquareTiledSurface, start: SurfacePoint, dx, dy, *, what="segment"):
    """Trace displacement (dx, dy) from ``start``.

    Returns ``(end_point, pieces)`` with piece parameters in [0, 1] as the
    fraction of the displacement.  Regular vertices are passed through; a cone
    point anywhere on the closed segment raises LiftHitsSingularity.
    """
    dx, dy = Fraction(dx), Fraction(dy)
    s, x, y = start.square, start.x, start.y
    if surface.is_singular_point(s, x, y):
        raise LiftHitsSingularity(f"{what} starts at a cone point")
    h, hi, v, vi = surface.h, surface.h_inv, surface.v, surface.v_inv
    tau = Fraction(0)
    pieces = []
    while True:
        if dx > 0 and x == 1:
            s, x = h[s], Fraction(0)
        elif dx < 0 and x == 0:
            s, x = hi[s], Fraction(1)
        if dy > 0 and y == 1:
            s, y = v[s], Fraction(0)
        elif dy < 0 and y == 0:
            s, y = vi[s], Fraction(1)
        if tau == 1:
            break
        step = 1 - tau
        if dx > 0:
            step = min(step, (1 - x) / dx)
        elif dx < 0:
            step = min(step, x / -dx)
        if dy > 0:
            step = min(step, (1 - y) / dy)
        elif dy < 0:
            step = min(step, y / -dy)
        nx, ny = x + dx * step, y + dy * step
        pieces.append((s, x, y, nx, ny, tau, tau + step))
        x, y, tau = nx, ny, tau + step
        if surface.is_singular_point(s, x, y):
            raise LiftHitsSingularity(f"{what} runs into a cone point at parameter {tau}")
    return surface.normalize(s, x, y), pieces


def lift_point(surface: SquareTiledSurface, planar_point) -> SurfacePoint:
    """Lift a planar point along the straight segment from the marked point."""
    px, py = (Fraction(c) for c in planar_point)
    if px == 0 and py == 0:
        return surface.marked
    end, _ = trace_segment(surface, surface.marked, px, py, what="lift path")
    return end


def lift_segment(surface, start_planar, cut: Cut, sign, cut_index):
    start = lift_point(surface, start_planar)
    ddx, ddy = cut.displacement
    end, raw = trace_segment(surface, start, ddx, ddy, what=f"cut {cut_index}")
    pieces = tuple(Piece(s, x0, y0, x1, y1, t0 * cut.length, t1 * cut.length)
                   for s, x0, y0, x1, y1, t0, t1 in raw)
    value = cut.value if sign > 0 else -cut.value
    return LiftedSegment(cut_index, sign, value, cut.slope, cut.length, start, end, pieces)


def lift_cuts(surface: SquareTiledSurface, cuts: CutCollection) -> LiftedCuts:
    segs = []
    for i, cut in enumerate(cuts.cuts):
        for sign, planar in ((1, cut.start_plus), (-1, cut.start_minus)):
            try:
                segs.append(lift_segment(surface, planar, cut, sign, i))
            except LiftHitsSingularity as exc:
                raise LiftHitsSingularity(f"cut {i}: {exc}", cut_index=i) from None
    return LiftedCuts(cuts.group, tuple(segs), surface)


# -- sampling ----------------------------------------------------------------

SLOPE_BOUND = 4


def _dyadic(rng, lo, hi):
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randrange(DYADIC_DEN), DYADIC_DEN)


def _random_value(rng, group):
    while True:
        free = [rng.randint(-3, 3) for _ in range(group.free_rank)]
        tors = [rng.randrange(n) for n in group.torsion]
        g = group.element(free, tors)
        if not g.is_zero():
            return g


def sample_cuts(n, bounding_box=((0, 0), (1, 1)), length_range=(Fraction(1, 8), 1),
                group=None, seed=0, slopes=None) -> CutCollection:
    """Seeded random collection of ``n`` cut pairs with dyadic coordinates.

    Slopes are drawn from primitive vectors with entries bounded by
    SLOPE_BOUND unless ``slopes`` is given.
    """
    if n < 1:
        raise ValueError("need at least one cut pair")
    group = group or GroupSpec(1)
    rng = random.Random(seed)
    (x0, y0), (x1, y1) = bounding_box
    if slopes is None:
        slopes = [(a, b) for a in range(-SLOPE_BOUND, SLOPE_BOUND + 1)
                  for b in range(-SLOPE_BOUND, SLOPE_BOUND + 1)
                  if (a, b) != (0, 0) and gcd(abs(a), abs(b)) == 1]
    cuts = []
    for _ in range(n):
        sp = (_dyadic(rng, x0, x1), _dyadic(rng, y0, y1))
        sm = (_dyadic(rng, x0, x1), _dyadic(rng, y0, y1))
        slope = rng.choice(slopes)
        length = _dyadic(rng, *length_range)
        if length == 0:
            length = Fraction(1, DYADIC_DEN)
        cuts.append(Cut(sp, sm, slope, length, _random_value(rng, group)))
    return CutCollection(group, tuple(cuts))


def sample_liftable_cuts(surface, n, *, seed=0, max_tries=1000, **kwargs):
    """Sample until the collection lifts; returns (cuts, lifted, resamples)."""
    rng = random.Random(seed)
    for attempt in range(max_tries):
        cuts = sample_cuts(n, seed=rng.getrandbits(64), **kwargs)
        try:
            return cuts, lift_cuts(surface, cuts), attempt
        except LiftHitsSingularity:
            continue
    raise LiftHitsSingularity(f"no liftable sample in {max_tries} tries")
