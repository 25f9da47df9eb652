"""First-return interval exchanges on bottom-edge transversals and slow Rauzy induction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import DegenerateStep, NoValidTransversal, TransversalHitsSingularity
from .flow import RationalDirection
from .surface import SquareTiledSurface, stratum


@dataclass(frozen=True)
class IET:
    """Interval exchange on [0, total).

    Intervals are listed left to right in the domain; ``permutation[i]`` is
    the position of interval ``i`` in the left-to-right order of the images.
    """

    lengths: tuple[Fraction, ...]
    permutation: tuple[int, ...]
    total: Fraction
    return_heights: tuple[int, ...]

    def __post_init__(self):
        n = len(self.lengths)
        if sorted(self.permutation) != list(range(n)):
            raise ValueError("permutation is not a bijection")
        if any(lam <= 0 for lam in self.lengths):
            raise ValueError("interval lengths must be positive")
        if sum(self.lengths, Fraction(0)) != self.total:
            raise ValueError("lengths do not sum to the total")
        if len(self.return_heights) != n:
            raise ValueError("one return height per interval")

    def __len__(self):
        return len(self.lengths)

    def domain_starts(self):
        out, acc = [], Fraction(0)
        for lam in self.lengths:
            out.append(acc)
            acc += lam
        return out

    def image_starts(self):
        order = sorted(range(len(self)), key=lambda i: self.permutation[i])
        out = [Fraction(0)] * len(self)
        acc = Fraction(0)
        for i in order:
            out[i] = acc
            acc += self.lengths[i]
        return out

    def __call__(self, x):
        x = Fraction(x)
        if not 0 <= x < self.total:
            raise ValueError(f"{x} outside [0, {self.total})")
        for a, b, lam in zip(self.domain_starts(), self.image_starts(), self.lengths):
            if a <= x < a + lam:
                return b + (x - a)
        raise AssertionError("unreachable")

    def top(self):
        return list(range(len(self)))

    def bottom(self):
        return sorted(range(len(self)), key=lambda i: self.permutation[i])


def _from_rows(top, bottom, lengths, heights):
    total = sum((lengths[a] for a in top), Fraction(0))
    pos = {a: i for i, a in enumerate(bottom)}
    return IET(tuple(lengths[a] for a in top), tuple(pos[a] for a in top), total,
               tuple(heights[a] for a in top))


def rauzy_step(iet: IET) -> IET:
    """One step of slow Rauzy induction, inducing on [0, total - min(last lengths))."""
    if len(iet) < 2:
        raise DegenerateStep("Rauzy induction needs at least two intervals")
    top, bottom = iet.top(), iet.bottom()
    lengths = dict(enumerate(iet.lengths))
    heights = dict(enumerate(iet.return_heights))
    a, b = top[-1], bottom[-1]
    if lengths[a] == lengths[b]:
        raise DegenerateStep(
            f"competing intervals have equal length {lengths[a]} (saddle connection)")
    if lengths[a] > lengths[b]:
        lengths[a] -= lengths[b]
        heights[b] += heights[a]
        bottom.remove(b)
        bottom.insert(bottom.index(a) + 1, b)
    else:
        lengths[b] -= lengths[a]
        heights[a] += heights[b]
        top.remove(a)
        top.insert(top.index(b) + 1, a)
    return _from_rows(top, bottom, lengths, heights)


# -- first return ------------------------------------------------------------

@dataclass
class _Piece:
    olo: Fraction
    ohi: Fraction
    square: int
    lo: Fraction
    hi: Fraction


def _level_image(surface, piece, slope, cut):
    """Image of a bottom-edge piece under the level map, split at ``cut``."""
    parts = [(piece.lo, piece.hi)]
    if cut and piece.lo < cut < piece.hi:
        parts = [(piece.lo, cut), (cut, piece.hi)]
    out = []
    for lo, hi in parts:
        top = lo + slope
        m = floor(top)
        s = surface.v[surface.h_pow(m, piece.square)]
        shift = piece.olo - piece.lo
        out.append(_Piece(lo + shift, hi + shift, s, top - m, hi + slope - m))
    return out


def first_return_iet(surface: SquareTiledSurface, direction: RationalDirection,
                     transversal, *, strict=False) -> IET:
    """First-return map of the level flow to ``(square, lo, hi)`` on a bottom edge.

    Discontinuities coming from cone points are kept even when the two sides
    return next to each other.  With ``strict`` any orbit meeting a cone
    point before returning raises TransversalHitsSingularity.
    """
    s0, lo, hi = transversal
    lo, hi = Fraction(lo), Fraction(hi)
    if not (0 <= s0 < surface.k and 0 <= lo < hi <= 1):
        raise ValueError(f"bad transversal {transversal}")
    slope = direction.slope
    cut = (-slope) % 1
    active = [_Piece(lo, hi, s0, lo, hi)]
    returned = []  # (olo, ohi, ilo, height)
    hard = set()
    height = 0
    bound = surface.k * direction.q + 1
    while active:
        height += 1
        if height > bound:
            raise AssertionError("first return time exceeds the period bound")
        nxt = []
        for pc in active:
            for im in _level_image(surface, pc, slope, cut):
                if im.lo == 0 and surface.singular_square[im.square]:
                    if strict:
                        raise TransversalHitsSingularity(
                            f"orbit of {im.olo} meets a cone point after {height} levels")
                    hard.add(im.olo)
                if im.square != s0 or im.hi <= lo or im.lo >= hi:
                    nxt.append(im)
                    continue
                shift = im.olo - im.lo
                a, b = max(im.lo, lo), min(im.hi, hi)
                returned.append((a + shift, b + shift, a, height))
                if im.lo < lo:
                    nxt.append(_Piece(im.olo, lo + shift, im.square, im.lo, lo))
                if im.hi > hi:
                    nxt.append(_Piece(hi + shift, im.ohi, im.square, hi, im.hi))
        active = nxt
    returned.sort()
    merged = []
    for olo, ohi, ilo, ht in returned:
        if merged:
            plo, phi, pilo, pht = merged[-1]
            if (phi == olo and pht == ht and pilo + (phi - plo) == ilo
                    and olo not in hard):
                merged[-1] = (plo, ohi, pilo, pht)
                continue
        merged.append((olo, ohi, ilo, ht))
    order = sorted(range(len(merged)), key=lambda i: merged[i][2])
    perm = [0] * len(merged)
    for rank, i in enumerate(order):
        perm[i] = rank
    return IET(tuple(ohi - olo for olo, ohi, _, _ in merged), tuple(perm), hi - lo,
               tuple(ht for *_, ht in merged))


# -- convention shortening ---------------------------------------------------

@dataclass(frozen=True)
class ConventionResult:
    transversal: tuple[int, Fraction, Fraction]
    iet: IET
    target: int
    achieved: bool
    steps: int
    stop_reason: str


def convention_target(surface, prong_square):
    """2g + n - 1, counting the prong vertex as a marked point when it is regular."""
    sig = stratum(surface)
    n = sig.n + (0 if surface.singular_square[prong_square] else 1)
    return 2 * sig.genus + n - 1


def shorten_to_convention(surface: SquareTiledSurface, direction: RationalDirection,
                          prong_square: int, *, stop_length=0, max_steps=10_000):
    """Shrink ``[0, 1)`` on the bottom edge of ``prong_square`` by slow Rauzy induction.

    The left endpoint stays at the vertex in the lower-left corner of the
    square.  Returns the shortest transversal whose first-return map has the
    target interval count, or the last one reached if none does.
    """
    if not 0 <= prong_square < surface.k:
        raise NoValidTransversal(f"no square {prong_square}")
    stop_length = Fraction(stop_length)
    if stop_length >= 1:
        raise NoValidTransversal("stop length leaves no admissible transversal")
    target = convention_target(surface, prong_square)
    length = Fraction(1)
    iet = first_return_iet(surface, direction, (prong_square, 0, length))
    best = None
    reason = "max_steps"
    for step in range(max_steps + 1):
        if len(iet) == target:
            best = ((prong_square, Fraction(0), length), iet, step)
        try:
            nxt = rauzy_step(iet)
        except DegenerateStep:
            reason = "degenerate"
            break
        if nxt.total < stop_length:
            reason = "stop_length"
            break
        length = nxt.total
        iet = first_return_iet(surface, direction, (prong_square, 0, length))
    else:
        step = max_steps
    if best is None:
        return ConventionResult((prong_square, Fraction(0), length), iet, target,
                                False, step, reason)
    return ConventionResult(best[0], best[1], target, True, best[2], reason)
