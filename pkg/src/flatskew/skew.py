"""Ergodic sums of cut cocycles, skew-product orbits and transversal profiles.

For a fixed direction every lifted cut segment is pushed back along the flow
onto the bottom edges: the point at height ``y`` on the level trajectory
starting at bottom point ``(s0, x0)`` crosses the cut exactly when
``(s0, x0)`` lies in one of the segment's *bands*.  Summing band values over
the bottom point of each level gives the ergodic sum level by level, and
pushing bands around a cylinder's return dynamics gives the exact profile
``x -> S_c(x)`` over a cross-section.

Crossings are counted without orientation; time intervals are half-open.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from . import kernel
from .cuts import LiftedCuts
from .errors import (CutEndpointOnTransversalOrbit, DirectionParallelToCut,
                     StartAtSingularity, TrajectoryHitsCutEndpoint,
                     TrajectoryHitsSingularity)
from .flow import (Cylinder, RationalDirection, atom_map, from_level, level_step,
                   to_level)
from .groups import GroupElement
from .rational import lcm
from .surface import SquareTiledSurface, SurfacePoint


@dataclass(frozen=True)
class Band:
    """Bottom points of ``square`` whose level trajectory crosses a segment.

    Open interval (lo, hi), or the single point lo when ``lo == hi``; the
    crossing height is affine in x0, ``y_lo`` at lo and ``y_hi`` at hi.
    """

    square: int
    lo: Fraction
    hi: Fraction
    y_lo: Fraction
    y_hi: Fraction
    value: tuple[int, ...]
    segment: int

    def contains(self, x0):
        if self.lo == self.hi:
            return x0 == self.lo
        return self.lo < x0 < self.hi

    def height_at(self, x0):
        if self.lo == self.hi:
            return self.y_lo
        return self.y_lo + (x0 - self.lo) * (self.y_hi - self.y_lo) / (self.hi - self.lo)

    @property
    def is_point(self):
        return self.lo == self.hi


@dataclass(frozen=True)
class Endpoint:
    square: int
    x0: Fraction
    y: Fraction
    segment: int
    at_start: bool


def projected_displacement(slope, length, direction):
    """Horizontal extent, along the flow, of a segment: length * (a - b*p/q)."""
    a, b = slope
    return length * (a - b * direction.slope)


def build_bands(surface: SquareTiledSurface, lifted: LiftedCuts, direction: RationalDirection):
    """All bands and cut endpoints of ``lifted`` for ``direction``."""
    p, q = direction.p, direction.q
    slope = direction.slope
    h, v = surface.h, surface.v
    bands, endpoints = [], []
    for idx, seg in enumerate(lifted.segments):
        a, b = seg.slope
        if a * q - b * p == 0:
            raise DirectionParallelToCut(
                f"direction {direction} is parallel to cut {seg.cut_index}")
        vec = seg.value.as_vector()
        marks = {}
        for pc in seg.pieces:
            marks.setdefault(pc.t0, (pc.square, pc.x0, pc.y0))
            marks.setdefault(pc.t1, (pc.square, pc.x1, pc.y1))
            if pc.t1 == pc.t0:
                continue
            s, x0, y0, x1, y1 = pc.square, pc.x0, pc.y0, pc.x1, pc.y1
            # pieces running along a right or top edge belong to the neighbour
            if x0 == x1 == 1:
                s, x0, x1 = h[s], x0 - 1, x1 - 1
            if y0 == y1 == 1:
                s, y0, y1 = v[s], y0 - 1, y1 - 1
            xi0, xi1 = x0 - slope * y0, x1 - slope * y1
            cuts = [xi0, xi1] if xi0 < xi1 else [xi1, xi0]
            inner = list(range(floor(cuts[0]) + 1, ceil(cuts[1])))
            knots = [cuts[0], *map(Fraction, inner), cuts[1]]
            dxi = xi1 - xi0

            def y_at(xi):
                return y0 + (xi - xi0) / dxi * (y1 - y0)

            for lo, hi in zip(knots, knots[1:]):
                f = floor(lo)
                s0 = surface.h_pow(f, s)
                bands.append(Band(s0, lo - f, hi - f, y_at(lo), y_at(hi), vec, idx))
            for n in inner:
                r = (n - xi0) / dxi
                t = pc.t0 + r * (pc.t1 - pc.t0)
                marks.setdefault(t, (s, x0 + r * (x1 - x0), y0 + r * (y1 - y0)))
        for t, (s, x, y) in marks.items():
            pt = surface.normalize(s, x, y)
            s0, xx0 = to_level(surface, pt.square, pt.x, pt.y, slope)
            if t == 0 or t == seg.length:
                endpoints.append(Endpoint(s0, xx0, pt.y, idx, t == 0))
            else:
                bands.append(Band(s0, xx0, xx0, pt.y, pt.y, vec, idx))
    return bands, endpoints


class SkewContext:
    """Precomputed band data for one (surface, lifted cuts, direction)."""

    def __init__(self, surface: SquareTiledSurface, lifted: LiftedCuts,
                 direction: RationalDirection):
        self.surface = surface
        self.lifted = lifted
        self.group = lifted.group
        self.direction = direction
        self.slope = direction.slope
        self.bands, self.endpoints = build_bands(surface, lifted, direction)
        self.by_square = [[] for _ in range(surface.k)]
        for bd in self.bands:
            self.by_square[bd.square].append(bd)
        self.ends_by_square = [[] for _ in range(surface.k)]
        for e in self.endpoints:
            self.ends_by_square[e.square].append(e)
        L = direction.q
        for bd in self.bands:
            L = lcm(lcm(L, bd.lo.denominator), bd.hi.denominator)
        for e in self.endpoints:
            L = lcm(L, e.x0.denominator)
        self.base_L = L
        self._tables = {}

    def zero_vec(self):
        return [0] * self.group.dim

    def element(self, vec):
        return self.group.from_vector(vec)

    def table(self, L):
        if L in self._tables:
            return self._tables[L]
        surface, dim = self.surface, self.group.dim
        events = [dict() for _ in range(surface.k)]

        def add(s, key, vec, sign):
            cur = events[s].setdefault(key, [0] * dim)
            for c in range(dim):
                cur[c] += sign * vec[c]

        for bd in self.bands:
            lo, hi = bd.lo * L, bd.hi * L
            if bd.is_point:
                add(bd.square, 2 * int(lo), bd.value, 1)
                add(bd.square, 2 * int(lo) + 1, bd.value, -1)
            else:
                add(bd.square, 2 * int(lo) + 1, bd.value, 1)
                add(bd.square, 2 * int(hi), bd.value, -1)
        moduli = self.group.torsion
        fr = self.group.free_rank
        breaks, vals = [], []
        for s in range(surface.k):
            keys = sorted(events[s])
            run = [0] * dim
            row_keys, row_vals = [], []
            for key in keys:
                run = [a + b for a, b in zip(run, events[s][key])]
                for j, n in enumerate(moduli):
                    run[fr + j] %= n
                row_keys.append(key)
                row_vals.append(tuple(run))
            breaks.append(row_keys)
            vals.append(row_vals)
        p, q = self.direction.p, self.direction.q
        P = p * (L // q)
        m0 = P // L
        nxt0 = [surface.v[surface.h_pow(m0, s)] for s in range(surface.k)]
        nxt1 = [surface.v[surface.h_pow(m0 + 1, s)] for s in range(surface.k)]
        ends = {(e.square, int(e.x0 * L)) for e in self.endpoints}
        tbl = kernel.LevelTable(L, P, nxt0, nxt1, breaks, vals, dim, ends,
                                list(surface.singular_square))
        self._tables[L] = tbl
        return tbl

    # -- stepping ---------------------------------------------------------

    def partial(self, s0, x0, ya, yb, acc):
        """Add crossings at heights in [ya, yb) on the level starting at (s0, x0)."""
        for e in self.ends_by_square[s0]:
            if e.x0 == x0 and ya <= e.y < yb:
                raise TrajectoryHitsCutEndpoint(
                    f"trajectory meets an endpoint of segment {e.segment}")
        for bd in self.by_square[s0]:
            if bd.contains(x0):
                y = bd.height_at(x0)
                if ya <= y < yb:
                    for c, val in enumerate(bd.value):
                        acc[c] += val

    def advance(self, s0, x0, y, t, *, force_python=False):
        """Flow the level-coordinate state (s0, x0, y) for time t.

        Returns ``(acc_vector, (s0, x0, y))``.
        """
        t = Fraction(t)
        if t < 0:
            raise ValueError("time must be non-negative")
        acc = self.zero_vec()
        if t == 0:
            return acc, (s0, x0, y)
        surface = self.surface
        elapsed = Fraction(0)
        if y > 0 or y + t < 1:
            top = min(y + t, Fraction(1))
            self.partial(s0, x0, y, top, acc)
            if y + t < 1:
                return acc, (s0, x0, y + t)
            elapsed = 1 - y
            s0, x0 = level_step(surface, s0, x0, self.slope)
            y = Fraction(0)
            if x0 == 0 and surface.singular_square[s0]:
                raise TrajectoryHitsSingularity(
                    f"trajectory hits a cone point at time {elapsed}", time=elapsed)
        rest = t - elapsed
        full = floor(rest)
        if full:
            L = lcm(self.base_L, x0.denominator)
            tbl = self.table(L)
            vec, s0, X, status, done = kernel.run_levels(tbl, full, s0, int(x0 * L),
                                                         force_python=force_python)
            for c in range(len(acc)):
                acc[c] += vec[c]
            x0 = Fraction(X, L)
            if status == kernel.HIT_ENDPOINT:
                raise TrajectoryHitsCutEndpoint(
                    f"trajectory meets a cut endpoint during level {elapsed + done}")
            if status == kernel.HIT_SINGULAR:
                when = elapsed + done
                raise TrajectoryHitsSingularity(
                    f"trajectory hits a cone point at time {when}", time=when)
        frac_part = rest - full
        if frac_part:
            self.partial(s0, x0, Fraction(0), frac_part, acc)
            y = frac_part
        return self._reduce(acc), (s0, x0, y)

    def _reduce(self, acc):
        fr = self.group.free_rank
        for j, n in enumerate(self.group.torsion):
            acc[fr + j] %= n
        return acc

    def start_state(self, x: SurfacePoint):
        if self.surface.is_singular_point(x.square, x.x, x.y):
            raise StartAtSingularity(f"start point {x} is a cone point")
        s0, x0 = to_level(self.surface, x.square, x.x, x.y, self.slope)
        return s0, x0, x.y

    def point(self, state):
        s0, x0, y = state
        return from_level(self.surface, s0, x0, y, self.slope)


_CONTEXTS = {}


def context(surface, lifted, direction) -> SkewContext:
    key = (id(lifted), surface, direction)
    ctx = _CONTEXTS.get(key)
    if ctx is None or ctx.lifted is not lifted:
        if len(_CONTEXTS) > 64:
            _CONTEXTS.clear()
        ctx = SkewContext(surface, lifted, direction)
        _CONTEXTS[key] = ctx
    return ctx


def ergodic_sum(surface, lifted, x: SurfacePoint, direction: RationalDirection, t) -> GroupElement:
    """Sum of cut values met by the trajectory of ``x`` during [0, t)."""
    ctx = context(surface, lifted, direction)
    acc, _ = ctx.advance(*ctx.start_state(x), t)
    return ctx.element(acc)


def ergodic_sum_and_endpoint(surface, lifted, x, direction, t):
    ctx = context(surface, lifted, direction)
    acc, state = ctx.advance(*ctx.start_state(x), t)
    return ctx.element(acc), ctx.point(state)


def skew_orbit(surface, lifted, x, g0: GroupElement, direction, t, sample_times):
    """Samples ``(phi_s(x), g0 + S_s(x))`` of the skew flow at the given times."""
    t = Fraction(t)
    times = sorted(Fraction(s) for s in sample_times)
    if times and (times[0] < 0 or times[-1] > t):
        raise ValueError("sample times must lie in [0, t]")
    ctx = context(surface, lifted, direction)
    state = ctx.start_state(x)
    fiber = g0
    now = Fraction(0)
    out = []
    for s in times:
        acc, state = ctx.advance(*state, s - now)
        fiber = fiber + ctx.element(acc)
        now = s
        out.append((ctx.point(state), fiber))
    return out


# -- transversal profiles ----------------------------------------------------

@dataclass(frozen=True)
class SumProfile:
    """Piecewise-constant ``u -> S_c`` over a cylinder cross-section.

    ``u`` runs over [0, width); piece ``i`` is the open interval between
    ``breakpoints[i]`` and ``breakpoints[i+1]``.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[GroupElement, ...]
    period: int
    cylinder: Cylinder

    @property
    def width(self):
        return self.breakpoints[-1] - self.breakpoints[0]

    def pieces(self):
        return [(a, b, g) for a, b, g in zip(self.breakpoints, self.breakpoints[1:], self.values)]

    def value_at(self, u):
        for a, b, g in self.pieces():
            if a < u < b:
                return g
        raise ValueError(f"{u} is a breakpoint or outside the cross-section")

    def measure_where(self, pred):
        return sum((b - a for a, b, g in self.pieces() if pred(g)), Fraction(0))

    def integral(self):
        """Exact integral of the free part, one Fraction per free coordinate."""
        if not self.values:
            return ()
        rank = len(self.values[0].free)
        out = [Fraction(0)] * rank
        for a, b, g in self.pieces():
            for i in range(rank):
                out[i] += (b - a) * g.free[i]
        return tuple(out)

    def torsion_weights(self):
        """Measure of each torsion residue vector."""
        w = {}
        for a, b, g in self.pieces():
            w[g.torsion] = w.get(g.torsion, Fraction(0)) + (b - a)
        return w

    def point_at(self, u):
        """Bottom-edge surface point at cross-section coordinate u."""
        q = self.cylinder.direction.q
        i = floor(u * q)
        s, j = self.cylinder.cross_section[i]
        return SurfacePoint(s, Fraction(j, q) + (u - Fraction(i, q)), Fraction(0))

    def position_of(self, s0, x0):
        """Cross-section coordinate of bottom point (s0, x0), None if outside."""
        q = self.cylinder.direction.q
        j = floor(x0 * q)
        pos = self.cylinder.atom_position().get((s0, j))
        if pos is None:
            return None
        return Fraction(pos[0], q) + (x0 - Fraction(j, q))


def _on_boundary_orbit(surface, direction, s, j):
    sigma = atom_map(surface, direction)
    a = (s, j)
    b = a
    while True:
        # orbits through regular vertices only bound cylinders by convention
        if b[1] == 0 and surface.singular_square[b[0]]:
            return True
        b = sigma[b]
        if b == a:
            return False


def transversal_sum_profile(surface, lifted, cyl: Cylinder, direction) -> SumProfile:
    """Exact profile of the ergodic sum over one period of the cylinder."""
    ctx = context(surface, lifted, direction)
    q = direction.q
    pos = cyl.atom_position()
    group = lifted.group
    for e in ctx.endpoints:
        if (e.x0 * q).denominator == 1:
            j = int(e.x0 * q)
            left = (e.square, j - 1) if j > 0 else (surface.h_inv[e.square], q - 1)
            if ((e.square, j) in pos or left in pos) and _on_boundary_orbit(
                    surface, direction, e.square, j % q):
                raise CutEndpointOnTransversalOrbit(
                    f"endpoint of segment {e.segment} lies on a saddle connection bounding the cylinder",
                    breakpoint=(e.square, e.x0))
    events = {}
    dim = group.dim

    def add(u, vec, sign):
        cur = events.setdefault(u, [0] * dim)
        for c in range(dim):
            cur[c] += sign * vec[c]

    for bd in ctx.bands:
        if bd.is_point:
            continue
        j_lo = floor(bd.lo * q)
        j_hi = ceil(bd.hi * q)
        for j in range(j_lo, j_hi):
            where = pos.get((bd.square, j))
            if where is None:
                continue
            shift = Fraction(where[0] - j, q)
            lo = max(bd.lo, Fraction(j, q))
            hi = min(bd.hi, Fraction(j + 1, q))
            if lo < hi:
                add(lo + shift, bd.value, 1)
                add(hi + shift, bd.value, -1)
    width = cyl.width
    keys = sorted(set(events) | {Fraction(0), width})
    fr = group.free_rank
    run = [0] * dim
    bps, vals = [], []
    for u in keys:
        if u in events:
            run = [a + b for a, b in zip(run, events[u])]
            for j, n in enumerate(group.torsion):
                run[fr + j] %= n
        if u >= width:
            break
        val = group.from_vector(run)
        if vals and vals[-1] == val:
            continue
        bps.append(u)
        vals.append(val)
    bps.append(width)
    return SumProfile(tuple(bps), tuple(vals), cyl.crossings, cyl)


def crossing_rate(surface, lifted, direction):
    """Expected sum gained per level by a uniformly random point (free part)."""
    out = [Fraction(0)] * lifted.group.free_rank
    for seg in lifted.segments:
        w = abs(projected_displacement(seg.slope, seg.length, direction))
        for i, g in enumerate(seg.value.free):
            out[i] += w * g / surface.k
    return tuple(out)
