"""Exact straight-line flow in rational directions and cylinder decompositions.

Time is measured in *levels*: one unit of time raises ``y`` by one, so the
velocity in direction (p, q) is (p/q, 1).  Euclidean time is this times
``sqrt(p**2 + q**2) / q``.

Most computations go through the level map on the union of bottom edges,
``(s, x) -> (v(h^m(s)), frac(x + p/q))`` with ``m = floor(x + p/q)``, which
records where a trajectory leaving the bottom edge of ``s`` at ``x`` enters
the next bottom edge.  A point ``(s, x, y)`` lies on the level trajectory of
the bottom point obtained by sliding it back along the flow to ``y = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd

from .errors import SchemaError, StartAtSingularity
from .surface import SquareTiledSurface, SurfacePoint


@dataclass(frozen=True, order=True)
class RationalDirection:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("direction needs q >= 1")
        if gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"direction ({self.p},{self.q}) is not primitive")

    @classmethod
    def parse(cls, text):
        """``"p/q"`` -> direction (p, q); non-primitive input is reduced."""
        try:
            num, _, den = str(text).partition("/")
            p, q = int(num), int(den or 1)
        except ValueError:
            raise SchemaError(f"malformed direction {text!r}") from None
        if q <= 0:
            raise SchemaError(f"direction {text!r} needs a positive denominator")
        g = gcd(abs(p), q)
        return cls(p // g, q // g)

    @property
    def slope(self):
        """Horizontal displacement per level, p/q."""
        return Fraction(self.p, self.q)

    def euclidean_factor(self):
        """Euclidean length of one level of flow (approximate, display only)."""
        return (self.p ** 2 + self.q ** 2) ** 0.5 / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


# -- level coordinates -----------------------------------------------------

def to_level(surface, s, x, y, slope):
    """Slide (s, x, y) back along the flow to its level start (s0, x0)."""
    xi = x - slope * y
    f = floor(xi)
    return surface.h_pow(f, s), xi - f


def from_level(surface, s0, x0, y, slope):
    """Point at height ``y`` on the level trajectory starting at (s0, x0)."""
    xi = x0 + slope * y
    j = floor(xi)
    return SurfacePoint(surface.h_pow(j, s0), xi - j, y)


def level_step(surface, s0, x0, slope):
    """Image of a bottom point under the level map."""
    top = x0 + slope
    m = floor(top)
    return surface.v[surface.h_pow(m, s0)], top - m


@dataclass(frozen=True)
class FlowResult:
    end_point: SurfacePoint | None = None
    hit_time: Fraction | None = None
    hit_vertex: int | None = None

    @property
    def hit_singularity(self):
        return self.end_point is None


def flow(surface: SquareTiledSurface, x: SurfacePoint, direction: RationalDirection,
         t) -> FlowResult:
    """Flow ``x`` for time ``t`` (in levels), or report the first cone point met."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("flow time must be non-negative")
    slope = direction.slope
    if surface.is_singular_point(x.square, x.x, x.y):
        raise StartAtSingularity(f"start point {x} is a cone point")
    s0, x0 = to_level(surface, x.square, x.x, x.y, slope)
    y = x.y
    elapsed = Fraction(0)
    while True:
        rem = t - elapsed
        if y + rem < 1:
            return FlowResult(from_level(surface, s0, x0, y + rem, slope))
        elapsed += 1 - y
        s0, x0 = level_step(surface, s0, x0, slope)
        y = Fraction(0)
        if x0 == 0 and surface.singular_square[s0]:
            return FlowResult(None, elapsed, surface.vertex_of_square[s0])


# -- cylinders ---------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    """A maximal periodic cylinder.

    ``crossings`` is the period in levels, ``width`` the horizontal measure
    of a cross-section.  The bottom edges are cut into atoms
    ``(s, j) = (j/q, (j+1)/q)`` of square ``s``; ``cross_section`` is a
    left-to-right run of atoms forming one horizontal segment that meets
    every closed orbit of the cylinder once.

    Every vertex bounds cylinders, regular ones included: the corners of the
    squares are the marked preimages of the torus corner.
    """

    crossings: int
    width: Fraction
    transversal_intervals: tuple[tuple[int, Fraction, Fraction], ...]
    direction: RationalDirection
    cross_section: tuple[tuple[int, int], ...]
    orbits: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False, compare=False)

    @property
    def area(self):
        return self.crossings * self.width

    def atom_position(self):
        """Map atom -> (cross-section index, level index along the orbit)."""
        pos = {}
        for i, orbit in enumerate(self.orbits):
            for n, atom in enumerate(orbit):
                pos[atom] = (i, n)
        return pos


def atom_map(surface, direction):
    """Level map on atoms (s, j); also the map on the grid points (s, j/q)."""
    p, q = direction.p, direction.q
    out = {}
    for s in range(surface.k):
        for j in range(q):
            m, jj = divmod(j + p, q)
            out[(s, j)] = (surface.v[surface.h_pow(m, s)], jj)
    return out


def _cycles(perm):
    seen = set()
    cycles = []
    for a in sorted(perm):
        if a in seen:
            continue
        cyc = []
        b = a
        while b not in seen:
            seen.add(b)
            cyc.append(b)
            b = perm[b]
        cycles.append(cyc)
    return cycles


def _left_atom(surface, q, s, j):
    return (s, j - 1) if j > 0 else (surface.h_inv[s], q - 1)


def _right_atom(surface, q, s, j):
    return (s, j + 1) if j + 1 < q else (surface.h[s], 0)


def cylinder_decomposition(surface: SquareTiledSurface,
                           direction: RationalDirection) -> list[Cylinder]:
    q = direction.q
    sigma = atom_map(surface, direction)
    cycles = _cycles(sigma)
    cycle_of = {}
    for ci, cyc in enumerate(cycles):
        for a in cyc:
            cycle_of[a] = ci
    # a grid point orbit is a cylinder boundary iff it meets a vertex
    singular_cycle = [any(j == 0 for _, j in cyc) for cyc in cycles]

    parent = list(range(len(cycles)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for ci, cyc in enumerate(cycles):
        if singular_cycle[ci]:
            continue
        for s, j in cyc:
            a = find(cycle_of[_left_atom(surface, q, s, j)])
            b = find(cycle_of[(s, j)])
            if a != b:
                parent[a] = b

    groups = {}
    for ci in range(len(cycles)):
        groups.setdefault(find(ci), []).append(ci)

    cylinders = []
    for members in groups.values():
        lengths = {len(cycles[ci]) for ci in members}
        if len(lengths) != 1:
            raise AssertionError("cycles of one cylinder have different periods")
        c = lengths.pop()
        member_set = set(members)
        # start the cross-section at an atom whose left edge is a boundary
        start = None
        for ci in members:
            for s, j in cycles[ci]:
                if singular_cycle[cycle_of[(s, j)]]:
                    if start is None or (s, j) < start:
                        start = (s, j)
        if start is None:
            start = min(a for ci in members for a in cycles[ci])
        section = [start]
        used = {cycle_of[start]}
        cur = start
        while True:
            nxt = _right_atom(surface, q, *cur)
            if singular_cycle[cycle_of[nxt]] or cycle_of[nxt] in used:
                break
            if cycle_of[nxt] not in member_set:
                raise AssertionError("cross-section left its cylinder")
            used.add(cycle_of[nxt])
            section.append(nxt)
            cur = nxt
        if len(section) != len(members):
            raise AssertionError("cross-section does not meet every orbit once")
        orbits = []
        for a in section:
            orb = [a]
            b = sigma[a]
            while b != a:
                orb.append(b)
                b = sigma[b]
            orbits.append(tuple(orb))
        atoms = sorted(a for orb in orbits for a in orb)
        intervals = []
        for s, j in atoms:
            lo, hi = Fraction(j, q), Fraction(j + 1, q)
            if intervals and intervals[-1][0] == s and intervals[-1][2] == lo:
                intervals[-1] = (s, intervals[-1][1], hi)
            else:
                intervals.append((s, lo, hi))
        cylinders.append(Cylinder(c, Fraction(len(members), q), tuple(intervals),
                                  direction, tuple(section), tuple(orbits)))
    cylinders.sort(key=lambda cyl: (cyl.transversal_intervals[0][0],
                                    cyl.transversal_intervals[0][1]))
    return cylinders


def is_single_cylinder(surface, direction):
    return len(cylinder_decomposition(surface, direction)) == 1
