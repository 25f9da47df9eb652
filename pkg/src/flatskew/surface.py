"""Square-tiled surfaces: construction, vertices, cone angles, strata.

A surface with ``k`` unit squares is encoded by two permutations of
``range(k)``: ``h[i]`` is the square glued to the right of square ``i`` and
``v[i]`` the square glued on top of it.  Every corner of every square is the
image of some vertex; vertices whose cone angle exceeds ``2*pi`` are the
singularities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import Disconnected, MarkedPointOnSingularity, NotAPermutation

CORNERS = ("BL", "BR", "TL", "TR")

DEFAULT_MARKED = (0, Fraction(3, 7), Fraction(3, 11))


@dataclass(frozen=True, order=True)
class SurfacePoint:
    square: int
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if not (0 <= self.x < 1 and 0 <= self.y < 1):
            raise ValueError(f"coordinates must lie in [0,1): {self.x}, {self.y}")

    def __str__(self):
        return f"({self.square}; {self.x}, {self.y})"


@dataclass(frozen=True)
class StratumSignature:
    orders: tuple[int, ...]
    genus: int
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(sorted(self.orders, reverse=True)))
        object.__setattr__(self, "n", len(self.orders))

    @property
    def label(self):
        if not self.orders:
            return "H()"
        return "H(" + ", ".join(map(str, self.orders)) + ")"

    @property
    def convention_interval_count(self):
        """Minimal number of exchanged intervals, sum(d_j + 1) + 1."""
        return sum(d + 1 for d in self.orders) + 1


@dataclass(frozen=True)
class VertexClass:
    """One vertex of the surface: the corners glued to it and its cone angle.

    ``multiplicity`` is L with cone angle 2*pi*L; the order is L - 1.
    """

    index: int
    squares: tuple[int, ...]  # squares whose bottom-left corner is this vertex
    corners: frozenset
    multiplicity: int

    @property
    def order(self):
        return self.multiplicity - 1

    @property
    def singular(self):
        return self.multiplicity > 1


def _check_perm(k, perm, name):
    perm = tuple(int(i) for i in perm)
    if len(perm) != k or sorted(perm) != list(range(k)):
        raise NotAPermutation(f"{name} is not a permutation of 0..{k - 1}: {list(perm)}")
    return perm


def _inverse(perm):
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


def perm_from_cycles(k, cycles):
    """Image array of the permutation of ``range(k)`` with the given cycles."""
    img = list(range(k))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return img


@dataclass(frozen=True, eq=False)
class SquareTiledSurface:
    k: int
    h: tuple[int, ...]
    v: tuple[int, ...]
    marked: SurfacePoint

    def __eq__(self, other):
        if not isinstance(other, SquareTiledSurface):
            return NotImplemented
        return (self.k, self.h, self.v, self.marked) == (other.k, other.h, other.v, other.marked)

    def __hash__(self):
        return hash((self.k, self.h, self.v, self.marked))

    @cached_property
    def h_inv(self):
        return _inverse(self.h)

    @cached_property
    def v_inv(self):
        return _inverse(self.v)

    def h_pow(self, m, s):
        """Square reached from ``s`` after ``m`` right moves (negative = left)."""
        perm = self.h if m >= 0 else self.h_inv
        for _ in range(abs(m)):
            s = perm[s]
        return s

    @cached_property
    def commutator(self):
        # BL(s) -> BR(h^-1 s) -> TR(v^-1 h^-1 s) -> TL(h v^-1 h^-1 s) -> BL(v h v^-1 h^-1 s)
        h, v, hi, vi = self.h, self.v, self.h_inv, self.v_inv
        return tuple(v[h[vi[hi[s]]]] for s in range(self.k))

    @cached_property
    def vertices(self) -> tuple[VertexClass, ...]:
        seen = [False] * self.k
        out = []
        c = self.commutator
        for s0 in range(self.k):
            if seen[s0]:
                continue
            cyc = []
            s = s0
            while not seen[s]:
                seen[s] = True
                cyc.append(s)
                s = c[s]
            corners = set()
            for s in cyc:
                left = self.h_inv[s]
                below_left = self.v_inv[left]
                corners.update({(s, "BL"), (left, "BR"), (below_left, "TR"),
                                (self.h[below_left], "TL")})
            out.append(VertexClass(len(out), tuple(cyc), frozenset(corners), len(cyc)))
        return tuple(out)

    @cached_property
    def vertex_of_square(self):
        """Vertex index of the bottom-left corner of each square."""
        vid = [0] * self.k
        for vc in self.vertices:
            for s in vc.squares:
                vid[s] = vc.index
        return tuple(vid)

    @cached_property
    def singular_square(self):
        """``singular_square[s]``: is the bottom-left corner of ``s`` a singularity."""
        return tuple(self.vertices[self.vertex_of_square[s]].singular for s in range(self.k))

    def corner_vertex(self, s, cx, cy):
        """Vertex at corner (cx, cy) in {0,1}^2 of square ``s``."""
        if cx:
            s = self.h[s]
        if cy:
            s = self.v[s]
        return self.vertices[self.vertex_of_square[s]]

    def is_singular_point(self, s, x, y):
        if x in (0, 1) and y in (0, 1):
            return self.corner_vertex(s, int(x), int(y)).singular
        return False

    def normalize(self, s, x, y):
        """Canonical SurfacePoint for closed-square coordinates x, y in [0, 1]."""
        if x == 1:
            s, x = self.h[s], Fraction(0)
        if y == 1:
            s, y = self.v[s], Fraction(0)
        return SurfacePoint(s, x, y)

    def relabel(self, sigma):
        """Conjugate both gluings by the relabeling ``i -> sigma[i]``."""
        inv = _inverse(sigma)
        h = [sigma[self.h[inv[i]]] for i in range(self.k)]
        v = [sigma[self.v[inv[i]]] for i in range(self.k)]
        m = self.marked
        return build_surface(self.k, h, v, SurfacePoint(sigma[m.square], m.x, m.y))

    @property
    def area(self):
        return self.k


def build_surface(k: int, h_perm: Sequence[int], v_perm: Sequence[int],
                  marked_point: SurfacePoint | None = None) -> SquareTiledSurface:
    """Validate the gluing data and return the surface.

    Raises NotAPermutation, Disconnected or MarkedPointOnSingularity.
    """
    if k < 1:
        raise NotAPermutation("k must be positive")
    h = _check_perm(k, h_perm, "h")
    v = _check_perm(k, v_perm, "v")
    seen = {0}
    stack = [0]
    while stack:
        s = stack.pop()
        for t in (h[s], v[s]):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    if len(seen) != k:
        raise Disconnected(f"gluing is not transitive: orbit of square 0 is {sorted(seen)}")
    if marked_point is None:
        marked_point = SurfacePoint(*DEFAULT_MARKED)
    if not 0 <= marked_point.square < k:
        raise NotAPermutation(f"marked point square {marked_point.square} out of range")
    surf = SquareTiledSurface(k, h, v, marked_point)
    m = marked_point
    if surf.is_singular_point(m.square, m.x, m.y):
        raise MarkedPointOnSingularity(f"marked point {m} is a cone point")
    return surf


def torus(marked_point=None):
    return build_surface(1, [0], [0], marked_point)


def singular_vertices(surface):
    """All vertex classes (regular ones included) with their cone angles."""
    return surface.vertices


def stratum(surface) -> StratumSignature:
    orders = [vc.order for vc in surface.vertices if vc.order >= 1]
    # Euler characteristic: V - E + F with E = 2k, F = k
    chi = len(surface.vertices) - surface.k
    genus = (2 - chi) // 2
    return StratumSignature(tuple(orders), genus)
