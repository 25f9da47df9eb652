"""Finitely generated Abelian value groups Z^d x Z/n_1 x ... x Z/n_r."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class GroupElement:
    free: tuple[int, ...]
    torsion: tuple[int, ...]
    moduli: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(int(a) for a in self.free))
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))
        object.__setattr__(self, "torsion",
                           tuple(int(a) % n for a, n in zip(self.torsion, self.moduli)))
        if len(self.torsion) != len(self.moduli):
            raise ValueError("torsion part does not match the moduli")

    def _check(self, other):
        if len(self.free) != len(other.free) or self.moduli != other.moduli:
            raise ValueError("group elements from different groups")

    def __add__(self, other):
        self._check(other)
        return GroupElement(tuple(a + b for a, b in zip(self.free, other.free)),
                            tuple(a + b for a, b in zip(self.torsion, other.torsion)),
                            self.moduli)

    def __neg__(self):
        return GroupElement(tuple(-a for a in self.free), tuple(-a for a in self.torsion),
                            self.moduli)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n: int):
        return GroupElement(tuple(n * a for a in self.free), tuple(n * a for a in self.torsion),
                            self.moduli)

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.free) and not any(self.torsion)

    def as_vector(self):
        return self.free + self.torsion

    def __str__(self):
        parts = [str(a) for a in self.free] + [f"{a} mod {n}" for a, n in zip(self.torsion, self.moduli)]
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class GroupSpec:
    free_rank: int = 1
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(n) for n in self.torsion))
        if self.free_rank < 0 or any(n < 2 for n in self.torsion):
            raise ValueError("need free rank >= 0 and moduli >= 2")

    @property
    def dim(self):
        return self.free_rank + len(self.torsion)

    def zero(self):
        return GroupElement((0,) * self.free_rank, (0,) * len(self.torsion), self.torsion)

    def element(self, free=(), torsion=()):
        free = tuple(free) or (0,) * self.free_rank
        torsion = tuple(torsion) or (0,) * len(self.torsion)
        if len(free) != self.free_rank:
            raise ValueError(f"expected {self.free_rank} free coordinates")
        return GroupElement(free, torsion, self.torsion)

    def from_vector(self, vec):
        vec = tuple(vec)
        return GroupElement(vec[:self.free_rank], vec[self.free_rank:], self.torsion)

    def norm(self, g: GroupElement):
        """max |free_i|, with each nonzero torsion coordinate counting as 1."""
        vals = [abs(a) for a in g.free] + [1 if a else 0 for a in g.torsion]
        return max(vals, default=0)

    def distance(self, a, b):
        return self.norm(a - b)


def _lattice_is_everything(rows, dim):
    """Do the integer vectors ``rows`` span Z^dim?  Column-wise Hermite reduction."""
    rows = [list(r) for r in rows if any(r)]
    for col in range(dim):
        # gcd-reduce the column among rows whose earlier columns are zero
        active = [r for r in rows if any(r[col:])]
        pivots = [r for r in active if r[col] != 0]
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[col]))
            head = pivots[0]
            for r in pivots[1:]:
                f = r[col] // head[col]
                for i in range(col, dim):
                    r[i] -= f * head[i]
            pivots = [r for r in pivots if r[col] != 0]
        if not pivots or abs(pivots[0][col]) != 1:
            return False
        head = pivots[0]
        rows = [r for r in rows if r is not head]
        # clear nothing else needed: remaining rows have zero in this column
    return True


def generates_dense(values, group: GroupSpec) -> bool:
    """True iff ``values`` generate the whole (discrete) group."""
    values = list(values)
    if not values:
        raise ValueError("need at least one value")
    if group.dim == 0:
        return True
    rows = [list(g.as_vector()) for g in values]
    for j, n in enumerate(group.torsion):
        rel = [0] * group.dim
        rel[group.free_rank + j] = n
        rows.append(rel)
    return _lattice_is_everything(rows, group.dim)
