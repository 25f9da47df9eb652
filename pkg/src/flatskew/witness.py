"""Single-cylinder direction search, self-avoiding subsequences and essential-value witnesses."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, isqrt
from typing import Iterator, Sequence

import numpy as np

from .cuts import CutCollection, LiftedCuts
from .errors import (FlatSkewError, NoWitnessFound, SchemaError,
                     TrajectoryHitsCutEndpoint, TrajectoryHitsSingularity)
from .flow import RationalDirection, cylinder_decomposition, to_level
from .groups import GroupElement
from .skew import (context, crossing_rate, projected_displacement,
                   transversal_sum_profile)
from .surface import SquareTiledSurface, SurfacePoint

PRECISION = Fraction(1, 2 ** 64)
DEFAULT_TOL = Fraction(1, 20)


# -- targets -------------------------------------------------------------------

@dataclass(frozen=True)
class ApproximationTarget:
    """A slope given by its continued fraction.

    ``prefix`` holds the leading terms; ``period`` (possibly empty) repeats
    forever after it.  An empty period means the slope is rational.
    """

    prefix: tuple[int, ...]
    period: tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self):
        if not self.prefix and not self.period:
            raise ValueError("continued fraction needs at least one term")
        terms = list(self.prefix[1:]) + list(self.period)
        if not self.prefix:
            terms = list(self.period[1:]) + list(self.period)
        if any(a < 1 for a in terms):
            raise ValueError("continued fraction terms after the first must be positive")

    @classmethod
    def rational(cls, value):
        value = Fraction(value)
        terms = []
        num, den = value.numerator, value.denominator
        while den:
            a = num // den
            terms.append(a)
            num, den = den, num - a * den
        return cls(tuple(terms), (), label=str(value))

    @classmethod
    def sqrt(cls, n):
        """sqrt(n) for a non-square positive integer n."""
        a0 = isqrt(n)
        if a0 * a0 == n:
            return cls.rational(a0)
        m, d, a = 0, 1, a0
        period = []
        while a != 2 * a0:
            m = d * a - m
            d = (n - m * m) // d
            a = (a0 + m) // d
            period.append(a)
        return cls((a0,), tuple(period), label=f"sqrt({n})")

    @classmethod
    def golden(cls):
        """1/phi = [0; 1, 1, 1, ...]."""
        return cls((0,), (1,), label="1/phi")

    @classmethod
    def parse(cls, text):
        """``"p/q"``, ``"cf:a0,a1,...,an,..."`` (trailing ``...`` repeats an),
        ``"sqrt:n"`` or ``"golden"``."""
        text = text.strip()
        if text == "golden":
            return cls.golden()
        if text.startswith("sqrt:"):
            try:
                return cls.sqrt(int(text[5:]))
            except ValueError:
                raise SchemaError(f"malformed target {text!r}") from None
        if text.startswith("cf:"):
            body = [t.strip() for t in text[3:].split(",") if t.strip()]
            repeat = bool(body) and body[-1] == "..."
            if repeat:
                body = body[:-1]
            try:
                terms = [int(t) for t in body]
            except ValueError:
                raise SchemaError(f"malformed continued fraction {text!r}") from None
            if not terms:
                raise SchemaError("empty continued fraction")
            try:
                if repeat:
                    return cls(tuple(terms[:-1]), (terms[-1],), label=text)
                return cls(tuple(terms), (), label=text)
            except ValueError as exc:
                raise SchemaError(str(exc)) from None
        from .rational import parse_rational
        return cls.rational(parse_rational(text))

    @property
    def is_rational(self):
        return not self.period

    def terms(self) -> Iterator[int]:
        yield from self.prefix
        while self.period:
            yield from self.period

    def convergents(self) -> Iterator[tuple[int, int, int]]:
        """Yields ``(p, q, a)`` for each convergent p/q with its term a."""
        p0, q0, p1, q1 = 1, 0, 0, 1
        for a in self.terms():
            p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
            yield p0, q0, a

    def exact(self):
        if not self.is_rational:
            raise ValueError("target is irrational")
        *_, (p, q, _) = self.convergents()
        return Fraction(p, q)

    def bracket(self, width=PRECISION, avoid=None):
        """Closed interval containing the slope, at most ``width`` wide.

        With ``avoid`` given, the interval is narrowed further until it
        excludes that rational (which must differ from the slope).
        """
        if self.is_rational:
            v = self.exact()
            return v, v
        prev = None
        for p, q, _ in self.convergents():
            cur = Fraction(p, q)
            if prev is not None:
                lo, hi = min(prev, cur), max(prev, cur)
                if hi - lo <= width and (avoid is None or not lo <= avoid <= hi):
                    return lo, hi
            prev = cur
        raise AssertionError("unreachable")

    def __str__(self):
        return self.label or f"cf:{','.join(map(str, self.prefix))}"


def candidate_fractions(target: ApproximationTarget, max_q) -> list[Fraction]:
    """Convergents and intermediate fractions of the target with q <= max_q."""
    out = set()
    p_prev, q_prev = 1, 0
    p_cur, q_cur = None, None
    for p, q, a in target.convergents():
        if p_cur is not None:
            for j in range(1, a):
                qq = q_prev + j * q_cur
                if qq > max_q:
                    break
                out.add(Fraction(p_prev + j * p_cur, qq))
            p_prev, q_prev = p_cur, q_cur
        if q > max_q:
            break
        out.add(Fraction(p, q))
        p_cur, q_cur = p, q
    return sorted(out, key=lambda f: (f.denominator, f.numerator))


# -- candidates ----------------------------------------------------------------

@dataclass(frozen=True)
class DirectionCandidate:
    direction: RationalDirection
    crossings: int
    width: Fraction
    quality_bounds: tuple[Fraction, Fraction]
    is_single_cylinder: bool

    @property
    def quality(self):
        """Exact quality, or the midpoint of its (at most 2**-64 scaled) bracket."""
        lo, hi = self.quality_bounds
        return lo if lo == hi else (lo + hi) / 2

    @property
    def exact(self):
        return self.quality_bounds[0] == self.quality_bounds[1]

    def sort_key(self):
        return (self.quality_bounds[0], self.quality_bounds[1], self.direction.p,
                self.direction.q)

    def surely_better(self, other):
        return self.quality_bounds[1] < other.quality_bounds[0]


def quality_bounds(target, direction, crossings, width):
    slope = direction.slope
    lo, hi = target.bracket(avoid=None if target.is_rational else slope)
    d_lo = min(abs(lo - slope), abs(hi - slope))
    d_hi = max(abs(lo - slope), abs(hi - slope))
    if lo <= slope <= hi:
        d_lo = Fraction(0)
    scale = Fraction(crossings) / width
    return scale * d_lo, scale * d_hi


def _evaluate(args):
    surface, target, frac = args
    direction = RationalDirection(frac.numerator, frac.denominator)
    cyls = cylinder_decomposition(surface, direction)
    if len(cyls) != 1:
        return None
    c, w = cyls[0].crossings, cyls[0].width
    return DirectionCandidate(direction, c, w, quality_bounds(target, direction, c, w), True)


def single_cylinder_search(surface: SquareTiledSurface, target: ApproximationTarget,
                           max_q, *, workers=1) -> list[DirectionCandidate]:
    """Single-cylinder directions among the target's convergents and
    intermediate fractions with q <= max_q, best quality first.

    An empty list means no candidate exists in range.
    """
    if max_q < 1:
        raise ValueError("max_q must be at least 1")
    jobs = [(surface, target, f) for f in candidate_fractions(target, max_q)]
    if workers > 1 and len(jobs) > 8:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=4))
    else:
        results = [_evaluate(j) for j in jobs]
    return sorted((r for r in results if r is not None), key=DirectionCandidate.sort_key)


def best_quality(candidates):
    return min(candidates, key=DirectionCandidate.sort_key) if candidates else None


# -- self-avoidance ------------------------------------------------------------

def _mod_positions(x: Fraction, qs: np.ndarray):
    """Residues ``(q * num) mod den`` of frac(q*x), exactly."""
    num, den = x.numerator % x.denominator, x.denominator
    if den < 2 ** 62 // max(int(qs.max(initial=1)), 1) and num < 2 ** 62 // max(int(qs.max(initial=1)), 1):
        return (qs * np.int64(num)) % np.int64(den), den
    return np.array([(int(q) * num) % den for q in qs], dtype=object), den


def self_avoidance_subsequence(points: Sequence[Fraction], q_seq: Sequence[int],
                               target_index: int, tol=DEFAULT_TOL) -> list[int]:
    """The q's with frac(q*x_target) near 1/2 and every other frac(q*x_j) near 0 mod 1.

    Near means within ``tol``: the target must land in (1/2 - tol, 1/2 + tol),
    the others in [0, tol) or (1 - tol, 1).
    """
    tol = Fraction(tol)
    if not 0 < tol < Fraction(1, 4):
        raise ValueError("tol must lie in (0, 1/4)")
    points = [Fraction(x) for x in points]
    if len(set(points)) != len(points):
        raise ValueError("points must be distinct")
    qs = np.asarray(list(q_seq), dtype=np.int64)
    if qs.size == 0:
        return []
    keep = np.ones(qs.size, dtype=bool)
    for j, x in enumerate(points):
        r, den = _mod_positions(x, qs)
        if j == target_index:
            lo = floor((Fraction(1, 2) - tol) * den)
            hi = -floor(-(Fraction(1, 2) + tol) * den)
            keep &= (r > lo) & (r < hi)
        else:
            near0 = -floor(-tol * den)
            near1 = floor((1 - tol) * den)
            keep &= (r < near0) | (r > near1)
    return [int(q) for q in qs[keep]]


# -- witnesses -----------------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    direction: RationalDirection
    target_cut: int
    plus_fraction: Fraction
    minus_fraction: Fraction
    other_fraction: Fraction
    boundary_margin: Fraction
    candidate: DirectionCandidate | None = None
    plus_regions: tuple[tuple[Fraction, Fraction], ...] = ()
    minus_regions: tuple[tuple[Fraction, Fraction], ...] = ()
    profile: object = field(default=None, repr=False, compare=False)

    @property
    def score(self):
        return min(self.plus_fraction, self.minus_fraction)


def _frac(x):
    return x - floor(x)


def _near_zero(x, tol):
    return x < tol or x > 1 - tol


def cut_phases(surface, cuts: CutCollection, direction, width):
    """``(|pi(l_i)| / w) mod 1`` for every cut pair."""
    return [_frac(abs(projected_displacement(c.slope, c.length, direction)) / width)
            for c in cuts.cuts]


def start_positions(surface, lifted: LiftedCuts, profile):
    """Fractional cross-section position of each lifted segment's start."""
    slope = profile.cylinder.direction.slope
    out = []
    for seg in lifted.segments:
        s0, x0 = to_level(surface, seg.start.square, seg.start.x, seg.start.y, slope)
        u = profile.position_of(s0, x0)
        out.append(None if u is None else u / profile.width)
    return out


def essential_value_witness(surface: SquareTiledSurface, cuts: CutCollection,
                            lifted: LiftedCuts, target_cut: int,
                            candidates: Sequence[DirectionCandidate],
                            tol=DEFAULT_TOL) -> WitnessReport:
    """Best certified split of a single cylinder into +g / -g halves.

    Candidates pass when the target cut's phase is within ``tol`` of 1/2,
    the other phases within ``tol`` of an integer, the target's plus start
    sits within ``tol`` of mid-section and every other start within ``tol``
    of the section boundary.  The exact profile of each survivor is then
    measured; the report maximising ``min(plus, minus)`` wins.
    """
    tol = Fraction(tol)
    half = Fraction(1, 2)
    g = cuts.cuts[target_cut].value
    target_seg = next(i for i, s in enumerate(lifted.segments)
                      if s.cut_index == target_cut and s.sign > 0)
    best = None
    for cand in candidates:
        if not cand.is_single_cylinder:
            continue
        direction, w = cand.direction, cand.width
        phases = cut_phases(surface, cuts, direction, w)
        if not all(abs(ph - half) < tol if i == target_cut else _near_zero(ph, tol)
                   for i, ph in enumerate(phases)):
            continue
        try:
            cyl = cylinder_decomposition(surface, direction)[0]
            profile = transversal_sum_profile(surface, lifted, cyl, direction)
        except FlatSkewError:
            continue
        pos = start_positions(surface, lifted, profile)
        if any(u is None for u in pos):
            continue
        if not all(abs(u - half) < tol if i == target_seg else _near_zero(u, tol)
                   for i, u in enumerate(pos)):
            continue
        report = _report(surface, profile, cand, target_cut, g)
        if best is None or report.score > best.score:
            best = report
    if best is None:
        raise NoWitnessFound(
            f"no candidate satisfies the phase conditions at tol {tol}")
    return best


def _report(surface, profile, cand, target_cut, g: GroupElement):
    w = profile.width
    plus, minus = [], []
    if not g.is_zero():
        for a, b, val in profile.pieces():
            if val == g:
                plus.append((a, b))
            elif val == -g:
                minus.append((a, b))
    pf = sum((b - a for a, b in plus), Fraction(0)) / w
    mf = sum((b - a for a, b in minus), Fraction(0)) / w
    return WitnessReport(cand.direction, target_cut, pf, mf, 1 - pf - mf,
                         w / (2 * surface.k), cand, tuple(plus), tuple(minus), profile)


def sample_region(report: WitnessReport, region, rng: random.Random, n, den=2 ** 32):
    """``n`` seeded points strictly inside the given certified intervals."""
    intervals = report.plus_regions if region == "plus" else report.minus_regions
    total = sum((b - a for a, b in intervals), Fraction(0))
    pts = []
    while len(pts) < n:
        r = Fraction(rng.randrange(1, den), den) * total
        for a, b in intervals:
            if r < b - a:
                pts.append(report.profile.point_at(a + r))
                break
            r -= b - a
    return pts


# -- diagnostics ---------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostics:
    n_points: int
    t_max: Fraction
    times: tuple[Fraction, ...]
    mean: tuple[float, ...]
    std: tuple[float, ...]
    mean_path: tuple[tuple[float, ...], ...]
    max_abs_path: tuple[int, ...]
    histogram: dict
    return_fraction: float
    crossing_rate: tuple[Fraction, ...]
    resamples: int
    final_values: tuple = field(default=(), repr=False)

    def drift_slope(self, coord=0):
        """Least-squares slope of the mean fiber coordinate against time."""
        if len(self.times) < 2:
            return 0.0
        t = np.array([float(x) for x in self.times])
        m = np.array([row[coord] for row in self.mean_path])
        return float(np.polyfit(t, m, 1)[0])


def _random_point(surface, rng, den=2 ** 32):
    return SurfacePoint(rng.randrange(surface.k), Fraction(rng.randrange(den), den),
                        Fraction(rng.randrange(den), den))


def diagnose(surface, lifted, direction, n_points, t_max, seed=0, *,
             checkpoints=20) -> Diagnostics:
    """Fiber statistics over seeded random starts, sampled at equally spaced times."""
    t_max = Fraction(t_max)
    group = lifted.group
    rate = crossing_rate(surface, lifted, direction)
    if n_points == 0:
        return Diagnostics(0, t_max, (), (), (), (), (), {}, 0.0, rate, 0)
    ctx = context(surface, lifted, direction)
    times = tuple(t_max * i / checkpoints for i in range(1, checkpoints + 1))
    rng = random.Random(seed)
    paths, resamples = [], 0
    while len(paths) < n_points:
        x = _random_point(surface, rng)
        try:
            state = ctx.start_state(x)
            acc = [0] * group.dim
            now = Fraction(0)
            row = []
            for t in times:
                vec, state = ctx.advance(*state, t - now)
                acc = [a + b for a, b in zip(acc, vec)]
                now = t
                row.append(group.from_vector(acc))
        except (TrajectoryHitsSingularity, TrajectoryHitsCutEndpoint, FlatSkewError):
            resamples += 1
            continue
        paths.append(row)
    fr = group.free_rank
    free = np.array([[g.free for g in row] for row in paths], dtype=float).reshape(
        n_points, len(times), fr)
    final = free[:, -1, :]
    hist = {}
    for row in paths:
        key = str(row[-1])
        hist[key] = hist.get(key, 0) + 1
    returns = sum(any(g.is_zero() for g in row) for row in paths)
    max_abs = tuple(int(max(group.norm(row[i]) for row in paths)) for i in range(len(times)))
    return Diagnostics(
        n_points, t_max, times,
        tuple(float(v) for v in final.mean(axis=0)),
        tuple(float(v) for v in final.std(axis=0, ddof=1)) if n_points > 1 else (0.0,) * fr,
        tuple(tuple(float(v) for v in free[:, i, :].mean(axis=0)) for i in range(len(times))),
        max_abs, dict(sorted(hist.items())), returns / n_points, rate, resamples,
        tuple(row[-1] for row in paths))
