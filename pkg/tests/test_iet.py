import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from conftest import directions, origamis
from flatskew import RationalDirection, first_return_iet, rauzy_step, shorten_to_convention
from flatskew.errors import DegenerateStep, NoValidTransversal, TransversalHitsSingularity
from flatskew.iet import IET, convention_target

F = Fraction


def _rotation(a, b):
    return IET((F(a, b), F(b - a, b)), (1, 0), F(1), (1, 1))


def test_torus_half_rotation(flat_torus):
    iet = first_return_iet(flat_torus, RationalDirection(1, 2), (0, 0, 1))
    assert iet.lengths == (F(1, 2), F(1, 2))
    assert iet.permutation == (1, 0)
    assert iet.return_heights == (1, 1)
    for x0, image, height in oracles.return_map_on_grid(1, [0], [0], 1, 2, 0, F(0), F(1), 1000):
        assert iet(x0) == image and height == 1


def test_vertical_is_identity(flat_torus):
    iet = first_return_iet(flat_torus, RationalDirection(0, 1), (0, 0, 1))
    assert len(iet) == 1 and iet(F(1, 3)) == F(1, 3)


def test_bad_transversal(flat_torus):
    for tr in ((0, F(1, 2), F(1, 2)), (1, 0, 1), (0, 0, F(3, 2))):
        with pytest.raises(ValueError):
            first_return_iet(flat_torus, RationalDirection(1, 2), tr)


def test_strict_mode_reports_cone_point(h2):
    d = RationalDirection(1, 2)
    with pytest.raises(TransversalHitsSingularity):
        first_return_iet(h2, d, (0, 0, 1), strict=True)
    assert len(first_return_iet(h2, d, (0, 0, 1))) >= 2


@settings(max_examples=60, deadline=None)
@given(origamis(k_max=6), directions(q_max=8), st.integers(0, 2 ** 32))
def test_return_map_matches_grid_oracle(surf, d, seed):
    rng = random.Random(seed)
    s = rng.randrange(surf.k)
    lo = F(rng.randrange(0, 8), 16)
    hi = lo + F(rng.randrange(1, 9), 16)
    iet = first_return_iet(surf, d, (s, lo, hi))
    grid = oracles.return_map_on_grid(surf.k, surf.h, surf.v, d.p, d.q, s, lo, hi, 97)
    starts = iet.domain_starts()
    for entry in grid:
        if entry is None:
            continue
        x0, image, height = entry
        i = max(j for j, a in enumerate(starts) if a <= x0 - lo)
        assert iet(x0 - lo) + lo == image
        assert iet.return_heights[i] == height


@settings(max_examples=60, deadline=None)
@given(origamis(k_max=6), directions(q_max=10), st.integers(0, 2 ** 32))
def test_images_tile_the_transversal(surf, d, seed):
    rng = random.Random(seed)
    lo = F(rng.randrange(0, 4), 8)
    iet = first_return_iet(surf, d, (rng.randrange(surf.k), lo, 1))
    spans = sorted((b, b + lam) for b, lam in zip(iet.image_starts(), iet.lengths))
    assert spans[0][0] == 0 and spans[-1][1] == iet.total
    assert all(x[1] == y[0] for x, y in zip(spans, spans[1:]))


@settings(max_examples=60, deadline=None)
@given(origamis(k_max=6), directions(q_max=10), st.integers(0, 2 ** 32))
def test_rectangles_fill_the_surface(surf, d, seed):
    from flatskew import is_single_cylinder
    assume(is_single_cylinder(surf, d))
    iet = first_return_iet(surf, d, (random.Random(seed).randrange(surf.k), 0, 1))
    assert sum(lam * h for lam, h in zip(iet.lengths, iet.return_heights)) == surf.k


# -- Rauzy --------------------------------------------------------------------------

def test_rauzy_on_two_thirds():
    nxt = rauzy_step(_rotation(2, 3))
    assert nxt.lengths == (F(1, 3), F(1, 3))
    assert nxt.total == F(2, 3)


def test_rauzy_degenerate():
    with pytest.raises(DegenerateStep):
        rauzy_step(_rotation(1, 2))
    with pytest.raises(DegenerateStep):
        rauzy_step(IET((F(1),), (0,), F(1), (1,)))


def _count_steps(iet):
    n = 0
    while True:
        try:
            iet = rauzy_step(iet)
        except DegenerateStep:
            return n
        n += 1


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 400).flatmap(lambda b: st.tuples(st.integers(1, b - 1), st.just(b))))
def test_rauzy_counts_subtractive_euclid(ab):
    a, b = ab
    assert _count_steps(_rotation(a, b)) == oracles.subtractive_euclid_steps(a, b - a)


def _induced_oracle(iet, x, bound):
    y = iet(x)
    while y >= bound:
        y = iet(y)
    return y


@st.composite
def iets(draw):
    n = draw(st.integers(2, 5))
    lengths = tuple(F(draw(st.integers(1, 40)), 16) for _ in range(n))
    perm = draw(st.permutations(range(n)))
    return IET(lengths, tuple(perm), sum(lengths, F(0)), (1,) * n)


@settings(max_examples=100, deadline=None)
@given(iets(), st.integers(0, 2 ** 32))
def test_rauzy_step_is_the_induced_map(iet, seed):
    try:
        nxt = rauzy_step(iet)
    except DegenerateStep:
        a, b = iet.top()[-1], iet.bottom()[-1]
        assert iet.lengths[a] == iet.lengths[b]
        return
    shrink = min(iet.lengths[iet.top()[-1]], iet.lengths[iet.bottom()[-1]])
    assert nxt.total == iet.total - shrink < iet.total
    rng = random.Random(seed)
    for _ in range(20):
        x = nxt.total * F(rng.randrange(2 ** 16), 2 ** 16)
        assert nxt(x) == _induced_oracle(iet, x, nxt.total)


# -- shortening -----------------------------------------------------------------------

def test_torus_convention(origin_torus):
    res = shorten_to_convention(origin_torus, RationalDirection(1, 2), 0)
    assert res.target == 2 == convention_target(origin_torus, 0)
    assert res.achieved and len(res.iet) == 2


def test_h2_reaches_four_intervals(h2):
    res = shorten_to_convention(h2, RationalDirection(2, 5), 0)
    assert res.target == 4
    assert res.achieved and len(res.iet) == 4
    assert res.transversal[1] == 0 and res.transversal[2] <= 1


def test_shortening_never_beats_the_target(h2):
    for q in range(1, 8):
        for p in range(-q, q + 1):
            if gcd(abs(p), q) != 1:
                continue
            res = shorten_to_convention(h2, RationalDirection(p, q), 0)
            if res.achieved:
                assert len(res.iet) == res.target
            else:
                assert res.stop_reason in {"degenerate", "stop_length", "max_steps"}


def test_shorten_rejects_bad_input(h2):
    with pytest.raises(NoValidTransversal):
        shorten_to_convention(h2, RationalDirection(1, 2), 7)
    with pytest.raises(NoValidTransversal):
        shorten_to_convention(h2, RationalDirection(1, 2), 0, stop_length=1)


def test_stop_length_is_respected(h2):
    res = shorten_to_convention(h2, RationalDirection(3, 7), 0, stop_length=F(1, 2))
    assert res.transversal[2] >= F(1, 2)
