import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

import oracles
from conftest import ORIGIN, h2_surface
from flatskew import (Cut, CutCollection, GroupSpec, SurfacePoint, generates_dense,
                      lift_cuts, lift_point, sample_cuts, torus)
from flatskew.cuts import sample_liftable_cuts, trace_segment
from flatskew.errors import LiftHitsSingularity

F = Fraction


def test_lift_of_origin_is_marked_point(h2):
    assert lift_point(h2, (0, 0)) == h2.marked


def test_torus_lift_is_fractional_part(flat_torus):
    m = flat_torus.marked
    want = (0, (m.x + F(5, 2)) % 1, (m.y + F(7, 3)) % 1)
    assert oracles.lift_point(1, [0], [0], (0, m.x, m.y), F(5, 2), F(7, 3)) == want
    assert lift_point(flat_torus, (F(5, 2), F(7, 3))) == SurfacePoint(*want)


@pytest.mark.parametrize("scale", [F(3, 2), F(1), F(5, 4)])
def test_lift_through_cone_point(h2, scale):
    m = h2.marked
    # the top-right corner of the marked square is the cone point
    assert h2.is_singular_point(m.square, 1, 1)
    target = ((1 - m.x) * scale, (1 - m.y) * scale)
    with pytest.raises(LiftHitsSingularity):
        lift_point(h2, target)
    with pytest.raises(oracles.TraceError):
        oracles.lift_point(3, h2.h, h2.v, (m.square, m.x, m.y), *target)


def test_lift_matches_oracle_on_h2(h2):
    rng = random.Random(11)
    m = h2.marked
    for _ in range(50):
        px = F(rng.randrange(-2 ** 12, 2 ** 12), 2 ** 9)
        py = F(rng.randrange(-2 ** 12, 2 ** 12), 2 ** 9)
        try:
            want = oracles.lift_point(3, h2.h, h2.v, (m.square, m.x, m.y), px, py)
        except oracles.TraceError:
            with pytest.raises(LiftHitsSingularity):
                lift_point(h2, (px, py))
            continue
        assert lift_point(h2, (px, py)) == SurfacePoint(*want)


def _torus_pair(length=F(1, 2)):
    g = GroupSpec(1)
    return CutCollection(g, [Cut((F(1, 4), F(1, 10)), (F(3, 4), F(1, 10)), (0, 1), length,
                                 g.element([1]))])


def test_lift_cuts_torus_pair():
    surf = torus(ORIGIN)
    lifted = lift_cuts(surf, _torus_pair())
    assert [s.sign for s in lifted.segments] == [1, -1]
    for seg, x in zip(lifted.segments, (F(1, 4), F(3, 4))):
        (pc,) = seg.pieces
        assert pc.square == 0
        assert (pc.x0, pc.y0, pc.x1, pc.y1) == (x, F(1, 10), x, F(6, 10))
        assert (pc.t0, pc.t1) == (0, F(1, 2))


def test_zero_length_rejected():
    with pytest.raises(ValueError):
        Cut((0, 0), (1, 1), (0, 1), 0, GroupSpec(1).element([1]))


def test_long_cut_wraps():
    surf = torus(ORIGIN)
    lifted = lift_cuts(surf, _torus_pair(F(3)))
    for seg in lifted.segments:
        assert len(seg.pieces) >= 3
        assert sum(pc.t1 - pc.t0 for pc in seg.pieces) == 3
    oracle = oracles.lift_segment(1, [0], [0], (0, F(0), F(0)), (F(1, 4), F(1, 10)), (0, 1), 3)
    assert len(oracle) == len(lifted.segments[0].pieces)


def test_slope_is_normalised():
    c = Cut((0, 0), (0, 0), (2, -4), F(1), GroupSpec(1).element([1]))
    assert c.slope == (1, -2)
    assert c.displacement == (1, -2)


def test_trace_segment_rejects_vertex(h2):
    with pytest.raises(LiftHitsSingularity):
        trace_segment(h2, SurfacePoint(0, F(1, 2), F(1, 2)), F(1, 2), F(1, 2))


# -- groups --------------------------------------------------------------------------

def test_generates_dense_examples():
    z = GroupSpec(1)
    assert generates_dense([z.element([1]), z.element([-1])], z)
    assert not generates_dense([z.element([2]), z.element([4])], z)
    z2 = GroupSpec(2)
    assert not generates_dense([z2.element([1, 0]), z2.element([1, 2])], z2)
    m = Matrix([[1, 0], [1, 2]])
    assert abs(m.det()) == 2


def test_generates_dense_torsion():
    g = GroupSpec(0, (4, 6))
    assert not generates_dense([g.element((), [1, 1])], g)
    assert generates_dense([g.element((), [1, 0]), g.element((), [0, 1])], g)
    assert not generates_dense([g.element((), [2, 0]), g.element((), [0, 1])], g)


def _snf_says_everything(values, group):
    rows = [list(v.as_vector()) for v in values]
    for j, n in enumerate(group.torsion):
        r = [0] * group.dim
        r[group.free_rank + j] = n
        rows.append(r)
    if len(rows) < group.dim:
        return False
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    return all(abs(snf[i, i]) == 1 for i in range(group.dim))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2), st.lists(st.integers(2, 6), max_size=2),
       st.lists(st.lists(st.integers(-6, 6), min_size=5, max_size=5), min_size=1, max_size=4))
def test_generates_dense_matches_smith_form(free, torsion, raw):
    group = GroupSpec(free, tuple(torsion))
    if group.dim == 0:
        return
    values = [group.element(r[:free], r[free:free + len(torsion)]) for r in raw]
    assert generates_dense(values, group) == _snf_says_everything(values, group)


def test_group_metric():
    g = GroupSpec(2, (3,))
    a, b = g.element([1, -4], [2]), g.element([0, 1], [2])
    assert g.norm(a) == 4
    assert g.distance(a, b) == 5
    assert g.distance(a, a) == 0
    assert (a - b).torsion == (0,)


# -- sampling ------------------------------------------------------------------------

def test_sampling_is_deterministic():
    assert sample_cuts(4, seed=9) == sample_cuts(4, seed=9)
    assert sample_cuts(4, seed=9) != sample_cuts(4, seed=10)


def test_three_pairs_six_segments(flat_torus):
    cuts = sample_cuts(3, seed=1)
    assert len(cuts) == 3
    assert len(lift_cuts(flat_torus, cuts).segments) == 6


def test_sampled_coordinates_are_dyadic():
    for c in sample_cuts(5, seed=3).cuts:
        for v in (*c.start_plus, *c.start_minus, c.length):
            den = v.denominator
            assert den & (den - 1) == 0 and den <= 2 ** 35


def test_sampled_collections_lift_almost_always(flat_torus, h2):
    # the torus has no cone point at all; H(2) may need an occasional resample
    resamples_torus = sum(sample_liftable_cuts(flat_torus, 1, seed=s)[2] for s in range(1000))
    resamples_h2 = sum(sample_liftable_cuts(h2, 1, seed=s)[2] for s in range(1000))
    assert resamples_torus == 0
    assert resamples_h2 <= 10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 4))
def test_pairing_invariants(seed, n):
    surf = h2_surface()
    cuts, lifted, _ = sample_liftable_cuts(surf, n, seed=seed, group=GroupSpec(1, (3,)))
    assert lifted.total_value().is_zero()
    for i in range(n):
        plus, minus = [s for s in lifted.segments if s.cut_index == i]
        assert plus.slope == minus.slope and plus.length == minus.length
        assert plus.value == -minus.value
        for seg in (plus, minus):
            assert sum(pc.t1 - pc.t0 for pc in seg.pieces) == seg.length
            for pc in seg.pieces:
                for x, y in ((pc.x0, pc.y0), (pc.x1, pc.y1)):
                    assert not surf.is_singular_point(pc.square, x, y)


def test_drop_minus_keeps_plus_segments(flat_torus):
    lifted = lift_cuts(flat_torus, sample_cuts(2, seed=4))
    assert all(s.sign > 0 for s in lifted.drop_minus().segments)
    assert len(lifted.drop_minus().segments) == 2
