import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import ORIGIN, h2_surface
from flatskew import (ApproximationTarget, Cut, CutCollection, GroupSpec, RationalDirection,
                      cylinder_decomposition, ergodic_sum, essential_value_witness, lift_cuts,
                      self_avoidance_subsequence, single_cylinder_search, torus,
                      transversal_sum_profile)
from flatskew.approx import approx_flow, golden_slope
from flatskew.errors import NoWitnessFound, SchemaError
from flatskew.skew import projected_displacement
from flatskew.witness import (best_quality, candidate_fractions, cut_phases, diagnose,
                              quality_bounds, sample_region)

F = Fraction
Z = GroupSpec(1)
EPS = F(1, 2 ** 20)


def witness_setup(value=1):
    """One +-1 vertical pair: plus start mid-edge, minus start just right of the corner."""
    surf = torus(ORIGIN)
    cuts = CutCollection(Z, [Cut((F(1, 2), 0), (EPS, 0), (0, 1), F(1, 2), Z.element([value]))])
    return surf, cuts, lift_cuts(surf, cuts)


# -- targets -------------------------------------------------------------------------

def test_parse_targets():
    assert ApproximationTarget.parse("3/5").exact() == F(3, 5)
    assert ApproximationTarget.parse("-1/3").exact() == F(-1, 3)
    golden = ApproximationTarget.parse("golden")
    assert [q for _, q, _ in _take(golden.convergents(), 8)] == [1, 1, 2, 3, 5, 8, 13, 21]
    root = ApproximationTarget.parse("sqrt:2")
    assert _take(root.terms(), 4) == [1, 2, 2, 2]
    assert _take(ApproximationTarget.parse("cf:0,2,3").terms(), 5) == [0, 2, 3]
    assert ApproximationTarget.parse("sqrt:4").exact() == 2
    for bad in ("cf:", "sqrt:-1", "3/0", "nonsense", "cf:1,0"):
        with pytest.raises(SchemaError):
            ApproximationTarget.parse(bad)


def _take(it, n):
    out = []
    for x in it:
        out.append(x)
        if len(out) == n:
            break
    return out


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=12), st.integers(0, 5))
def test_convergents_match_oracle(terms, a0):
    target = ApproximationTarget(tuple([a0] + terms))
    assert [(p, q) for p, q, _ in target.convergents()] == oracles.convergents([a0] + terms)
    p, q = oracles.convergents([a0] + terms)[-1]
    assert target.exact() == F(p, q)


@pytest.mark.parametrize("n", [2, 3, 5, 7, 13])
def test_sqrt_bracket(n):
    lo, hi = ApproximationTarget.sqrt(n).bracket()
    assert 0 < hi - lo <= F(1, 2 ** 64)
    assert lo * lo <= n <= hi * hi


def test_golden_bracket():
    lo, hi = ApproximationTarget.golden().bracket()
    assert lo * lo + lo - 1 <= 0 <= hi * hi + hi - 1
    assert hi - lo <= F(1, 2 ** 64)


def test_candidate_fractions_include_semiconvergents():
    fr = candidate_fractions(ApproximationTarget((0, 3, 4)), 20)
    # convergents 0/1, 1/3, 4/13 and the intermediate 1/1, 1/2, 2/7, 3/10
    assert {F(0), F(1, 3), F(4, 13), F(1, 2), F(2, 7), F(3, 10)} <= set(fr)
    assert all(f.denominator <= 20 for f in fr)


# -- search ----------------------------------------------------------------------------

def test_torus_golden_search(flat_torus):
    golden = ApproximationTarget.golden()
    cands = single_cylinder_search(flat_torus, golden, 100)
    qs = {c.direction.q for c in cands}
    conv = oracles.convergents([0] + [1] * 15)
    assert {q for _, q in conv if q <= 100} <= qs
    for (p, q), (_, q_next) in zip(conv, conv[1:]):
        if q > 100:
            break
        cand = next(c for c in cands if c.direction == RationalDirection(p, q))
        assert (cand.crossings, cand.width) == (q, F(1, q))
        # |theta - p/q| < 1/(q q_next)
        assert cand.quality_bounds[1] < F(q, q_next) <= 1


def test_exact_hit_has_zero_quality(h2):
    for p, q in ((1, 1), (2, 5)):
        d = RationalDirection(p, q)
        if len(cylinder_decomposition(h2, d)) != 1:
            continue
        (first, *_) = single_cylinder_search(h2, ApproximationTarget.rational(F(p, q)), 50)
        assert first.direction == d and first.quality_bounds == (0, 0)


def test_h2_sqrt2_minus_one():
    h2 = h2_surface()
    target = ApproximationTarget((0,), (2,))
    cands = single_cylinder_search(h2, target, 500)
    assert cands
    keys = [c.sort_key() for c in cands]
    assert keys == sorted(keys)
    assert all(c.crossings == 3 * c.direction.q for c in cands)


def test_search_rejects_max_q_zero(flat_torus):
    with pytest.raises(ValueError):
        single_cylinder_search(flat_torus, ApproximationTarget.golden(), 0)


@pytest.mark.parametrize("target", ["golden", "sqrt:3", "cf:0,1,4,1,4"])
def test_quality_recomputes(target, h2):
    t = ApproximationTarget.parse(target)
    with mpmath.workdps(80):
        theta = _mp_value(t)
        for c in single_cylinder_search(h2, t, 300):
            (cyl,) = cylinder_decomposition(h2, c.direction)
            assert c.quality_bounds == quality_bounds(t, c.direction, cyl.crossings, cyl.width)
            lo, hi = c.quality_bounds
            if t.is_rational:
                assert lo == hi == cyl.crossings / cyl.width * abs(t.exact() - c.direction.slope)
                continue
            true = mpmath.mpf(cyl.crossings) / _mp(cyl.width) * abs(theta - _mp(c.direction.slope))
            assert _mp(lo) <= true <= _mp(hi)


def _mp(f):
    return mpmath.mpf(f.numerator) / f.denominator


def _mp_value(t):
    if t.is_rational:
        return _mp(t.exact())
    *_, (p, q, _) = _take(t.convergents(), 120)
    return mpmath.mpf(p) / q


def test_monotone_refinement(flat_torus, h2):
    for surf in (flat_torus, h2):
        prev = None
        for max_q in (5, 20, 80, 300):
            best = best_quality(single_cylinder_search(surf, ApproximationTarget.golden(), max_q))
            if prev is not None and best is not None:
                assert best.sort_key() <= prev.sort_key()
            prev = best or prev


def test_parallel_search_is_identical(h2):
    t = ApproximationTarget.sqrt(2)
    assert single_cylinder_search(h2, t, 200, workers=2) == single_cylinder_search(h2, t, 200)


# -- self-avoidance -------------------------------------------------------------------

def test_half_with_odd_q():
    odd = list(range(1, 100, 2))
    assert self_avoidance_subsequence([F(1, 2)], odd, 0, F(1, 10)) == odd


def test_thirds_never_reach_one_half():
    assert self_avoidance_subsequence([F(1, 3), F(1, 4)], range(1, 2000), 0, F(1, 10)) == []


def test_self_avoidance_validation():
    with pytest.raises(ValueError):
        self_avoidance_subsequence([F(1, 3)], [1], 0, F(1, 4))
    with pytest.raises(ValueError):
        self_avoidance_subsequence([F(1, 3), F(1, 3)], [1], 0, F(1, 10))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 2 ** 32 - 1), min_size=1, max_size=5, unique=True),
       st.integers(1, 300), st.sampled_from([F(1, 20), F(1, 10), F(1, 5)]))
def test_self_avoidance_matches_direct_check(nums, q_max, tol):
    pts = [F(n, 2 ** 32) for n in nums]
    got = self_avoidance_subsequence(pts, range(1, q_max + 1), 0, tol)
    want = []
    for q in range(1, q_max + 1):
        fr = [(q * x) % 1 for x in pts]
        if abs(fr[0] - F(1, 2)) < tol and all(f < tol or f > 1 - tol for f in fr[1:]):
            want.append(q)
    assert got == want


# -- witnesses ------------------------------------------------------------------------

def _golden_candidates(surf, max_q=200):
    return single_cylinder_search(surf, ApproximationTarget.golden(), max_q)


def test_hand_built_witness():
    surf, cuts, lifted = witness_setup()
    rep = essential_value_witness(surf, cuts, lifted, 0, _golden_candidates(surf))
    assert rep.plus_fraction == rep.minus_fraction
    assert rep.plus_fraction == F(1, 2) - rep.direction.q * EPS
    assert rep.plus_fraction + rep.minus_fraction + rep.other_fraction == 1
    assert rep.boundary_margin == rep.candidate.width / 2
    rng = random.Random(3)
    for region, want in (("plus", 1), ("minus", -1)):
        for x in sample_region(rep, region, rng, 25):
            assert ergodic_sum(surf, lifted, x, rep.direction, rep.profile.period) == \
                Z.element([want])


def test_every_odd_candidate_splits_in_half():
    surf, cuts, lifted = witness_setup()
    for cand in _golden_candidates(surf):
        p, q = cand.direction.p, cand.direction.q
        if p % 2 and q % 2:
            rep = essential_value_witness(surf, cuts, lifted, 0, [cand])
            assert rep.plus_fraction == rep.minus_fraction == F(1, 2) - q * EPS
        else:
            with pytest.raises(NoWitnessFound):
                essential_value_witness(surf, cuts, lifted, 0, [cand])


def test_zero_value_gives_empty_halves():
    surf, cuts, lifted = witness_setup(value=0)
    rep = essential_value_witness(surf, cuts, lifted, 0, _golden_candidates(surf))
    assert (rep.plus_fraction, rep.minus_fraction, rep.other_fraction) == (0, 0, 1)


def test_integer_phase_pair_leaves_profile_unchanged():
    surf = torus(ORIGIN)
    d = RationalDirection(3, 5)
    # vertical length 5/3 projects to 1 = 5 widths, so the phase is 0 mod 1
    cuts = CutCollection(Z, [
        Cut((F(1, 2), 0), (EPS, 0), (0, 1), F(1, 2), Z.element([1])),
        Cut((F(1, 7), F(1, 3)), (F(5, 11), F(2, 9)), (0, 1), F(5, 3), Z.element([2])),
    ])
    (cyl,) = cylinder_decomposition(surf, d)
    assert cut_phases(surf, cuts, d, cyl.width)[1] == 0
    lifted = lift_cuts(surf, cuts)
    both = transversal_sum_profile(surf, lifted, cyl, d)
    alone = transversal_sum_profile(surf, lifted.select([0]), cyl, d)
    assert (both.breakpoints, both.values) == (alone.breakpoints, alone.values)


def test_no_witness_for_bad_phases():
    surf = torus(ORIGIN)
    cuts = CutCollection(Z, [Cut((F(1, 2), 0), (EPS, 0), (0, 1), F(1, 3), Z.element([1]))])
    with pytest.raises(NoWitnessFound):
        essential_value_witness(surf, cuts, lift_cuts(surf, cuts), 0,
                                _golden_candidates(surf, 60))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_pair_phases_agree(seed):
    from flatskew.cuts import sample_liftable_cuts
    rng = random.Random(seed)
    h2 = h2_surface()
    _, lifted, _ = sample_liftable_cuts(h2, 3, seed=seed)
    while True:
        q = rng.randint(4, 60)
        p = rng.randint(-q, q)
        if gcd(abs(p), q) == 1:
            break
    d = RationalDirection(p, q)
    for i in range(3):
        plus, minus = [s for s in lifted.segments if s.cut_index == i]
        assert projected_displacement(plus.slope, plus.length, d) == \
            projected_displacement(minus.slope, minus.length, d)


# -- diagnostics --------------------------------------------------------------------------

def test_diagnose_without_points():
    surf, _, lifted = witness_setup()
    diag = diagnose(surf, lifted, RationalDirection(13, 21), 0, 100)
    assert diag.n_points == 0 and diag.histogram == {} and diag.times == ()


def test_diagnose_is_seeded():
    surf, _, lifted = witness_setup()
    d = RationalDirection(89, 144)
    a = diagnose(surf, lifted, d, 20, 500, seed=5)
    assert a == diagnose(surf, lifted, d, 20, 500, seed=5)
    assert a.final_values != diagnose(surf, lifted, d, 20, 500, seed=6).final_values


def test_paired_versus_unpaired_drift():
    surf, _, lifted = witness_setup()
    d = RationalDirection(987, 1597)
    paired = diagnose(surf, lifted, d, 60, 2000, seed=1)
    assert abs(paired.mean[0]) <= 3 * paired.std[0] / 60 ** 0.5 + 1e-12
    unpaired = diagnose(surf, lifted.drop_minus(), d, 60, 2000, seed=1)
    rate = float(unpaired.crossing_rate[0])
    assert unpaired.drift_slope() == pytest.approx(rate, rel=0.05)


# -- floating point exploration -----------------------------------------------------------

def test_approx_flow_agrees_with_high_precision(flat_torus, h2):
    for surf in (flat_torus, h2):
        run = approx_flow(surf, 0, F(1, 7), golden_slope(), 2000)
        assert run.trusted
        assert len(run.itinerary) == 2001


def test_approx_flow_rational_matches_exact(h2):
    run = approx_flow(h2, 0, F(1, 7), "0.375", 50)
    s, x = 0, F(1, 7)
    for sq in run.itinerary[1:]:
        top = x + F(3, 8)
        m = top.numerator // top.denominator
        s, x = h2.v[h2.h_pow(m, s)], top - m
        assert sq == s
