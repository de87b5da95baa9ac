import random
from itertools import combinations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from locbifilt.curves import ABSOLUTE, EntryCurve, absolute_curve, absolute_pipeline, contains, relative_curve
from locbifilt.delaunay import SiteSet
from locbifilt.errors import SubNotContained
from locbifilt.kernel import ConvexRegion, Line2, P, Surd
from locbifilt.slices import (CONE, Bifiltration, Entry, Slice, barcode_template, betti_numbers,
                              combinatorial_barcode, complex_at, cone, curve_intersection_set,
                              dual_line, nonzero_bars, persistence, relative_betti, side_of,
                              slice_barcode, slice_dual, slice_entry, slice_filtration)
from locbifilt.subdivision import relative_pipeline
from locbifilt.validate import random_siteset, template_check

PLANE = ConvexRegion([])
SQUARE = ConvexRegion([Line2(-1, 0, 0), Line2(1, 0, -1), Line2(0, -1, 0), Line2(0, 1, -1)])
THREE = SiteSet.of([(0, 0), (2, 0), (0, 2)], (3, 3))


def corner(s, r, simplex=(0,)):
    return EntryCurve(simplex, ABSOLUTE, mpq(s), mpq(r), (mpq(s), mpq(r)), ())


def E(key, v):
    return Entry(tuple(key), Surd(mpq(v)))


# --- slice entries ------------------------------------------------------------

def test_single_site_entry():
    c = absolute_curve((0,), PLANE, P(1, 0), P(0, 0))
    assert slice_entry(c, Slice.of(1, 0)) == mpq(1, 4)


def test_corner_entry():
    assert slice_entry(corner(1, 2), Slice.of(1, 1)) == 1
    assert slice_entry(corner(1, 2), Slice.of(1, 0)) == 2
    assert slice_entry(corner(1, 2), Slice.of(0, 1)) is None       # horizontal slice below the corner
    assert slice_entry(corner(1, 2), Slice.of(0, 3)) == 1


def test_relative_never():
    c = relative_curve((0,), SQUARE, P(0, 0), P(-1, 0))
    assert slice_entry(c, Slice.of(0, 10)) is None                  # above max r = 5
    assert slice_entry(c, Slice.of(-1, 10)) is not None


def test_entry_agrees_with_contains():
    """Bisection on contains() along the slice is an independent route to the entry."""
    rng = random.Random(3)
    ss = random_siteset(rng, 10)
    res = absolute_pipeline(ss)
    for _ in range(5):
        sl = Slice(mpq(rng.randint(1, 400), 100), mpq(rng.randint(-2000, 2000), 1))
        for c in res.curves.values():
            t = slice_entry(c, sl)
            if t is None:
                assert not contains(c, 10 ** 9, sl.m * 10 ** 9 + sl.b)
                continue
            tf = float(t)
            lo, hi = mpq(0), mpq(10 ** 7)
            if contains(c, lo, sl.b):
                assert t == c.s0 or tf <= 1e-12
                continue
            for _ in range(80):
                mid = (lo + hi) / 2
                if contains(c, mid, sl.m * mid + sl.b):
                    hi = mid
                else:
                    lo = mid
            assert abs(float(hi) - tf) < 1e-9 * (1 + abs(tf))


def test_three_site_filtration_order():
    bif = Bifiltration.absolute(absolute_pipeline(THREE))
    filt = slice_filtration(bif, Slice.of(1, 0))
    got = [(e.key, e.value) for e in filt]
    assert got[0] == ((1,), mpq(5, 2)) and got[1] == ((2,), mpq(5, 2))
    assert got[2] == ((1, 2), mpq(25, 8))
    assert {k for k, _ in got[3:]} == {(0,), (0, 1), (0, 2), (0, 1, 2)}
    assert all(v == 8 for _, v in got[3:])
    dims = [len(k) for k, _ in got[3:]]
    assert dims == sorted(dims)


def test_single_site_filtration():
    bif = Bifiltration.absolute(absolute_pipeline(SiteSet.of([(1, 0)], (0, 0))))
    filt, bars = slice_barcode(bif, Slice.of(1, 0))
    assert [(e.key, e.value) for e in filt] == [((0,), mpq(1, 4))]
    assert [(b.dim, b.death) for b in bars] == [(0, None)]


def test_permutation_invariance():
    rng = random.Random(8)
    ss = random_siteset(rng, 12)
    perm = list(range(len(ss.sites)))
    rng.shuffle(perm)
    ss2 = SiteSet(tuple(ss.sites[i] for i in perm), ss.center)
    sl = Slice.of(mpq(3, 2), -5)
    b1 = slice_barcode(Bifiltration.absolute(absolute_pipeline(ss)), sl)[1]
    b2 = slice_barcode(Bifiltration.absolute(absolute_pipeline(ss2)), sl)[1]
    key = lambda b: (b.dim, float(b.birth), None if b.death is None else float(b.death))
    assert sorted(map(key, nonzero_bars(b1)), key=repr) == sorted(map(key, nonzero_bars(b2)), key=repr)


# --- persistence --------------------------------------------------------------

def test_persistence_examples():
    bars = persistence([E((0,), 1)])
    assert [(b.dim, b.birth, b.death) for b in bars] == [(0, 1, None)]
    bars = persistence([E((0,), 1), E((1,), 2), E((0, 1), 3)])
    assert sorted((b.dim, b.birth, b.death) for b in bars if b.death is not None) == [(0, 2, 3)]
    assert [(b.birth, b.death) for b in bars if b.death is None] == [(1, None)]
    hollow = [E((0,), 0), E((1,), 0), E((2,), 0), E((0, 1), 1), E((0, 2), 2), E((1, 2), 3), E((0, 1, 2), 5)]
    h1 = [b for b in persistence(hollow) if b.dim == 1]
    assert [(b.birth, b.death, b.birth_key, b.death_key) for b in h1] == [(3, 5, (1, 2), (0, 1, 2))]


def test_persistence_rejects_bad_order():
    with pytest.raises(ValueError):
        persistence([E((0, 1), 0), E((0,), 1), E((1,), 1)])


def _bars_alive(bars, filt, i):
    pos = {e.key: j for j, e in enumerate(filt)}
    out = {}
    for b in bars:
        if pos[b.birth_key] <= i and (b.death_key is None or pos[b.death_key] > i):
            out[b.dim] = out.get(b.dim, 0) + 1
    return out


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_reduction_matches_betti(seed):
    rng = random.Random(seed)
    ss = random_siteset(rng, rng.randint(3, 25))
    bif = Bifiltration.absolute(absolute_pipeline(ss))
    sl = Slice(mpq(rng.randint(1, 300), 100), mpq(rng.randint(-500, 500)))
    filt, bars = slice_barcode(bif, sl)
    for i in range(len(filt)):
        alive = _bars_alive(bars, filt, i)
        betti = betti_numbers([e.key for e in filt[:i + 1]])
        for d, bd in enumerate(betti):
            assert alive.get(d, 0) == bd


# --- coning -------------------------------------------------------------------

def test_cone_edge_rel_endpoints():
    C = cone([(0, 1)], [(0,), (1,)])
    assert C.reduced_betti()[:2] == [0, 1]
    assert relative_betti([(0, 1)], [(0,), (1,)])[:2] == [0, 1]


def test_cone_empty_sub():
    base = [(0, 1), (2,)]
    C = cone(base, [])
    assert C.reduced_betti()[0] == betti_numbers(base)[0] == 2
    assert relative_betti(base, [])[0] == 2


def test_cone_base_equals_sub():
    C = cone([(0,)], [(0,)])
    assert all(b == 0 for b in C.reduced_betti())
    assert all(b == 0 for b in relative_betti([(0,)], [(0,)]))


def test_cone_sub_not_contained():
    with pytest.raises(SubNotContained):
        cone([(0,)], [(1,)])


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_cone_matches_relative_homology(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    all_s = [s for k in (1, 2, 3) for s in combinations(range(n), k)]
    base = [s for s in all_s if rng.random() < 0.5] + [(i,) for i in range(n)]
    closed = {f for s in base for k in range(1, len(s) + 1) for f in combinations(s, k)}
    sub = [s for s in closed if rng.random() < 0.4]
    sub = {f for s in sub for k in range(1, len(s) + 1) for f in combinations(s, k)}
    rb = cone(closed, sub).reduced_betti(3)
    rel = relative_betti(closed, sub, 3)
    assert rb == rel


# --- relative slices ----------------------------------------------------------

def test_relative_slice_drops_cone_class():
    nerve = relative_pipeline(SiteSet.of([(0, 0)], (1, 0)))
    bif = Bifiltration.relative(nerve)
    filt, bars = slice_barcode(bif, Slice.of(-1, 5))
    assert filt[0].key == (CONE,)
    assert all(b.birth_key != (CONE,) for b in bars)
    # the annulus L_s minus B_r(q): pairs (plane disc, disc minus ball) have H_1 once r > 0
    amb, rel = complex_at(bif, 4, mpq(1, 2))
    assert relative_betti(amb, rel, 2)[:3] == cone(amb, rel).reduced_betti(2)[:3]


# --- intersection set and template -------------------------------------------

def test_intersection_set_examples():
    pts, ov = curve_intersection_set([corner(1, 2), corner(3, 1, (1,))])
    assert [(x.lo, y.lo) for x, y in pts] == [(3, 2)] and ov == []
    _, ov = curve_intersection_set([corner(1, 2), corner(1, 2, (1,))])
    assert ov == [((0,), (1,))]


def _boundary_residual(c, s, r):
    """Distance in r from (s, r) to the boundary, counting the vertical wall at s0."""
    from locbifilt.curves import boundary_value
    if abs(s - float(c.s0)) < 1e-9:
        base = float(c.r_at_s0)
        return 0.0 if r >= base - 1e-9 else base - r
    v = boundary_value(c, mpq(s))
    return float("inf") if v is None else abs(float(v) - r)


def test_three_site_intersections_on_both_curves():
    from locbifilt.curves import intersect_curves
    res = absolute_pipeline(THREE)
    n = 0
    for a, b in combinations(list(res.curves.values()), 2):
        pts, _ = intersect_curves(a, b)
        for x, y in pts:
            for c in (a, b):
                assert _boundary_residual(c, float(x.mid), float(y.mid)) < 1e-9
            n += 1
    assert n > 0


def test_template_empty_and_single_point():
    bif = Bifiltration("absolute", ((0,),), {(0,): corner(1, 2)})
    T = barcode_template(bif)
    assert T.points == [] and len(T.regions) == 1
    bif = Bifiltration("absolute", ((0,), (1,)), {(0,): corner(1, 2), (1,): corner(3, 1, (1,))})
    T = barcode_template(bif)
    assert T.points == [(3, 2)]
    assert len(T.regions) == 2            # two open faces; the dual line goes to the lower one
    assert {R.signs for R in T.regions} == {(1,), (-1,)}
    assert T.locate(Slice.of(1, -1)).signs == (-1,)      # slice through (3,2)


@settings(max_examples=60)
@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_duality_preserves_above_below(a, b, m, k):
    sl = Slice.of(mpq(m, 7), mpq(k, 3))
    pt = (mpq(a, 5), mpq(b, 2))
    above = pt[1] > sl.m * pt[0] + sl.b
    da, db = dual_line(pt)                    # k' = da * m' - db
    dm, dk = slice_dual(sl)
    assert above == (dk > da * dm - db)
    assert side_of(sl, pt) == (-1 if above else (0 if pt[1] == sl.m * pt[0] + sl.b else 1))


def test_template_three_site_regions():
    rng = random.Random(2)
    for bif in (Bifiltration.absolute(absolute_pipeline(THREE)),
                Bifiltration.relative(relative_pipeline(SiteSet.of([(0, 0), (2, 0), (0, 2)], (3, "7/2"))))):
        ck = template_check(bif, rng, pairs=10, straddle=3)
        assert ck.passed, ck.failures[:3]
