from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from locbifilt.errors import DegenerateTriangle, EmptyFace
from locbifilt.kernel import (ConvexRegion, Line2, P, Point2, Ray2, Segment2, Surd, circumcenter,
                              circle_segment_intersections, clip_line_to_polygon, cross, dot,
                              fmt_decimal, fmt_rat, incircle, orient2d, project_to_line, rat,
                              sq_dist)

coord = st.fractions(min_value=-50, max_value=50, max_denominator=60)
points = st.builds(lambda x, y: P(x, y), coord, coord)

UNIT_SQUARE = ConvexRegion([Line2(-1, 0, 0), Line2(1, 0, -1), Line2(0, -1, 0), Line2(0, 1, -1)])
HALF_XLE0 = ConvexRegion([Line2(1, 0, 0)])


# --- parsing and formatting -------------------------------------------------

def test_rat_parses_decimals_and_fractions():
    assert rat("0.25") == mpq(1, 4)
    assert rat("3/6") == mpq(1, 2)
    assert rat(0.1) == mpq(1, 10)
    assert rat(Fraction(2, 3)) == mpq(2, 3)


def test_fmt_roundtrip():
    for x in (mpq(1, 3), mpq(-7, 8), mpq(5), mpq(0)):
        assert rat(fmt_rat(x)) == x
        assert rat(fmt_decimal(x)) == x
    assert fmt_decimal(mpq(1, 4)) == "0.25"
    assert fmt_decimal(mpq(-3, 8)) == "-0.375"


# --- predicates ---------------------------------------------------------------

def test_orient2d_examples():
    assert orient2d(P(0, 0), P(1, 0), P(0, 1)) == 1
    assert orient2d(P(0, 0), P(1, 0), P(2, 0)) == 0
    assert orient2d(P(0, 0), P(0, 1), P(1, 0)) == -1


def test_incircle_examples():
    a, b, c = P(1, 0), P(0, 1), P(-1, 0)
    assert incircle(a, b, c, P(0, 0)) == 1
    assert incircle(a, b, c, P(0, -1)) == 0
    assert incircle(a, b, c, P(0, -2)) == -1
    # orientation of a, b, c does not matter
    assert incircle(c, b, a, P(0, 0)) == 1


def test_incircle_collinear_raises():
    with pytest.raises(DegenerateTriangle):
        incircle(P(0, 0), P(1, 0), P(2, 0), P(5, 5))


def test_sq_dist_examples():
    assert sq_dist(P(0, 0), P(1, 0)) == 1
    assert sq_dist(P(0, 0), P(3, 4)) == 25
    assert sq_dist(P("1/2", 0), P(0, "1/2")) == mpq(1, 2)


def test_circumcenter_examples():
    for (a, b, c), want in [((P(0, 0), P(2, 0), P(0, 2)), P(1, 1)),
                            ((P(0, 0), P(1, 0), P(0, 1)), P("1/2", "1/2")),
                            ((P(-1, 0), P(1, 0), P(0, 1)), P(0, 0))]:
        o = circumcenter(a, b, c)
        assert o == want
        assert sq_dist(o, a) == sq_dist(o, b) == sq_dist(o, c)
    with pytest.raises(DegenerateTriangle):
        circumcenter(P(0, 0), P(1, 1), P(2, 2))


def test_project_to_line_examples():
    assert project_to_line(P(0, 2), Line2(1, 0, 0)) == P(0, 2)
    assert project_to_line(P(3, 3), Line2(0, 1, 0)) == P(3, 0)
    assert project_to_line(P(1, 1), Line2(1, 1, 0)) == P(0, 0)


def test_clip_line_to_polygon_examples():
    r = clip_line_to_polygon(Line2(0, 1, 0), HALF_XLE0)
    assert isinstance(r, Ray2) and r.origin == P(0, 0)
    assert cross(r.direction, P(-1, 0)) == 0 and dot(r.direction, P(-1, 0)) > 0
    assert clip_line_to_polygon(Line2(0, 1, -2), UNIT_SQUARE) is None
    s = clip_line_to_polygon(Line2(1, -1, 0), UNIT_SQUARE)
    assert isinstance(s, Segment2) and {s.a, s.b} == {P(0, 0), P(1, 1)}


def test_circle_segment_intersections_examples():
    got = circle_segment_intersections(P(0, 0), 1, Segment2(P(-2, 0), P(2, 0)))
    assert sorted(got) == pytest.approx([0.25, 0.75])
    assert circle_segment_intersections(P(0, 0), 1, Segment2(P(2, 0), P(2, 1))) == []
    got = circle_segment_intersections(P(0, 0), 2, Segment2(P(1, -1), P(1, 1)))
    assert sorted(got) == pytest.approx([0.0, 1.0])


# --- convex regions -----------------------------------------------------------

def test_unit_square_region():
    assert UNIT_SQUARE.bounded
    assert set(UNIT_SQUARE.vertices) == {P(0, 0), P(1, 0), P(1, 1), P(0, 1)}
    assert UNIT_SQUARE.contains(P("1/2", 1))
    assert not UNIT_SQUARE.contains_strict(P("1/2", 1))
    assert UNIT_SQUARE.contains_strict(UNIT_SQUARE.interior_point())


def test_empty_region_raises():
    with pytest.raises(EmptyFace):
        ConvexRegion([Line2(1, 0, 0), Line2(-1, 0, 1)])   # x <= 0 and x >= 1


def test_split_square():
    a, b = UNIT_SQUARE.split(Line2(1, 0, mpq(-1, 2)))
    assert a.contains(P(0, 0)) and not a.contains(P(1, 0))
    assert b.contains(P(1, 1)) and not b.contains(P(0, 1))


# --- surds --------------------------------------------------------------------

def test_surd_sign_and_compare():
    r2 = Surd(0, 1, 2)
    assert r2 > mpq(141, 100) and r2 < mpq(142, 100)
    assert Surd(1, 1, 2) < Surd(1, 1, 3)
    assert Surd(3, -2, 2).sign() == 1                  # 3 - 2 sqrt 2 > 0
    assert Surd(-3, 2, 2).sign() == -1
    assert Surd(0, 1, 4) == 2                          # perfect squares collapse


def test_surd_interval_brackets_value():
    v = Surd(mpq(1, 3), mpq(-5, 7), mpq(11, 2))
    iv = v.interval(mpq(1, 10 ** 20))
    assert iv.lo <= iv.hi and iv.width <= mpq(1, 10 ** 20)
    assert v.cmp(iv.lo) >= 0 and v.cmp(iv.hi) <= 0
    assert abs(float(v) - (1 / 3 - 5 / 7 * 5.5 ** 0.5)) < 1e-15


# --- properties ---------------------------------------------------------------

@given(points, points, points, st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=30))
def test_scaling_invariance(a, b, c, lam):
    lam = rat(lam)
    sa, sb, sc = a.scale(lam), b.scale(lam), c.scale(lam)
    assert orient2d(sa, sb, sc) == orient2d(a, b, c)
    assert sq_dist(sa, sb) == lam * lam * sq_dist(a, b)


@given(points, points, points)
def test_circumcenter_equidistant(a, b, c):
    if orient2d(a, b, c) == 0:
        return
    o = circumcenter(a, b, c)
    assert sq_dist(o, a) == sq_dist(o, b) == sq_dist(o, c)


@given(points, points, points)
def test_projection_is_orthogonal(q, a, b):
    if a == b:
        return
    l = Line2.through(a, b)
    x = project_to_line(q, l)
    assert l.value(x) == 0
    assert dot(q - x, b - a) == 0


@given(points, points)
def test_clip_line_inside_square(a, b):
    if a == b:
        return
    l = Line2.through(a, b)
    r = clip_line_to_polygon(l, UNIT_SQUARE)
    if r is None:
        return
    ends = [r] if isinstance(r, Point2) else [r.a, r.b]
    for e in ends:
        assert l.value(e) == 0 and UNIT_SQUARE.contains(e)


@given(st.fractions(min_value=-20, max_value=20, max_denominator=50),
       st.fractions(min_value=-20, max_value=20, max_denominator=50),
       st.fractions(min_value=0, max_value=20, max_denominator=50),
       st.fractions(min_value=-20, max_value=20, max_denominator=50))
def test_surd_cmp_matches_float(a, b, d, c):
    v = Surd(rat(a), rat(b), rat(d))
    fv = float(a) + float(b) * float(d) ** 0.5
    if abs(fv - float(c)) > 1e-9:
        assert v.cmp(rat(c)) == (1 if fv > float(c) else -1)
