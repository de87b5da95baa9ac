import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from locbifilt.errors import PEqualsQ
from locbifilt.kernel import ConvexRegion, Line2, P, Point2, Ray2, Segment2, sq_dist
from locbifilt.oracle import oracle_max_r, oracle_min_r
from locbifilt.paths import (anti_bridge, bridge, dimension_reduce, farthest_point, maximizing_path,
                             minimizing_path, nearest_point)
from locbifilt.validate import FACE_KINDS, path_invariants, random_face, random_subdivision_faces

PLANE = ConvexRegion([])
HALF = ConvexRegion([Line2(1, 0, 0)])                     # x <= 0
SQUARE = ConvexRegion([Line2(-1, 0, 0), Line2(1, 0, -1), Line2(0, -1, 0), Line2(0, 1, -1)])
YAXIS = Line2(mpq(1), mpq(0), mpq(0))


def seg_set(s):
    return {s.a, s.b}


def test_nearest_point():
    assert nearest_point(HALF, P(-1, 0)) == P(-1, 0)
    assert nearest_point(HALF, P(1, 0)) == P(0, 0)
    assert nearest_point(SQUARE, P(2, 3)) == P(1, 1)


def test_farthest_point():
    # corner distances from (-1,0): 1, 4, 5, 2
    assert farthest_point(SQUARE, P(-1, 0)) == P(1, 1)
    assert farthest_point(HALF, P(3, 3)) is None
    assert farthest_point(P(2, 2), P(0, 0)) == P(2, 2)


def test_bridge():
    b = bridge(HALF, P(-1, 0), P(0, 2))
    assert isinstance(b, Segment2) and seg_set(b) == {P(-1, 0), P(0, 2)}
    assert bridge(SQUARE, P(2, 0), P(3, 0)) is None
    assert bridge(YAXIS, P(-1, 0), P(1, 0)) == P(0, 0)


def test_anti_bridge():
    a = anti_bridge(SQUARE, P(0, 0), P(-1, 0))
    assert isinstance(a, Segment2) and seg_set(a) == {P(0, 0), P(1, 0)}
    a = anti_bridge(HALF, P(-1, 0), P(-2, 0))
    assert isinstance(a, Segment2) and seg_set(a) == {P(-1, 0), P(0, 0)}
    # the ray from (2,0) away from (3,0) runs along y=0 through the square
    a = anti_bridge(SQUARE, P(2, 0), P(3, 0))
    assert isinstance(a, Segment2) and seg_set(a) == {P(1, 0), P(0, 0)}
    assert anti_bridge(SQUARE, P(5, 5), P(4, 4)) is None
    with pytest.raises(PEqualsQ):
        anti_bridge(SQUARE, P(0, 0), P(0, 0))


def test_dimension_reduce():
    pp, qq, shift = dimension_reduce(YAXIS, P(-1, 0), P(0, 2))
    assert (pp, qq, shift) == (P(0, 0), P(0, 2), 1)
    # Pythagoras on W
    for y in (-2, 0, mpq(5, 3)):
        x = P(0, y)
        assert sq_dist(P(-1, 0), x) == shift + sq_dist(pp, x)
    assert dimension_reduce(YAXIS, P(0, 3), P(1, 1))[2] == 0
    pp, _, shift = dimension_reduce(Line2(mpq(1), mpq(-1), mpq(0)), P(1, 0), P(0, 0))
    assert pp == P("1/2", "1/2") and shift == mpq(1, 2)


def test_minimizing_path_examples():
    chain, k = minimizing_path(PLANE, P(1, 0), P(0, 0))
    assert chain.vertices == (P(1, 0), P(0, 0)) and (k.s0, k.s1, k.r1) == (0, 1, 0)
    chain, k = minimizing_path(HALF, P(-1, 0), P(0, 2))
    assert chain.vertices == (P(-1, 0), P(0, 2)) and (k.s0, k.s1, k.r1) == (0, 5, 0)
    chain, k = minimizing_path(YAXIS, P(-1, 0), P(0, 2))
    assert chain.vertices == (P(0, 0), P(0, 2)) and (k.s0, k.s1, k.r1) == (1, 5, 0)


def test_minimizing_path_parameterization_oracle():
    # gamma_s = p + t (q - p) on the half-plane example
    p, q = P(-1, 0), P(0, 2)
    for i in range(1, 10):
        t = mpq(i, 10)
        x = p + (q - p).scale(t)
        s = sq_dist(p, x)
        assert oracle_min_r(HALF, p, q, s) == pytest.approx(float(sq_dist(q, x)), abs=1e-9)


def test_maximizing_path_examples():
    chain, k = maximizing_path(SQUARE, P(0, 0), P(-1, 0))
    assert chain.vertices == (P(0, 0), P(1, 0), P(1, 1)) and chain.terminal_ray is None
    assert (k.s0, k.s1) == (0, 2)
    chain, k = maximizing_path(P(1, 1), P(0, 0), P(3, 3))
    assert chain.vertices == (P(1, 1),) and k.s0 == k.s1 == 2
    chain, k = maximizing_path(HALF, P(-1, 0), P(1, 0))
    assert chain.vertices == (P(-1, 0),)
    ray = chain.terminal_ray
    assert isinstance(ray, Ray2) and ray.origin == P(-1, 0)
    assert ray.direction[1] == 0 and ray.direction[0] < 0
    with pytest.raises(PEqualsQ):
        maximizing_path(SQUARE, P(0, 0), P(0, 0))


def test_maximizing_ray_oracle_at_sampled_s():
    p, q = P(-1, 0), P(1, 0)
    for s in (1, 4, 100, 10 ** 4):
        want = (2 + float(s) ** 0.5) ** 2
        assert oracle_max_r(HALF, p, q, s) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("kind", FACE_KINDS)
def test_min_path_invariants_random_faces(kind):
    rng = random.Random(hash(kind) & 0xffff)
    for _ in range(15):
        V = random_face(rng, kind)
        p = P(mpq(rng.randint(-400, 400), 4), mpq(rng.randint(-400, 400), 4))
        q = P(mpq(rng.randint(-400, 400), 4), mpq(rng.randint(-400, 400), 4))
        ck = path_invariants(V, p, q, False, rng, samples=40)
        assert ck.passed, ck.failures[:3]


def test_max_path_invariants_subdivision_faces():
    rng = random.Random(99)
    seen = 0
    while seen < 60:
        for F, p, q in random_subdivision_faces(rng, 6):
            ck = path_invariants(F, p, q, True, rng, samples=30)
            assert ck.passed, ck.failures[:3]
            seen += 1


coords = st.integers(-40, 40)


@settings(max_examples=40)
@given(coords, coords, coords, coords)
def test_min_path_on_square_hypothesis(px, py, qx, qy):
    p, q = P(mpq(px, 8), mpq(py, 8)), P(mpq(qx, 8), mpq(qy, 8))
    chain, k = minimizing_path(SQUARE, p, q)
    assert chain.vertices[0] == nearest_point(SQUARE, p)
    assert chain.vertices[-1] == nearest_point(SQUARE, q)
    ds = [sq_dist(p, v) for v in chain.vertices]
    assert all(a < b for a, b in zip(ds, ds[1:]))
    assert k.s0 == ds[0] and k.s1 == ds[-1] and k.r1 == sq_dist(q, chain.vertices[-1])
