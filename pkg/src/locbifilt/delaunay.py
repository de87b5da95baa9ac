"""Delaunay triangulation of the sites and the dual Voronoi faces.

Bowyer-Watson insertion with ghost triangles, run on integer-scaled
coordinates so every predicate is plain Python integer arithmetic.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from gmpy2 import mpz

from .errors import CenterDegenerate, CenterEqualsSite, DegenerateInput
from .kernel import (ConvexRegion, Line2, Point2, Ray2, Segment2, bisector_halfplane,
                     circumcenter, orient2d, rat, sq_dist)

GHOST = -1


@dataclass(frozen=True)
class SiteSet:
    sites: tuple
    center: Point2

    @staticmethod
    def of(sites, center) -> "SiteSet":
        pts = tuple(Point2(rat(x), rat(y)) for x, y in sites)
        return SiteSet(pts, Point2(rat(center[0]), rat(center[1])))

    def __len__(self):
        return len(self.sites)


def _orient(a, b, c):
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def _incircle(a, b, c, d):
    """Sign of the incircle determinant for counterclockwise a, b, c."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    det = ((adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
           - (bdx * bdx + bdy * bdy) * (adx * cdy - ady * cdx)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx))
    return (det > 0) - (det < 0)


def _hilbert_key(x: int, y: int, order: int = 16) -> int:
    d = 0
    s = 1 << (order - 1)
    while s > 0:
        rx = 1 if (x & s) else 0
        ry = 1 if (y & s) else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        s >>= 1
    return d


def _scaled_ints(sites):
    lcm = mpz(1)
    for p in sites:
        for c in p:
            den = c.denominator
            lcm = lcm * den // math.gcd(int(lcm), int(den))
    return [(int(p[0] * lcm), int(p[1] * lcm)) for p in sites]


class _BW:
    """Bowyer-Watson state.  tri[(a, b)] = c means (a, b, c) is a CCW triangle."""

    def __init__(self, pts):
        self.pts = pts
        self.tri = {}
        self.last = None

    def _add(self, a, b, c):
        self.tri[(a, b)] = c
        self.tri[(b, c)] = a
        self.tri[(c, a)] = b
        if GHOST not in (a, b, c):
            self.last = (a, b, c)

    def _remove(self, a, b, c):
        del self.tri[(a, b)]
        del self.tri[(b, c)]
        del self.tri[(c, a)]

    def _conflict(self, a, b, c, x) -> bool:
        P = self.pts
        if c == GHOST or a == GHOST or b == GHOST:
            # rotate so the ghost is last
            while c != GHOST:
                a, b, c = b, c, a
            o = _orient(P[a], P[b], P[x])
            if o > 0:
                return True
            if o < 0:
                return False
            pa, pb, px = P[a], P[b], P[x]
            return (min(pa[0], pb[0]) <= px[0] <= max(pa[0], pb[0])
                    and min(pa[1], pb[1]) <= px[1] <= max(pa[1], pb[1]))
        return _incircle(P[a], P[b], P[c], P[x]) > 0

    def _locate(self, x, rng):
        P = self.pts
        a, b, c = self.last
        px = P[x]
        for _ in range(4 * len(P) + 100):
            if GHOST in (a, b, c):
                return (a, b, c)
            edges = [(a, b), (b, c), (c, a)]
            rng.shuffle(edges)
            for u, v in edges:
                if _orient(P[u], P[v], px) < 0:
                    w = self.tri[(v, u)]
                    a, b, c = v, u, w
                    break
            else:
                return (a, b, c)
        raise RuntimeError("point location did not terminate")

    def insert(self, x, rng):
        start = self._locate(x, rng)
        if not self._conflict(*start, x):
            # walk ended in a ghost that is not in conflict: scan for a conflicting one
            start = None
            for (a, b), c in self.tri.items():
                if self._conflict(a, b, c, x):
                    start = (a, b, c)
                    break
            if start is None:
                raise RuntimeError("no conflicting triangle")
        cavity = {self._canon(start)}
        stack = [start]
        boundary = []
        while stack:
            a, b, c = stack.pop()
            for u, v in ((a, b), (b, c), (c, a)):
                w = self.tri.get((v, u))
                nb = (v, u, w)
                key = self._canon(nb)
                if key in cavity:
                    continue
                if self._conflict(v, u, w, x):
                    cavity.add(key)
                    stack.append(nb)
                else:
                    boundary.append((u, v))
        for t in cavity:
            self._remove(*t)
        for u, v in boundary:
            self._add(u, v, x)

    @staticmethod
    def _canon(t):
        a, b, c = t
        m = min(t)
        while a != m:
            a, b, c = b, c, a
        return (a, b, c)

    def triangles(self):
        seen = set()
        for (a, b), c in self.tri.items():
            if GHOST in (a, b, c):
                continue
            t = self._canon((a, b, c))
            seen.add(t)
        return seen


@dataclass
class DelaunayComplex:
    sites: tuple
    center: Optional[Point2]
    vertices: tuple
    edges: tuple
    triangles: tuple
    collinear: bool = False
    # directed-edge -> third vertex of the CCW triangle on its left (GHOST for hull)
    _left: dict = field(default_factory=dict, repr=False)
    _nbrs: dict = field(default_factory=dict, repr=False)

    @property
    def simplices(self) -> tuple:
        return self.vertices + self.edges + self.triangles

    def neighbors(self, i) -> tuple:
        return self._nbrs.get(i, ())

    def cofaces(self, sigma) -> tuple:
        sigma = tuple(sigma)
        k = len(sigma)
        pool = self.edges if k == 1 else (self.triangles if k == 2 else ())
        return tuple(t for t in pool if set(sigma) <= set(t))

    def faces(self, sigma) -> tuple:
        sigma = tuple(sigma)
        if len(sigma) == 1:
            return ()
        from itertools import combinations
        return tuple(c for c in combinations(sigma, len(sigma) - 1))


def check_sites(sites: Sequence[Point2]):
    if len(sites) == 0:
        raise DegenerateInput("no sites")
    seen = {}
    for i, p in enumerate(sites):
        if p in seen:
            raise DegenerateInput(f"duplicate site {p}", sites=(seen[p], i))
        seen[p] = i


def check_center(sites: Sequence[Point2], q: Point2, strict: bool = True):
    """Index of q's Voronoi cell.  strict=False tolerates q on a Voronoi edge or vertex."""
    best = None
    who = []
    for i, p in enumerate(sites):
        d = sq_dist(p, q)
        if d == 0:
            raise CenterEqualsSite(f"center coincides with site {i}", sites=(i,))
        if best is None or d < best:
            best, who = d, [i]
        elif d == best:
            who.append(i)
    if len(who) > 1 and strict:
        raise CenterDegenerate("center lies on a Voronoi edge or vertex", sites=who)
    return who[0]


def triangulate(sites, center=None, seed: int = 0, strict_center: bool = True) -> DelaunayComplex:
    """Delaunay triangulation; accepts a SiteSet or a sequence of points.

    The absolute construction passes strict_center=False: it only needs q to
    differ from every site.
    """
    if isinstance(sites, SiteSet):
        center = sites.center
        sites = sites.sites
    sites = tuple(Point2(rat(p[0]), rat(p[1])) for p in sites)
    check_sites(sites)
    if center is not None:
        center = Point2(rat(center[0]), rat(center[1]))
        check_center(sites, center, strict_center)
    n = len(sites)
    verts = tuple((i,) for i in range(n))
    if n == 1:
        return DelaunayComplex(sites, center, verts, (), ())
    pts = _scaled_ints(sites)

    # first non-collinear triple
    i0, i1 = 0, 1
    i2 = next((k for k in range(2, n) if _orient(pts[i0], pts[i1], pts[k]) != 0), None)
    if i2 is None:
        order = sorted(range(n), key=lambda k: (pts[k][0], pts[k][1]))
        edges = tuple(sorted(tuple(sorted((order[k], order[k + 1]))) for k in range(n - 1)))
        nbrs = {}
        for a, b in edges:
            nbrs.setdefault(a, []).append(b)
            nbrs.setdefault(b, []).append(a)
        return DelaunayComplex(sites, center, verts, edges, (), collinear=True,
                               _nbrs={k: tuple(sorted(v)) for k, v in nbrs.items()})
    if _orient(pts[i0], pts[i1], pts[i2]) < 0:
        i1, i2 = i2, i1
    bw = _BW(pts)
    bw._add(i0, i1, i2)
    bw._add(i1, i0, GHOST)
    bw._add(i2, i1, GHOST)
    bw._add(i0, i2, GHOST)
    rest = [k for k in range(n) if k not in (i0, i1, i2)]
    if rest:
        xs = [pts[k][0] for k in range(n)]
        ys = [pts[k][1] for k in range(n)]
        x0, y0 = min(xs), min(ys)
        span = max(max(xs) - x0, max(ys) - y0, 1)
        rest.sort(key=lambda k: _hilbert_key(((pts[k][0] - x0) * 65535) // span,
                                             ((pts[k][1] - y0) * 65535) // span))
    rng = random.Random(seed)
    for k in rest:
        bw.insert(k, rng)

    tris = bw.triangles()
    # strict empty-circle check across every interior edge
    for (a, b), c in bw.tri.items():
        if GHOST in (a, b, c) or a > b:
            continue
        d = bw.tri.get((b, a))
        if d is None or d == GHOST:
            continue
        if _incircle(pts[a], pts[b], pts[c], pts[d]) >= 0:
            raise DegenerateInput("cocircular sites", sites=tuple(sorted((a, b, c, d))))
    left = {}
    edge_set = set()
    nbrs = {}
    for (a, b), c in bw.tri.items():
        if a == GHOST or b == GHOST:
            continue
        left[(a, b)] = c
        edge_set.add((min(a, b), max(a, b)))
    for a, b in edge_set:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    return DelaunayComplex(
        sites, center, verts,
        tuple(sorted(edge_set)),
        tuple(sorted(tuple(sorted(t)) for t in tris)),
        _left=left,
        _nbrs={k: tuple(sorted(v)) for k, v in nbrs.items()},
    )


@dataclass(frozen=True)
class VoronoiFace:
    simplex: tuple
    geometry: object
    nearest_site: int


def voronoi_cell(c: DelaunayComplex, i: int) -> ConvexRegion:
    p = c.sites[i]
    return ConvexRegion([bisector_halfplane(p, c.sites[j]) for j in c.neighbors(i)])


def voronoi_face(c: DelaunayComplex, sigma) -> VoronoiFace:
    sigma = tuple(sorted(sigma))
    S = c.sites
    if len(sigma) == 1:
        return VoronoiFace(sigma, voronoi_cell(c, sigma[0]), sigma[0])
    if len(sigma) == 3:
        a, b, cc = (S[k] for k in sigma)
        return VoronoiFace(sigma, circumcenter(a, b, cc), sigma[0])
    if len(sigma) != 2:
        raise ValueError(f"bad simplex {sigma}")
    i, j = sigma
    if sigma not in c.edges:
        raise ValueError(f"{sigma} is not a Delaunay edge")
    pi, pj = S[i], S[j]
    if c.collinear or not c._left:
        # bisector line: halfplane closer to i is <= 0
        l = bisector_halfplane(pi, pj)
        return VoronoiFace(sigma, l, i)
    ends = []
    for a, b in ((i, j), (j, i)):
        k = c._left.get((a, b), GHOST)
        if k != GHOST:
            ends.append((a, b, k))
    if len(ends) == 2:
        c1 = circumcenter(S[ends[0][0]], S[ends[0][1]], S[ends[0][2]])
        c2 = circumcenter(S[ends[1][0]], S[ends[1][1]], S[ends[1][2]])
        return VoronoiFace(sigma, Segment2(c1, c2), i)
    a, b, k = ends[0]
    cc = circumcenter(S[a], S[b], S[k])
    # outward normal of the hull edge a->b (third vertex k on its left)
    dx, dy = S[b][0] - S[a][0], S[b][1] - S[a][1]
    return VoronoiFace(sigma, Ray2(cc, Point2(dy, -dx)), i)


def locate_center(c: DelaunayComplex) -> int:
    """Index of the site whose cell strictly contains the center."""
    return check_center(c.sites, c.center)
