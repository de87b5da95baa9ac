"""The good-cover subdivision of the Voronoi diagram around the center q.

q's own cell is cut by the line through its site and q and by the
perpendicular to that line at q, so q becomes a vertex with four sectors
around it.  Then every Voronoi edge whose supporting line receives q's
orthogonal projection q^ strictly inside the edge is fixed by cutting the
polygon on q's side along line(q, q^).  All cut lines pass through q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .delaunay import SiteSet, locate_center, triangulate, voronoi_cell, voronoi_face
from .errors import CenterDegenerate
from .kernel import (ConvexRegion, Line2, Point2, Ray2, Segment2, clip_to_range, dot,
                     line_of, param_frame, project_to_line, sq_dist, sq_norm)


@dataclass
class Polygon:
    region: ConvexRegion
    site: int


@dataclass
class SubEdge:
    geometry: object           # Segment2 | Ray2 | Line2
    polygons: tuple            # the two incident polygon indices
    cut: bool = False


@dataclass
class Subdivision:
    sites: SiteSet
    polygons: list
    edges: list
    vertices: dict             # Point2 -> sorted tuple of incident polygons
    cut_lines: list
    problematic: list
    center_site: int
    n_cells: int = 0

    @property
    def cut_edges(self):
        return [e for e in self.edges if e.cut]


def _canon_line(l: Line2) -> tuple:
    A, B, C = l.normalized()
    if A < 0 or (A == 0 and B < 0):
        A, B, C = -A, -B, -C
    return (A, B, C)


def problematic_edges(c, q):
    """Voronoi edges whose supporting line receives q's projection strictly inside.

    Returns [(edge, q_hat)].  A projection that lands exactly on an edge end
    is not problematic.
    """
    out = []
    for e in c.edges:
        g = voronoi_face(c, e).geometry
        qh = project_to_line(q, line_of(g))
        o, d, lo, hi = param_frame(g)
        t = dot(qh - o, d) / sq_norm(d)
        if (lo is None or t > lo) and (hi is None or t < hi):
            out.append((e, qh))
    return out


def _endpoint_projections(c, q):
    bad = []
    for e in c.edges:
        g = voronoi_face(c, e).geometry
        qh = project_to_line(q, line_of(g))
        o, d, lo, hi = param_frame(g)
        t = dot(qh - o, d) / sq_norm(d)
        if t == lo or t == hi:
            bad.append(e)
    return bad


def subdivide(sites: SiteSet) -> Subdivision:
    c = triangulate(sites)
    q = sites.center
    iq = locate_center(c)
    bad = _endpoint_projections(c, q)
    if bad:
        raise CenterDegenerate("projection of the center hits a Voronoi vertex",
                               sites=tuple(sorted(set(i for e in bad for i in e))))
    n = len(c.sites)
    polys = []
    cuts = []
    for i in range(n):
        cell = voronoi_cell(c, i)
        if i != iq:
            polys.append(Polygon(cell, i))
            continue
        pq = c.sites[i]
        l1 = Line2.through(pq, q)
        l2 = Line2.from_point_dir(q, Point2(-(q[1] - pq[1]), q[0] - pq[0]))
        cuts += [l1, l2]
        for a in cell.split(l1):
            for b in a.split(l2):
                if b is None:
                    raise CenterDegenerate("center is not interior to its cell")
                polys.append(Polygon(b, i))
    probs = problematic_edges(c, q)
    for e, qh in probs:
        i, j = e
        side = i if sq_dist(q, c.sites[i]) < sq_dist(q, c.sites[j]) else j
        d = q - qh
        line = Line2.through(qh, q)
        for k, P in enumerate(polys):
            if P.site != side or not P.region.contains(qh):
                continue
            rng = P.region.clip(qh, d, 0, None)
            if rng is None or (rng[1] is not None and rng[1] <= 0):
                continue
            a, b = P.region.split(line)
            if a is not None and b is not None:
                polys[k:k + 1] = [Polygon(a, side), Polygon(b, side)]
                cuts.append(line)
            break
    edges, vertices = _edges_and_vertices(polys, cuts)
    return Subdivision(sites, polys, edges, vertices, cuts, probs, iq, n_cells=n)


def _edges_and_vertices(polys, cuts):
    # collect polygon corners on every supporting line
    on_line = {}
    corners = set()
    for P in polys:
        for e in P.region.edges:
            key = _canon_line(e.line)
            s = on_line.setdefault(key, set())
            for v in (e.start, e.end):
                if v is not None:
                    s.add(v)
                    corners.add(v)
    cut_keys = {_canon_line(l) for l in cuts}
    pieces = {}
    for k, P in enumerate(polys):
        for e in P.region.edges:
            key = _canon_line(e.line)
            cd = Point2(-key[1], key[0])             # canonical direction
            sgn = 1 if dot(cd, e.direction) > 0 else -1
            ts = sorted({e.param(v) for v in on_line[key]
                         if (e.lo is None or e.param(v) >= e.lo) and (e.hi is None or e.param(v) <= e.hi)})
            bounds = [e.lo] + [t for t in ts if t != e.lo and t != e.hi] + [e.hi]
            for a, b in zip(bounds, bounds[1:]):
                pa = None if a is None else e.at(a)
                pb = None if b is None else e.at(b)
                lo_pt, hi_pt = (pa, pb) if sgn > 0 else (pb, pa)
                pk = (key, lo_pt, hi_pt)
                pieces.setdefault(pk, []).append(k)
    edges = []
    vertices = {}
    for (key, lo_pt, hi_pt), owners in sorted(pieces.items(), key=lambda kv: repr(kv[0])):
        owners = tuple(sorted(set(owners)))
        if len(owners) != 2:
            raise RuntimeError(f"subdivision edge with {len(owners)} incident polygons")
        cd = Point2(-key[1], key[0])
        if lo_pt is not None and hi_pt is not None:
            g = Segment2(lo_pt, hi_pt)
        elif lo_pt is not None:
            g = Ray2(lo_pt, cd)
        elif hi_pt is not None:
            g = Ray2(hi_pt, Point2(-cd[0], -cd[1]))
        else:
            g = Line2(*key)
        edges.append(SubEdge(g, owners, key in cut_keys))
        for v in (lo_pt, hi_pt):
            if v is not None:
                vertices.setdefault(v, set()).update(owners)
    return edges, {v: tuple(sorted(s)) for v, s in vertices.items()}


# ---------------------------------------------------------------------------
# nerve


@dataclass
class NervePair:
    subdivision: Subdivision
    simplices: tuple
    faces: dict                       # simplex -> (F, p)
    owner: dict                       # simplex -> site index
    ambient: dict = field(default_factory=dict)
    relative: dict = field(default_factory=dict)


def _merge_pieces(geoms):
    """Union of collinear adjacent pieces as a single segment/ray/line."""
    if len(geoms) == 1:
        return geoms[0]
    W = line_of(geoms[0])
    o, d = W.anchor(), W.direction()
    lo, hi, lo_inf, hi_inf = None, None, False, False
    for g in geoms:
        go, gd, glo, ghi = param_frame(g)
        ends = []
        for t in (glo, ghi):
            ends.append(None if t is None else dot(go + gd.scale(t) - o, d) / sq_norm(d))
        sc = dot(gd, d)
        a, b = (ends[0], ends[1]) if sc > 0 else (ends[1], ends[0])
        if a is None:
            lo_inf = True
        elif lo is None or a < lo:
            lo = a
        if b is None:
            hi_inf = True
        elif hi is None or b > hi:
            hi = b
    return clip_to_range(o, d, None if lo_inf else lo, None if hi_inf else hi)


def nerve_of_pair(sub: Subdivision) -> NervePair:
    polys = sub.polygons
    sites = sub.sites.sites
    faces = {}
    for k, P in enumerate(polys):
        faces[(k,)] = P.region
    shared = {}
    for e in sub.edges:
        shared.setdefault(e.polygons, []).append(e.geometry)
    for pair, geoms in shared.items():
        faces[pair] = _merge_pieces(geoms)
    for v, star in sub.vertices.items():
        for k in range(2, len(star) + 1):
            for sigma in combinations(star, k):
                if sigma not in faces:
                    faces[sigma] = v
    simplices = tuple(sorted(faces, key=lambda s: (len(s), s)))
    owner = {s: polys[s[0]].site for s in simplices}
    return NervePair(sub, simplices, {s: (faces[s], sites[owner[s]]) for s in simplices}, owner)


def relative_entry_curves(sub: Subdivision, nerve: NervePair, jobs: int = 1) -> NervePair:
    from .curves import relative_curves_for
    q = sub.sites.center
    items = [(s, nerve.faces[s][0], nerve.faces[s][1]) for s in nerve.simplices]
    for s, amb, rel in relative_curves_for(items, q, jobs=jobs):
        nerve.ambient[s] = amb
        nerve.relative[s] = rel
    return nerve


def relative_pipeline(sites: SiteSet, jobs: int = 1) -> NervePair:
    sub = subdivide(sites)
    return relative_entry_curves(sub, nerve_of_pair(sub), jobs=jobs)


def polygon_vertices_in_box(region: ConvexRegion, box: ConvexRegion):
    """Corners of region clipped to a bounding box, for drawing."""
    clipped = ConvexRegion(region.lines + box.lines)
    return list(clipped.vertices)
