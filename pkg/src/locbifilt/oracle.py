"""Brute-force ground truth in floating point.

Nothing here calls the path solver or the entry curves.  Extremal values of
f(x) = |x - q|^2 over V cap B_s(p) come from enumerating a finite candidate
set that always contains an optimizer:

* the minimum of a convex function over a convex set is q itself or lies on
  the boundary, which consists of edge pieces and circle arcs;
* on an edge piece f is minimized at the clamped projection of q or at a
  piece end (a vertex or a circle crossing), and maximized at a piece end;
* on a circle arc f is extremal at the (anti-)bridge point p +- sqrt(s) u or
  at an arc end (again a circle crossing).
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ResolutionTooCoarse
from .kernel import ConvexRegion, Point2, circle_line_params, param_frame

TOL = 1e-9
AMBIGUOUS = 1e-7


class _Prepared:
    __slots__ = ("kind", "edges", "lines", "point")

    def __init__(self, V):
        self.point = None
        self.lines = ()
        if isinstance(V, Point2):
            self.kind = 0
            self.point = (float(V[0]), float(V[1]))
            self.edges = ()
        elif isinstance(V, ConvexRegion):
            self.kind = 2
            self.lines = V.float_data()
            self.edges = tuple(self._edge(e.origin, e.direction, e.lo, e.hi) for e in V.edges)
        else:
            self.kind = 1
            self.edges = (self._edge(*param_frame(V)),)

    @staticmethod
    def _edge(o, d, lo, hi):
        return (o, d, (float(o[0]), float(o[1])), (float(d[0]), float(d[1])),
                -math.inf if lo is None else float(lo), math.inf if hi is None else float(hi))

    def inside(self, x, y) -> bool:
        for A, B, C in self.lines:
            v = A * x + B * y + C
            if v > 1e-9 * (abs(A * x) + abs(B * y) + abs(C)) + 1e-300:
                return False
        return True


@lru_cache(maxsize=4096)
def _prepare(V):
    return _Prepared(V)


def _candidates(V, p, q, s, maximize):
    F = _prepare(V)
    s_f = float(s)
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    if s_f < 0:
        return [], (qx, qy)
    pts = []
    if F.kind == 0:
        pts.append(F.point)
    else:
        for o, d, (ox, oy), (dx, dy), lo, hi in F.edges:
            dd = dx * dx + dy * dy
            for t in (lo, hi):
                if math.isfinite(t):
                    pts.append((ox + t * dx, oy + t * dy))
            for cx, cy in ((qx, qy), (px, py)):
                t = ((cx - ox) * dx + (cy - oy) * dy) / dd
                t = min(max(t, lo), hi)
                pts.append((ox + t * dx, oy + t * dy))
            for t in circle_line_params(p, s, o, d):
                if lo - 1e-12 <= t <= hi + 1e-12:
                    t = min(max(t, lo), hi)
                    pts.append((ox + t * dx, oy + t * dy))
        if F.kind == 2:
            for cx, cy in ((qx, qy), (px, py)):
                if F.inside(cx, cy):
                    pts.append((cx, cy))
            ux, uy = qx - px, qy - py
            n = math.hypot(ux, uy)
            if n > 0:
                k = math.sqrt(s_f) / n
                if maximize:
                    k = -k
                c = (px + k * ux, py + k * uy)
                if F.inside(*c):
                    pts.append(c)
    lim = s_f * (1 + 1e-12) + 1e-13 * (1 + px * px + py * py)
    out = []
    for x, y in pts:
        if (x - px) ** 2 + (y - py) ** 2 <= lim:
            out.append((x, y))
    return out, (qx, qy)


def oracle_min_r(V, p, q, s):
    """min |x - q|^2 over V cap B_s(p), or None when the intersection is empty."""
    pts, (qx, qy) = _candidates(V, p, q, s, False)
    if not pts:
        return None
    return min((x - qx) ** 2 + (y - qy) ** 2 for x, y in pts)


def oracle_max_r(V, p, q, s):
    pts, (qx, qy) = _candidates(V, p, q, s, True)
    if not pts:
        return None
    return max((x - qx) ** 2 + (y - qy) ** 2 for x, y in pts)


def oracle_s0(V, p) -> float:
    """Squared distance from p to V by clamped projections."""
    F = _prepare(V)
    px, py = float(p[0]), float(p[1])
    if F.kind == 0:
        return (F.point[0] - px) ** 2 + (F.point[1] - py) ** 2
    if F.kind == 2 and F.inside(px, py):
        return 0.0
    best = math.inf
    for _o, _d, (ox, oy), (dx, dy), lo, hi in F.edges:
        t = ((px - ox) * dx + (py - oy) * dy) / (dx * dx + dy * dy)
        t = min(max(t, lo), hi)
        best = min(best, (ox + t * dx - px) ** 2 + (oy + t * dy - py) ** 2)
    return best


# ---------------------------------------------------------------------------
# dense sampling fallback (guards the candidate enumeration)


def dense_extreme_r(V, p, q, s, maximize, samples=10_000):
    """Sample the boundary of V cap B_s(p), then refine locally by ternary search."""
    F = _prepare(V)
    s_f = float(s)
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    rad = math.sqrt(s_f)

    def f(x, y):
        return (x - qx) ** 2 + (y - qy) ** 2

    better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
    pieces = []   # callables on [0, 1]
    if F.kind == 0:
        x, y = F.point
        return f(x, y) if (x - px) ** 2 + (y - py) ** 2 <= s_f * (1 + 1e-12) else None
    for _o, _d, (ox, oy), (dx, dy), lo, hi in F.edges:
        # part of the edge line inside the disc
        a = dx * dx + dy * dy
        b = 2 * ((ox - px) * dx + (oy - py) * dy)
        c = (ox - px) ** 2 + (oy - py) ** 2 - s_f
        disc = b * b - 4 * a * c
        if disc < 0:
            continue
        r1 = (-b - math.sqrt(disc)) / (2 * a)
        r2 = (-b + math.sqrt(disc)) / (2 * a)
        t0, t1 = max(lo, r1), min(hi, r2)
        if t0 > t1:
            continue
        pieces.append(lambda u, ox=ox, oy=oy, dx=dx, dy=dy, t0=t0, t1=t1:
                      (ox + (t0 + u * (t1 - t0)) * dx, oy + (t0 + u * (t1 - t0)) * dy))
    if F.kind == 2:
        pieces.append(lambda u: (px + rad * math.cos(2 * math.pi * u), py + rad * math.sin(2 * math.pi * u)))
        if F.inside(qx, qy) and (qx - px) ** 2 + (qy - py) ** 2 <= s_f and not maximize:
            return 0.0
    per = max(2, samples // max(1, len(pieces)))
    best = None
    for k, g in enumerate(pieces):
        is_arc = F.kind == 2 and k == len(pieces) - 1
        for i in range(per + 1):
            u = i / per
            x, y = g(u)
            if is_arc and not F.inside(x, y):
                continue
            v = f(x, y)
            if best is None or better(v, best[0]):
                best = (v, k, u)
    if best is None:
        return None
    v, k, u = best
    g = pieces[k]
    is_arc = F.kind == 2 and k == len(pieces) - 1
    a, b = max(0.0, u - 1.0 / per), min(1.0, u + 1.0 / per)
    for _ in range(100):
        m1 = a + (b - a) / 3
        m2 = b - (b - a) / 3
        f1, f2 = f(*g(m1)), f(*g(m2))
        if is_arc:
            if not F.inside(*g(m1)):
                f1 = -math.inf if maximize else math.inf
            if not F.inside(*g(m2)):
                f2 = -math.inf if maximize else math.inf
        if better(f1, f2) or f1 == f2:
            b = m2
        else:
            a = m1
    x, y = g((a + b) / 2)
    w = f(x, y)
    if is_arc and not F.inside(x, y):
        return v
    return w if better(w, v) else v


# ---------------------------------------------------------------------------
# nerves


def oracle_nerve(sites, s, r, mode="absolute", faces=None):
    """Simplices present at (s, r) by direct membership.

    ``faces`` optionally maps simplex -> (face, p); otherwise the Delaunay
    (absolute) or subdivision nerve (relative) faces are computed.
    Returns (set of simplices, ambiguous flag).
    """
    q = sites.center
    if faces is None:
        faces = _default_faces(sites, mode)
    present = set()
    ambiguous = False
    s_f, r_f = float(s), float(r)
    for sigma, (V, p) in faces.items():
        s0 = oracle_s0(V, p)
        if abs(s_f - s0) < AMBIGUOUS * (1 + s0):
            ambiguous = True
        if mode == "absolute":
            m = oracle_min_r(V, p, q, s)
            if m is None:
                continue
            if abs(m - r_f) < AMBIGUOUS * (1 + abs(r_f)):
                ambiguous = True
            if m <= r_f + TOL * (1 + abs(r_f)):
                present.add(sigma)
        else:
            m = oracle_max_r(V, p, q, s)
            if m is None:
                continue
            if abs(m - r_f) < AMBIGUOUS * (1 + abs(r_f)):
                ambiguous = True
            if m >= r_f - TOL * (1 + abs(r_f)):
                present.add(sigma)
    return present, ambiguous


def _default_faces(sites, mode):
    if mode == "absolute":
        from .delaunay import triangulate, voronoi_face
        c = triangulate(sites, strict_center=False)
        out = {}
        for sigma in c.simplices:
            f = voronoi_face(c, sigma)
            out[sigma] = (f.geometry, c.sites[f.nearest_site])
        return out
    from .subdivision import nerve_of_pair, subdivide
    nerve = nerve_of_pair(subdivide(sites))
    return {sigma: (F, p) for sigma, (F, p) in nerve.faces.items()}


# ---------------------------------------------------------------------------
# raster homology


def raster_grid(sites, s, r, resolution, mode):
    pts = np.array([[float(x), float(y)] for x, y in sites.sites])
    q = (float(sites.center[0]), float(sites.center[1]))
    rs = math.sqrt(max(float(s), 0.0))
    rr = math.sqrt(max(float(r), 0.0))
    if mode == "absolute":
        lo = np.maximum(pts.min(axis=0) - rs, np.array(q) - rr)
        hi = np.minimum(pts.max(axis=0) + rs, np.array(q) + rr)
    else:
        lo = pts.min(axis=0) - rs
        hi = pts.max(axis=0) + rs
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    h = span / (resolution - 8)
    x0 = lo[0] - 4 * h
    y0 = lo[1] - 4 * h
    xs = x0 + (np.arange(resolution) + 0.5) * h
    ys = y0 + (np.arange(resolution) + 0.5) * h
    return xs, ys, h


def raster_mask(sites, s, r, resolution=512, mode="absolute", grid=None):
    xs, ys, h = grid if grid is not None else raster_grid(sites, s, r, resolution, mode)
    px = np.array([float(p[0]) for p in sites.sites])
    py = np.array([float(p[1]) for p in sites.sites])
    q = sites.center
    mask = _kernels.occupancy(xs, ys, px, py, float(s), float(q[0]), float(q[1]), float(r),
                              mode == "relative")
    return mask, h


def raster_betti(sites, s, r, resolution=512, mode="absolute"):
    """(beta0, beta1) of L_{s,r} (absolute) or L_s minus the open r-ball (relative).

    Sampling pixel centres alone breaks thin wedges where two circles cross
    into specks.  Components are therefore counted on the pixels within half
    a pixel diagonal of the set (every pixel the set touches, 4-connected per
    component) and holes on the pixels within that distance of the
    complement.  The caller's margin keeps both offsets topology-neutral.
    """
    if resolution < 64:
        raise ResolutionTooCoarse(f"resolution {resolution} < 64")
    xs, ys, h = raster_grid(sites, s, r, resolution, mode)
    if float(s) > 0 and math.sqrt(float(s)) < 4 * h:
        raise ResolutionTooCoarse("site discs are smaller than four pixels")
    if mode == "absolute" and float(r) > 0 and math.sqrt(float(r)) < 4 * h:
        raise ResolutionTooCoarse("center disc is smaller than four pixels")
    px = np.array([float(p[0]) for p in sites.sites])
    py = np.array([float(p[1]) for p in sites.sites])
    q = sites.center
    dX, dC = _kernels.distance_fields(xs, ys, px, py, float(s), float(q[0]), float(q[1]),
                                      float(r), mode == "relative")
    delta = 0.5 * math.sqrt(2.0) * h * 1.01
    grown = dX <= delta
    holes = dC <= delta
    b0 = _kernels.count_components(grown, conn8=False) if grown.any() else 0
    b1 = _kernels.count_components(holes, conn8=True, drop_border=True)
    return b0, b1


def raster_pixel(sites, s, r, resolution=512, mode="absolute") -> float:
    return raster_grid(sites, s, r, resolution, mode)[2]
