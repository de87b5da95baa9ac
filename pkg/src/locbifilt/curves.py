"""Entry curves in the (s, r) parameter plane.

A chain segment a -> b walked with t in [0, 1] maps to
    s(t) = |a + t d - p|^2,  r(t) = |a + t d - q|^2,  d = b - a,
i.e. (s, r)(t) = u t^2 + v t + w with u = (|d|^2, |d|^2).  The arc is a line
piece exactly when u and v are parallel, i.e. when d is orthogonal to p - q,
and a parabola otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from gmpy2 import mpq

from .kernel import MPQ, ONE, ZERO, RInterval, Surd, cross, dot, quadratic_roots, rat, sq_dist
from .paths import KeyValues, PolyChain, maximizing_path, minimizing_path, nearest_point
from . import polyroots as pr

ABSOLUTE = "absolute_min"
RELATIVE = "relative_max"
VERTICAL = "vertical_only"
DEFAULT_WIDTH = mpq(1, 10 ** 12)


class Arc(NamedTuple):
    u: tuple
    v: tuple
    w: tuple
    t_lo: Optional[MPQ]
    t_hi: Optional[MPQ]
    kind: str

    def at(self, t):
        return (self.u[0] * t * t + self.v[0] * t + self.w[0],
                self.u[1] * t * t + self.v[1] * t + self.w[1])

    @property
    def start(self):
        return None if self.t_lo is None else self.at(self.t_lo)

    @property
    def end(self):
        return None if self.t_hi is None else self.at(self.t_hi)

    def s_poly(self):
        return pr.trim([self.w[0], self.v[0], self.u[0]])

    def r_poly(self):
        return pr.trim([self.w[1], self.v[1], self.u[1]])


def make_arc(u, v, w, t_lo, t_hi) -> Arc:
    kind = "segment" if cross(u, v) == 0 else "parabola"
    return Arc(tuple(u), tuple(v), tuple(w), t_lo, t_hi, kind)


def arc_for_segment(a, d, p, q, t_hi) -> Arc:
    dd = d[0] * d[0] + d[1] * d[1]
    u = (dd, dd)
    v = (2 * dot(a - p, d), 2 * dot(a - q, d))
    w = (sq_dist(a, p), sq_dist(a, q))
    return make_arc(u, v, w, ZERO, t_hi)


@dataclass(frozen=True)
class EntryCurve:
    simplex: tuple
    mode: str
    s0: MPQ
    r_at_s0: Optional[MPQ]
    tail: Optional[tuple]        # (s1, r1)
    arcs: tuple = ()

    @property
    def s1(self):
        return None if self.tail is None else self.tail[0]

    @property
    def r1(self):
        return None if self.tail is None else self.tail[1]

    @property
    def bounded(self) -> bool:
        return self.tail is not None


def curve_from_path(chain: PolyChain, keys: KeyValues, p, q, mode, simplex=()) -> EntryCurve:
    arcs = []
    vs = chain.vertices
    for a, b in zip(vs, vs[1:]):
        arcs.append(arc_for_segment(a, b - a, p, q, ONE))
    if chain.terminal_ray is not None:
        ray = chain.terminal_ray
        arcs.append(arc_for_segment(ray.origin, ray.direction, p, q, None))
        tail = None
    else:
        tail = (keys.s1, keys.r1)
    return EntryCurve(tuple(simplex), mode, keys.s0, keys.r_at_s0, tail, tuple(arcs))


def vertical_curve(simplex, s0) -> EntryCurve:
    return EntryCurve(tuple(simplex), VERTICAL, rat(s0), None, None, ())


# ---------------------------------------------------------------------------
# boundary queries


def _arc_root_for_s(arc: Arc, s) -> Surd:
    """The parameter t with s(t) = s on an arc whose s is increasing."""
    us, vs, ws = arc.u[0], arc.v[0], arc.w[0]
    if us == 0:
        return Surd((s - ws) / vs)
    disc = vs * vs - 4 * us * (ws - s)
    return Surd(-vs / (2 * us), ONE / (2 * us), disc)


def eval_quadratic(coef, t: Surd) -> Surd:
    """c2 t^2 + c1 t + c0 for t = a + b sqrt(d)."""
    c0, c1, c2 = coef
    a, b, d = t.a, t.b, t.d
    return Surd(c2 * (a * a + b * b * d) + c1 * a + c0, (2 * c2 * a + c1) * b, d)


def _covering_arc(curve: EntryCurve, s):
    arcs = curve.arcs
    lo, hi = 0, len(arcs) - 1
    # last arc whose start s is <= s
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if arcs[mid].w[0] <= s:
            lo = mid
        else:
            hi = mid - 1
    return arcs[lo]


def boundary_value(curve: EntryCurve, s) -> Optional[Surd]:
    """Exact boundary r at s (min r absolute, max r relative); None if s < s0."""
    if curve.mode == VERTICAL:
        raise ValueError("vertical-only curves have no boundary value")
    s = rat(s)
    if s < curve.s0:
        return None
    if not curve.arcs:
        return Surd(curve.r_at_s0)
    if curve.tail is not None and s >= curve.tail[0]:
        return Surd(curve.tail[1])
    arc = _covering_arc(curve, s)
    t = _arc_root_for_s(arc, s)
    return eval_quadratic((arc.w[1], arc.v[1], arc.u[1]), t)


def min_r(curve: EntryCurve, s, width=DEFAULT_WIDTH) -> Optional[RInterval]:
    v = boundary_value(curve, s)
    return None if v is None else v.interval(width)


def max_r(curve: EntryCurve, s, width=DEFAULT_WIDTH) -> Optional[RInterval]:
    v = boundary_value(curve, s)
    return None if v is None else v.interval(width)


def contains(curve: EntryCurve, s, r) -> bool:
    s = rat(s)
    if curve.mode == VERTICAL:
        return s >= curve.s0
    v = boundary_value(curve, s)
    if v is None:
        return False
    c = v.cmp(rat(r))
    return c <= 0 if curve.mode == ABSOLUTE else c >= 0


# ---------------------------------------------------------------------------
# pipelines


def absolute_curve(sigma, V, p, q) -> EntryCurve:
    chain, keys = minimizing_path(V, p, q)
    return curve_from_path(chain, keys, p, q, ABSOLUTE, sigma)


def relative_curve(sigma, F, p, q) -> EntryCurve:
    chain, keys = maximizing_path(F, p, q)
    return curve_from_path(chain, keys, p, q, RELATIVE, sigma)


def _abs_worker(args):
    items, q = args
    return [absolute_curve(s, V, p, q) for s, V, p in items]


def _rel_worker(args):
    items, q = args
    out = []
    for s, F, p in items:
        s0 = sq_dist(p, nearest_point(F, p))
        out.append((s, vertical_curve(s, s0), relative_curve(s, F, p, q)))
    return out


def _run(worker, items, q, jobs):
    if jobs <= 1 or len(items) < 64:
        return worker((items, q))
    from concurrent.futures import ProcessPoolExecutor
    k = max(1, len(items) // (4 * jobs))
    chunks = [(items[i:i + k], q) for i in range(0, len(items), k)]
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        for part in ex.map(worker, chunks):
            out.extend(part)
    return out


def relative_curves_for(items, q, jobs=1):
    return _run(_rel_worker, items, q, jobs)


@dataclass
class AbsoluteResult:
    complex: object
    curves: dict          # simplex -> EntryCurve

    @property
    def simplices(self):
        return self.complex.simplices


def absolute_pipeline(sites, jobs: int = 1) -> AbsoluteResult:
    from .delaunay import triangulate, voronoi_face
    c = triangulate(sites, strict_center=False)
    q = c.center
    items = []
    for sigma in c.simplices:
        f = voronoi_face(c, sigma)
        items.append((sigma, f.geometry, c.sites[f.nearest_site]))
    curves = _run(_abs_worker, items, q, jobs)
    return AbsoluteResult(c, {cv.simplex: cv for cv in curves})


# ---------------------------------------------------------------------------
# boundary pieces and pairwise intersection


def boundary_pieces(curve: EntryCurve):
    """Wall, arcs and tail as a list of Arcs (walls and tails have u = 0)."""
    z = (ZERO, ZERO)
    if curve.mode == VERTICAL:
        return [make_arc(z, (ZERO, ONE), (curve.s0, ZERO), None, None)]
    down = curve.mode == RELATIVE
    out = [make_arc(z, (ZERO, -ONE if down else ONE), (curve.s0, curve.r_at_s0), ZERO, None)]
    out.extend(curve.arcs)
    if curve.tail is not None:
        out.append(make_arc(z, (ONE, ZERO), curve.tail, ZERO, None))
    return out


def _poly_lin(c, const):
    c = list(c) or [ZERO]
    return pr.trim([c[0] - const] + c[1:])


def _piece_box(a: Arc):
    """Float bounding box (s0, s1, r0, r1) with infinities for unbounded pieces."""
    ts = [a.t_lo, a.t_hi]
    svals, rvals = [], []
    for t, side in ((a.t_lo, -1), (a.t_hi, 1)):
        for k, vals in ((0, svals), (1, rvals)):
            if t is not None:
                vals.append(float(a.at(t)[k]))
            elif a.u[k] != 0:
                vals.append(math.inf if a.u[k] > 0 else -math.inf)
            elif a.v[k] != 0:
                vals.append(math.inf if a.v[k] * side > 0 else -math.inf)
            else:
                vals.append(float(a.w[k]))
    for k, vals in ((0, svals), (1, rvals)):
        if a.u[k] != 0:
            tv = -a.v[k] / (2 * a.u[k])
            if (ts[0] is None or tv > ts[0]) and (ts[1] is None or tv < ts[1]):
                vals.append(float(a.at(tv)[k]))
    return min(svals), max(svals), min(rvals), max(rvals)


def _boxes_meet(b1, b2) -> bool:
    def sl(x):
        return 1e-9 * (1 + abs(x)) if math.isfinite(x) else 0.0
    return not (b1[1] + sl(b1[1]) < b2[0] - sl(b2[0]) or b2[1] + sl(b2[1]) < b1[0] - sl(b1[0])
                or b1[3] + sl(b1[3]) < b2[2] - sl(b2[2]) or b2[3] + sl(b2[3]) < b1[2] - sl(b1[2]))


class _Implicit:
    """Implicit equation of an arc plus its natural coordinate along the curve."""

    def __init__(self, Q: Arc):
        self.Q = Q
        self.line = Q.kind == "segment"
        if self.line:
            e = Q.v if (Q.v[0] != 0 or Q.v[1] != 0) else Q.u
            self.e = e
            self.ee = e[0] * e[0] + e[1] * e[1]
            self.lo = None if Q.t_lo is None else self._coord_pt(Q.at(Q.t_lo))
            self.hi = None if Q.t_hi is None else self._coord_pt(Q.at(Q.t_hi))
        else:
            self.D = cross(Q.u, Q.v)
            self.lo, self.hi = Q.t_lo, Q.t_hi

    def _coord_pt(self, X):
        w = self.Q.w
        return (self.e[0] * (X[0] - w[0]) + self.e[1] * (X[1] - w[1])) / self.ee

    def substitute(self, P: Arc):
        """(F(t), coord(t)) as polynomials in P's parameter."""
        w = self.Q.w
        xs = _poly_lin([P.w[0], P.v[0], P.u[0]], w[0])
        xr = _poly_lin([P.w[1], P.v[1], P.u[1]], w[1])
        if self.line:
            e = self.e
            F = pr.padd(pr.pscale(xr, e[0]), pr.pscale(xs, -e[1]))
            coord = pr.pscale(pr.padd(pr.pscale(xs, e[0]), pr.pscale(xr, e[1])), ONE / self.ee)
            return F, coord
        u, v, D = self.Q.u, self.Q.v, self.D
        T1 = pr.pscale(pr.padd(pr.pscale(xr, u[0]), pr.pscale(xs, -u[1])), ONE / D)
        T2 = pr.pscale(pr.padd(pr.pscale(xs, v[1]), pr.pscale(xr, -v[0])), ONE / D)
        F = pr.padd(T2, pr.pscale(pr.pmul(T1, T1), -ONE))
        return F, T1

    def point_at(self, c):
        """Point of Q at natural coordinate c (exact)."""
        Q = self.Q
        if self.line:
            return (Q.w[0] + c * self.e[0], Q.w[1] + c * self.e[1])
        return Q.at(c)


def _refined_point(P: Arc, F, iv: RInterval, width):
    if iv.exact:
        x = P.at(iv.lo)
        return (RInterval(x[0], x[0]), RInterval(x[1], x[1]))
    while True:
        rs = _quad_range(P, 0, iv), _quad_range(P, 1, iv)
        if rs[0].width <= width and rs[1].width <= width:
            return rs
        iv = pr.refine(F, iv, iv.width / 16)
        if iv.exact:
            x = P.at(iv.lo)
            return (RInterval(x[0], x[0]), RInterval(x[1], x[1]))


def _quad_range(P: Arc, k, iv: RInterval) -> RInterval:
    vals = [P.at(iv.lo)[k], P.at(iv.hi)[k]]
    if P.u[k] != 0:
        tv = -P.v[k] / (2 * P.u[k])
        if iv.lo < tv < iv.hi:
            vals.append(P.at(tv)[k])
    return RInterval(min(vals), max(vals))


def _poly_range_ends(poly, t_lo, t_hi):
    """Values (or +-inf markers as None with sign) of a polynomial at range ends."""
    out = []
    for t, side in ((t_lo, -1), (t_hi, 1)):
        if t is not None:
            out.append((pr.peval(poly, t), 0))
        else:
            lead = poly[-1] if poly else ZERO
            sgn = (1 if lead > 0 else -1) if pr.deg(poly) >= 1 else 0
            if side < 0 and pr.deg(poly) % 2 == 1:
                sgn = -sgn
            out.append((None, sgn) if sgn != 0 else (pr.peval(poly, ZERO), 0))
    return out


def _overlap(P: Arc, imp: _Implicit, coord):
    """Overlap of P with Q on a common curve, as a coordinate interval or None."""
    ends = _poly_range_ends(coord, P.t_lo, P.t_hi)
    lo_inf = hi_inf = False
    vals = []
    for val, sgn in ends:
        if val is None:
            if sgn < 0:
                lo_inf = True
            else:
                hi_inf = True
        else:
            vals.append(val)
    a = None if lo_inf else min(vals)
    b = None if hi_inf else max(vals)
    qa, qb = imp.lo, imp.hi
    lo = a if qa is None else (qa if a is None else max(a, qa))
    hi = b if qb is None else (qb if b is None else min(b, qb))
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def _intersect_pieces(P: Arc, Q: Arc, width):
    imp = _Implicit(Q)
    F, coord = imp.substitute(P)
    if not F:
        rng = _overlap(P, imp, coord)
        if rng is None:
            return [], False
        lo, hi = rng
        pts = []
        for c in (lo, hi):
            if c is not None:
                x = imp.point_at(c)
                pts.append((RInterval(x[0], x[0]), RInterval(x[1], x[1])))
        return pts, not (lo is not None and hi is not None and lo == hi)
    out = []
    Fs = pr.squarefree(F)
    for iv in pr.isolate(F, P.t_lo, P.t_hi):
        ok = True
        for bound, want in ((imp.lo, 1), (imp.hi, -1)):
            if bound is None:
                continue
            sg, iv = pr.sign_at_root(Fs, iv, _poly_lin(coord, bound))
            if sg * want < 0:
                ok = False
                break
        if ok:
            out.append(_pin(_refined_point(P, Fs, iv, width), P, Q))
    return out, False


def _pin(pt, P: Arc, Q: Arc):
    """Walls fix s and tails fix r exactly; keep those coordinates exact."""
    pt = list(pt)
    for k in (0, 1):
        for A in (P, Q):
            if A.u[k] == 0 and A.v[k] == 0:
                pt[k] = RInterval(A.w[k], A.w[k])
                break
    return tuple(pt)


def _same_point(a, b) -> bool:
    return (a[0].lo <= b[0].hi and b[0].lo <= a[0].hi and a[1].lo <= b[1].hi and b[1].lo <= a[1].hi)


def dedupe_points(pts):
    out = []
    for x in pts:
        if not any(_same_point(x, y) for y in out):
            out.append(x)
    return out


def intersect_curves(c1: EntryCurve, c2: EntryCurve, width=DEFAULT_WIDTH / 100):
    """Intersection points of the two boundaries and an overlap flag."""
    pts = []
    overlap = False
    P1 = boundary_pieces(c1)
    P2 = boundary_pieces(c2)
    B2 = [_piece_box(b) for b in P2]
    for a in P1:
        ba = _piece_box(a)
        for b, bb in zip(P2, B2):
            if not _boxes_meet(ba, bb):
                continue
            got, ov = _intersect_pieces(a, b, width)
            pts.extend(got)
            overlap = overlap or ov
    return dedupe_points(pts), overlap
