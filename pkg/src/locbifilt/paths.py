"""Minimizing and maximizing paths of (V, p, q).

For a closed convex face V and points p, q, the minimizing path is the curve
of points of V closest to q inside growing discs around p, and the maximizing
path the curve of farthest points.  Both are polygonal chains.

Two-dimensional faces are handled by a walk: at every chain vertex the
candidate directions are the bridge (or anti-bridge) direction and the
boundary edges through the current point.  Each direction is ranked by the
local expansion of f = |x - q|^2 as a function of s = |x - p|^2, and the walk
follows the best improving one until the next event.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

from .errors import EmptyFace, PEqualsQ
from .kernel import (ZERO, ConvexRegion, Line2, Point2, Ray2, Segment2, clip_to_range,
                     cross, dot, face_dim, line_of, orient2d, param_frame, project_to_line,
                     sign, sq_dist, sq_norm)


class PolyChain(NamedTuple):
    vertices: tuple
    terminal_ray: Optional[Ray2] = None

    def segments(self):
        vs = self.vertices
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]


class KeyValues(NamedTuple):
    s0: object
    s1: object
    r_at_s0: object
    r1: object


def _clamp_on(V, x):
    o, d, lo, hi = param_frame(V)
    t = dot((x[0] - o[0], x[1] - o[1]), d) / sq_norm(d)
    if lo is not None and t < lo:
        t = lo
    if hi is not None and t > hi:
        t = hi
    return Point2(o[0] + t * d[0], o[1] + t * d[1])


def nearest_point(V, x) -> Point2:
    x = Point2(*x)
    if isinstance(V, Point2):
        return V
    if isinstance(V, ConvexRegion):
        if V.contains(x):
            return x
        best = None
        for e in V.edges:
            c = _clamp_on(e.as_object(), x)
            d = sq_dist(c, x)
            if best is None or d < best[0] or (d == best[0] and c < best[1]):
                best = (d, c)
        if best is None:
            raise EmptyFace("empty face")
        return best[1]
    return _clamp_on(V, x)


def farthest_point(V, x) -> Optional[Point2]:
    if isinstance(V, Point2):
        return V
    if isinstance(V, Segment2):
        return V.b if sq_dist(V.b, x) > sq_dist(V.a, x) else V.a
    if isinstance(V, (Ray2, Line2)):
        return None
    if not V.bounded:
        return None
    return min(V.vertices, key=lambda v: (-sq_dist(v, x), v))


def _clip_to_face(V, o, d, lo, hi):
    """Intersect {o + t d : lo <= t <= hi} with the face V; (lo, hi) or None."""
    if isinstance(V, ConvexRegion):
        return V.clip(o, d, lo, hi)
    if isinstance(V, Point2):
        rel = (V[0] - o[0], V[1] - o[1])
        if cross(d, rel) != 0:
            return None
        t = dot(rel, d) / sq_norm(d)
        if (lo is not None and t < lo) or (hi is not None and t > hi):
            return None
        return t, t
    W = line_of(V)
    wo, wd, wlo, whi = param_frame(V)
    k = W.A * d[0] + W.B * d[1]
    c0 = W.value(o)
    if k != 0:
        t = -c0 / k
        if (lo is not None and t < lo) or (hi is not None and t > hi):
            return None
        x = Point2(o[0] + t * d[0], o[1] + t * d[1])
        tv = dot((x[0] - wo[0], x[1] - wo[1]), wd) / sq_norm(wd)
        if (wlo is not None and tv < wlo) or (whi is not None and tv > whi):
            return None
        return t, t
    if c0 != 0:
        return None
    # collinear: map V's parameter range into t
    dd = sq_norm(d)
    to = dot((wo[0] - o[0], wo[1] - o[1]), d) / dd
    sc = dot(wd, d) / dd          # t = to + sc * tv
    ends = []
    for tv in (wlo, whi):
        ends.append(None if tv is None else to + sc * tv)
    if sc > 0:
        a, b = ends
    else:
        b, a = ends
    if a is not None and (lo is None or a > lo):
        lo = a
    if b is not None and (hi is None or b < hi):
        hi = b
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def _range_object(o, d, rng):
    if rng is None:
        return None
    return clip_to_range(o, d, *rng)


def bridge(V, p, q):
    """V intersected with the segment pq."""
    if p == q:
        return p if _clip_to_face(V, p, (1, 0), ZERO, ZERO) is not None else None
    return _range_object(p, q - p, _clip_to_face(V, p, q - p, ZERO, 1))


def anti_bridge(V, p, q):
    """V intersected with the ray from p pointing away from q."""
    if p == q:
        raise PEqualsQ("anti-bridge needs p != q")
    return _range_object(p, p - q, _clip_to_face(V, p, p - q, ZERO, None))


def dimension_reduce(V, p, q):
    W = line_of(V)
    pp = project_to_line(p, W)
    qq = project_to_line(q, W)
    return pp, qq, sq_dist(p, pp)


def _norm_dir(d) -> Point2:
    m = max(abs(d[0]), abs(d[1]))
    return Point2(d[0] / m, d[1] / m)


def _merge(chain):
    out = []
    for v in chain:
        if out and out[-1] == v:
            continue
        while len(out) >= 2 and orient2d(out[-2], out[-1], v) == 0 and \
                dot(out[-1] - out[-2], v - out[-1]) > 0:
            out.pop()
        out.append(v)
    return out


def _keys(chain: PolyChain, p, q, bounded_end=True) -> KeyValues:
    a = chain.vertices[0]
    s0, r0 = sq_dist(p, a), sq_dist(q, a)
    if chain.terminal_ray is not None:
        return KeyValues(s0, None, r0, None)
    b = chain.vertices[-1]
    return KeyValues(s0, sq_dist(p, b), r0, sq_dist(q, b))


# ---------------------------------------------------------------------------
# planar walk


def _germ(x, d, p, q):
    """Expansion of f in s along direction d: (sqrt-order, linear, quadratic) terms."""
    a = (x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1]
    if a < 0:
        return None
    b = (x[0] - q[0]) * d[0] + (x[1] - q[1]) * d[1]
    dd = d[0] * d[0] + d[1] * d[1]
    if a == 0:
        return (sign(b) * b * b / dd, 1, ZERO)
    return (ZERO, b / a, dd * (a - b) / (4 * a * a * a))


def _on_bridge(x, p, q, maximize) -> bool:
    if orient2d(p, q, x) != 0:
        return False
    lam = dot(x - p, q - p) / sq_norm(q - p)
    if maximize:
        return lam <= 0
    return 0 <= lam < 1


def _candidates(V: ConvexRegion, x, p, q, maximize):
    dirs = []
    if p != q and _on_bridge(x, p, q, maximize):
        d = (p - q) if maximize else (q - p)
        rng = V.clip(x, d, ZERO, None)
        if rng is not None and (rng[1] is None or rng[1] > 0):
            dirs.append(Point2(*d))
    for e, pos in V.edges_at(x):
        d = e.direction
        if pos in ("start", "inner"):
            dirs.append(d)
        if pos in ("end", "inner"):
            dirs.append(Point2(-d[0], -d[1]))
    return dirs


def _line_crossing(x, d, a, e):
    """Parameters (tau, lam) with x + tau d = a + lam e, or None if parallel."""
    den = cross(d, e)
    if den == 0:
        return None
    w = (a[0] - x[0], a[1] - x[1])
    return cross(w, e) / den, cross(w, d) / den


def _advance(V: ConvexRegion, x, d, p, q, maximize):
    rng = V.clip(x, d, ZERO, None)
    hi = rng[1] if rng is not None else ZERO
    events = [] if hi is None else [hi]
    if not maximize:
        tq = dot(q - x, d) / sq_norm(d)
        if tq > 0:
            events.append(tq)
    if p != q:
        e = (p - q) if maximize else (q - p)
        hit = _line_crossing(x, d, p, e)
        if hit is not None:
            tau, lam = hit
            if tau > 0 and lam >= 0 and (maximize or lam <= 1):
                events.append(tau)
    if not events:
        return None
    return min(events)


def _walk(V: ConvexRegion, p, q, start, maximize):
    x = start
    chain = [x]
    ray = None
    limit = 4 * len(V.edges) + 16
    for _ in range(limit):
        best = None
        for d in _candidates(V, x, p, q, maximize):
            g = _germ(x, d, p, q)
            if g is None:
                continue
            if best is None or (g > best[0] if maximize else g < best[0]):
                best = (g, d)
        if best is None:
            break
        g, d = best
        if (maximize and g <= (0, 0, 0)) or (not maximize and g >= (0, 0, 0)):
            break
        tau = _advance(V, x, d, p, q, maximize)
        if tau is None:
            ray = Ray2(x, _norm_dir(d))
            break
        x = Point2(x[0] + tau * d[0], x[1] + tau * d[1])
        chain.append(x)
    else:
        raise RuntimeError("path walk did not terminate")
    chain = _merge(chain)
    if ray is not None and len(chain) >= 2:
        a, b = chain[-2], chain[-1]
        if orient2d(a, b, b + ray.direction) == 0 and dot(b - a, ray.direction) > 0:
            chain.pop()
            ray = Ray2(chain[-1], ray.direction)
    return PolyChain(tuple(chain), ray)


# ---------------------------------------------------------------------------
# public entry points


def minimizing_path(V, p, q):
    p, q = Point2(*p), Point2(*q)
    dim = face_dim(V)
    if dim == 0:
        chain = PolyChain((V,))
    elif dim == 1:
        a = _clamp_on(V, p)
        b = _clamp_on(V, q)
        chain = PolyChain((a,) if a == b else (a, b))
    else:
        start = nearest_point(V, p)
        chain = _walk(V, p, q, start, maximize=False)
        target = nearest_point(V, q)
        if chain.vertices[-1] != target or chain.terminal_ray is not None:
            raise RuntimeError(f"minimizing walk ended at {chain.vertices[-1]}, expected {target}")
    return chain, _keys(chain, p, q)


def maximizing_path(V, p, q):
    p, q = Point2(*p), Point2(*q)
    if p == q:
        raise PEqualsQ("maximizing path needs p != q")
    dim = face_dim(V)
    if dim == 0:
        chain = PolyChain((V,))
    elif dim == 1:
        a = _clamp_on(V, p)
        o, d, lo, hi = param_frame(V)
        dd = sq_norm(d)
        tq = dot(q - o, d) / dd
        if (lo is None or tq > lo) and (hi is None or tq < hi):
            raise ValueError("distance to q has an interior local minimum on this face")
        # move away from q's projection
        forward = lo is not None and tq <= lo
        end = hi if forward else lo
        step = d if forward else Point2(-d[0], -d[1])
        if end is None:
            chain = PolyChain((a,), Ray2(a, _norm_dir(step)))
        else:
            b = Point2(o[0] + end * d[0], o[1] + end * d[1])
            chain = PolyChain((a,) if a == b else (a, b))
    else:
        start = nearest_point(V, p)
        chain = _walk(V, p, q, start, maximize=True)
        target = farthest_point(V, q)
        if target is None:
            if chain.terminal_ray is None:
                raise RuntimeError("maximizing walk on an unbounded face ended without a ray")
        elif chain.terminal_ray is not None or sq_dist(chain.vertices[-1], q) != sq_dist(target, q):
            raise RuntimeError(f"maximizing walk ended at {chain.vertices[-1]}, expected {target}")
    return chain, _keys(chain, p, q)
