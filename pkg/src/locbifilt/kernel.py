"""Exact rational planar primitives.

Everything here works over gmpy2 ``mpq`` rationals.  Square roots only show
up in :class:`Surd`, an exact number ``a + b*sqrt(d)`` with rational a, b, d,
which is enough for the quadratic equations that appear downstream.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cmp_to_key
from typing import NamedTuple, Optional, Sequence, Union

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DegenerateTriangle, EmptyFace

MPQ = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


def rat(x) -> MPQ:
    """Exact rational from int, Fraction, mpq, "num/den" or decimal text.

    Floats are read through their shortest decimal repr, so 0.1 becomes 1/10.
    """
    if isinstance(x, MPQ):
        return x
    if isinstance(x, (int, type(mpz(0)))):
        return mpq(x)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coordinate {x!r}")
        f = Fraction(repr(x))
        return mpq(f.numerator, f.denominator)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def fmt_rat(x) -> str:
    x = rat(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_decimal(x) -> str:
    """Exact decimal text when the denominator allows it, "num/den" otherwise."""
    x = rat(x)
    d = int(x.denominator)
    k2 = k5 = 0
    while d % 2 == 0:
        d //= 2
        k2 += 1
    while d % 5 == 0:
        d //= 5
        k5 += 1
    if d != 1:
        return fmt_rat(x)
    k = max(k2, k5)
    n = int(x * mpq(10) ** k)
    if k == 0:
        return str(n)
    sign = "-" if n < 0 else ""
    digits = str(abs(n)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# points, segments, rays, lines


class Point2(NamedTuple):
    x: MPQ
    y: MPQ

    @staticmethod
    def of(x, y) -> "Point2":
        return Point2(rat(x), rat(y))

    def __add__(self, o):  # type: ignore[override]
        return Point2(self.x + o[0], self.y + o[1])

    def __sub__(self, o):
        return Point2(self.x - o[0], self.y - o[1])

    def scale(self, k) -> "Point2":
        return Point2(self.x * k, self.y * k)

    def __float_pair__(self):
        return (float(self.x), float(self.y))

    def __repr__(self):
        return f"Point2({fmt_decimal(self.x)}, {fmt_decimal(self.y)})"


def P(x, y) -> Point2:
    """Shorthand used in tests and scripts."""
    return Point2(rat(x), rat(y))


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def sq_norm(a):
    return a[0] * a[0] + a[1] * a[1]


def sq_dist(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def orient2d(a, b, c) -> int:
    return sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def incircle(a, b, c, d) -> int:
    """+1 iff d lies strictly inside the circle through a, b, c."""
    o = orient2d(a, b, c)
    if o == 0:
        raise DegenerateTriangle("incircle on collinear triangle")
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    al = adx * adx + ady * ady
    bl = bdx * bdx + bdy * bdy
    cl = cdx * cdx + cdy * cdy
    det = (al * (bdx * cdy - bdy * cdx)
           - bl * (adx * cdy - ady * cdx)
           + cl * (adx * bdy - ady * bdx))
    return sign(det) * o


def circumcenter(a, b, c) -> Point2:
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2 * (bx * cy - by * cx)
    if d == 0:
        raise DegenerateTriangle("circumcenter of collinear points")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return Point2(a[0] + ux, a[1] + uy)


class Segment2(NamedTuple):
    a: Point2
    b: Point2

    @property
    def direction(self) -> Point2:
        return self.b - self.a


class Ray2(NamedTuple):
    origin: Point2
    direction: Point2


class Line2(NamedTuple):
    """A*x + B*y + C = 0.  Used as the halfplane A*x + B*y + C <= 0 by regions."""
    A: MPQ
    B: MPQ
    C: MPQ

    @staticmethod
    def through(p1, p2) -> "Line2":
        """Line through p1, p2; the halfplane <= 0 lies to the left of p1->p2."""
        dx, dy = p2[0] - p1[0], p2[1] - p1[1]
        if dx == 0 and dy == 0:
            raise ValueError("line through coincident points")
        A, B = -dy, dx
        # left side means cross(d, x - p1) > 0, i.e. -dy*(x-x1) + dx*(y-y1) > 0
        return Line2(-A, -B, A * p1[0] + B * p1[1])

    @staticmethod
    def from_point_dir(p, d) -> "Line2":
        return Line2.through(p, (p[0] + d[0], p[1] + d[1]))

    def value(self, x):
        return self.A * x[0] + self.B * x[1] + self.C

    def flipped(self) -> "Line2":
        return Line2(-self.A, -self.B, -self.C)

    def direction(self) -> Point2:
        """Direction with the halfplane <= 0 on its left."""
        return Point2(-self.B, self.A)

    def anchor(self) -> Point2:
        """The point of the line closest to the origin."""
        k = -self.C / (self.A * self.A + self.B * self.B)
        return Point2(self.A * k, self.B * k)

    def normalized(self) -> tuple:
        """Canonical positive-scaled coefficients (for hashing equal halfplanes)."""
        m = abs(self.A) if self.A != 0 else abs(self.B)
        return (self.A / m, self.B / m, self.C / m)


def bisector_halfplane(p, other) -> Line2:
    """Points at least as close to p as to other."""
    A = 2 * (other[0] - p[0])
    B = 2 * (other[1] - p[1])
    C = sq_norm(p) - sq_norm(other)
    return Line2(A, B, C)


def project_to_line(q, l: Line2) -> Point2:
    k = l.value(q) / (l.A * l.A + l.B * l.B)
    return Point2(q[0] - l.A * k, q[1] - l.B * k)


def line_of(obj) -> Line2:
    """Supporting line of a segment, ray or line."""
    if isinstance(obj, Line2):
        return obj
    if isinstance(obj, Segment2):
        return Line2.through(obj.a, obj.b)
    if isinstance(obj, Ray2):
        return Line2.from_point_dir(obj.origin, obj.direction)
    raise TypeError(f"no supporting line for {type(obj).__name__}")


def param_frame(obj):
    """(origin, direction, t_lo, t_hi) of a 1-dim object; None bounds are infinite."""
    if isinstance(obj, Segment2):
        return obj.a, obj.b - obj.a, ZERO, ONE
    if isinstance(obj, Ray2):
        return obj.origin, obj.direction, ZERO, None
    if isinstance(obj, Line2):
        return obj.anchor(), obj.direction(), None, None
    raise TypeError(type(obj).__name__)


def clip_param(o, d, lines: Sequence[Line2], lo=None, hi=None):
    """Clip {o + t*d : lo <= t <= hi} against halfplanes.  None bounds mean infinite.

    Returns (lo, hi) or None when empty.
    """
    ox, oy = o
    dx, dy = d
    for l in lines:
        k = l.A * dx + l.B * dy
        c0 = l.A * ox + l.B * oy + l.C
        if k == 0:
            if c0 > 0:
                return None
            continue
        t = -c0 / k
        if k > 0:
            if hi is None or t < hi:
                hi = t
        else:
            if lo is None or t > lo:
                lo = t
        if lo is not None and hi is not None and lo > hi:
            return None
    return lo, hi


def _object_from_range(o, d, lo, hi):
    if lo is None and hi is None:
        return Line2.from_point_dir(o, d)
    if lo is None:
        e = Point2(o[0] + hi * d[0], o[1] + hi * d[1])
        return Ray2(e, Point2(-d[0], -d[1]))
    a = Point2(o[0] + lo * d[0], o[1] + lo * d[1])
    if hi is None:
        return Ray2(a, Point2(d[0], d[1]))
    if lo == hi:
        return a
    return Segment2(a, Point2(o[0] + hi * d[0], o[1] + hi * d[1]))


# ---------------------------------------------------------------------------
# convex regions


class Edge(NamedTuple):
    """Boundary edge o + t*d, t in [lo, hi]; the region lies to the left of d."""
    line: Line2
    origin: Point2
    direction: Point2
    lo: Optional[MPQ]
    hi: Optional[MPQ]

    def at(self, t) -> Point2:
        return Point2(self.origin[0] + t * self.direction[0], self.origin[1] + t * self.direction[1])

    @property
    def start(self) -> Optional[Point2]:
        return None if self.lo is None else self.at(self.lo)

    @property
    def end(self) -> Optional[Point2]:
        return None if self.hi is None else self.at(self.hi)

    def param(self, x):
        return dot((x[0] - self.origin[0], x[1] - self.origin[1]), self.direction) / sq_norm(self.direction)

    def as_object(self):
        return _object_from_range(self.origin, self.direction, self.lo, self.hi)


def _angle_cmp(u, v) -> int:
    hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
    hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
    if hu != hv:
        return hu - hv
    return -orient2d((0, 0), u, v)


class ConvexRegion:
    """Closed convex region with nonempty interior, given by halfplanes.

    Only non-redundant halfplanes are kept.  Edges are sorted by the angle of
    their direction, which for a convex region is boundary order.
    """

    __slots__ = ("lines", "edges", "_vertices", "_float", "__weakref__")

    def __init__(self, lines: Sequence[Line2] = ()):
        uniq = {}
        for l in lines:
            l = Line2(rat(l.A), rat(l.B), rat(l.C))
            if l.A == 0 and l.B == 0:
                if l.C > 0:
                    raise EmptyFace("infeasible constant halfplane")
                continue
            uniq.setdefault(l.normalized(), l)
        lines = list(uniq.values())
        keys = set(uniq)
        for k in keys:
            if (-k[0], -k[1], -k[2]) in keys:
                raise EmptyFace("region has empty interior")
        edges = []
        for i, l in enumerate(lines):
            others = lines[:i] + lines[i + 1:]
            rng = clip_param(l.anchor(), l.direction(), others)
            if rng is None:
                continue
            lo, hi = rng
            if lo is not None and hi is not None and lo == hi:
                continue
            edges.append(Edge(l, l.anchor(), l.direction(), lo, hi))
        if lines and not edges:
            raise EmptyFace("region is empty or degenerate")
        edges.sort(key=cmp_to_key(lambda e, f: _angle_cmp(e.direction, f.direction)))
        # rotate so an unbounded chain starts with its incoming infinite edge
        for k, e in enumerate(edges):
            if e.lo is None:
                edges = edges[k:] + edges[:k]
                break
        # re-anchor edges at a finite endpoint so vertices are cheap to read
        fixed = []
        for e in edges:
            if e.lo is not None:
                o = e.at(e.lo)
                hi = None if e.hi is None else e.hi - e.lo
                fixed.append(Edge(e.line, o, e.direction, ZERO, hi))
            elif e.hi is not None:
                o = e.at(e.hi)
                fixed.append(Edge(e.line, o, e.direction, None, ZERO))
            else:
                fixed.append(e)
        self.lines = tuple(e.line for e in fixed)
        self.edges = tuple(fixed)
        self._vertices = None
        self._float = None

    @classmethod
    def plane(cls) -> "ConvexRegion":
        return cls(())

    @classmethod
    def box(cls, x0, y0, x1, y1) -> "ConvexRegion":
        x0, y0, x1, y1 = map(rat, (x0, y0, x1, y1))
        return cls([Line2(-ONE, ZERO, x0), Line2(ONE, ZERO, -x1),
                    Line2(ZERO, -ONE, y0), Line2(ZERO, ONE, -y1)])

    @classmethod
    def polygon(cls, pts) -> "ConvexRegion":
        pts = [Point2(rat(a), rat(b)) for a, b in pts]
        n = len(pts)
        area = sum(cross(pts[i], pts[(i + 1) % n]) for i in range(n))
        if area < 0:
            pts = pts[::-1]
        return cls([Line2.through(pts[i], pts[(i + 1) % n]) for i in range(n)])

    # -- queries --------------------------------------------------------

    @property
    def bounded(self) -> bool:
        return len(self.edges) >= 3 and all(e.lo is not None and e.hi is not None for e in self.edges)

    @property
    def vertices(self) -> tuple:
        """Finite corners in boundary order."""
        if self._vertices is None:
            vs = []
            for e in self.edges:
                if e.lo is not None:
                    vs.append(e.start)
            self._vertices = tuple(vs)
        return self._vertices

    def contains(self, x) -> bool:
        return all(l.A * x[0] + l.B * x[1] + l.C <= 0 for l in self.lines)

    def contains_strict(self, x) -> bool:
        return all(l.A * x[0] + l.B * x[1] + l.C < 0 for l in self.lines)

    def edges_at(self, x):
        """[(edge, position)] for edges through x; position in {'start','end','inner'}."""
        out = []
        for e in self.edges:
            if e.line.value(x) != 0:
                continue
            t = e.param(x)
            if e.lo is not None and t < e.lo:
                continue
            if e.hi is not None and t > e.hi:
                continue
            pos = "start" if t == e.lo else ("end" if t == e.hi else "inner")
            out.append((e, pos))
        return out

    def clip(self, o, d, lo=None, hi=None):
        return clip_param(o, d, self.lines, lo, hi)

    def intersect(self, line: Line2) -> "ConvexRegion":
        return ConvexRegion(self.lines + (line,))

    def split(self, line: Line2):
        """(part with line <= 0, part with line >= 0); a side is None if it has no interior."""
        out = []
        for l in (line, line.flipped()):
            try:
                out.append(ConvexRegion(self.lines + (l,)))
            except EmptyFace:
                out.append(None)
        return tuple(out)

    def interior_point(self) -> Point2:
        """Some point strictly inside."""
        if not self.edges:
            return Point2(ZERO, ZERO)
        vs = self.vertices
        if self.bounded:
            n = len(vs)
            return Point2(sum(v[0] for v in vs) / n, sum(v[1] for v in vs) / n)
        # unbounded: step inward from the relative interior of an edge
        e = self.edges[0]
        if e.lo is not None and e.hi is not None:
            base = e.at((e.lo + e.hi) / 2)
        elif e.lo is not None:
            base = e.at(e.lo + 1)
        elif e.hi is not None:
            base = e.at(e.hi - 1)
        else:
            base = e.origin
        nx, ny = -e.line.A, -e.line.B
        step = ONE
        for _ in range(400):
            c = Point2(base[0] + step * nx, base[1] + step * ny)
            if self.contains_strict(c):
                return c
            step /= 2
        raise EmptyFace("no interior point found")

    def float_data(self):
        if self._float is None:
            self._float = tuple((float(l.A), float(l.B), float(l.C)) for l in self.lines)
        return self._float

    def key(self) -> tuple:
        return tuple(sorted(l.normalized() for l in self.lines))

    def __eq__(self, other):
        return isinstance(other, ConvexRegion) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if not self.edges:
            return "ConvexRegion(plane)"
        return f"ConvexRegion({len(self.edges)} edges, bounded={self.bounded})"


Face = Union[Point2, Segment2, Ray2, Line2, ConvexRegion]


def face_dim(V) -> int:
    if isinstance(V, Point2):
        return 0
    if isinstance(V, (Segment2, Ray2, Line2)):
        return 1
    if isinstance(V, ConvexRegion):
        return 2
    raise TypeError(type(V).__name__)


def face_contains(V, x) -> bool:
    if isinstance(V, Point2):
        return V == x
    if isinstance(V, ConvexRegion):
        return V.contains(x)
    o, d, lo, hi = param_frame(V)
    if cross(d, (x[0] - o[0], x[1] - o[1])) != 0:
        return False
    t = dot((x[0] - o[0], x[1] - o[1]), d) / sq_norm(d)
    return (lo is None or t >= lo) and (hi is None or t <= hi)


def clip_line_to_polygon(l: Line2, V: ConvexRegion):
    """l intersected with V: None, Point2, Segment2, Ray2 or Line2."""
    o, d = l.anchor(), l.direction()
    rng = V.clip(o, d)
    if rng is None:
        return None
    return _object_from_range(o, d, *rng)


def clip_to_range(o, d, lo, hi):
    return _object_from_range(o, d, lo, hi)


# ---------------------------------------------------------------------------
# exact quadratic surds


def _isqrt_floor_rat(x: MPQ, scale: int) -> MPQ:
    """floor(sqrt(x) * scale) / scale for x >= 0."""
    n, m = x.numerator, x.denominator
    return mpq(gmpy2.isqrt(n * m * scale * scale), m * scale)


def rat_sqrt(x) -> Optional[MPQ]:
    """Exact square root when x is a rational square, else None."""
    if x < 0:
        return None
    n, m = x.numerator, x.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(m):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(m))
    return None


class RInterval(NamedTuple):
    lo: MPQ
    hi: MPQ

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self) -> MPQ:
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def sign_surd2(x, y, d, z, e) -> int:
    """Exact sign of x + y*sqrt(d) + z*sqrt(e)."""
    sa = Surd(x, y, d).sign()
    sb = sign(z) if e > 0 else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb if sa == 0 else sa
    # compare |x + y sqrt d| with |z| sqrt e
    t = Surd(x * x + y * y * d - z * z * e, 2 * x * y, d).sign()
    if t > 0:
        return sa
    if t < 0:
        return sb
    return 0


class Surd:
    """Exact real a + b*sqrt(d) with rational a, b and d >= 0."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=ZERO, d=ZERO):
        a, b, d = rat(a), rat(b), rat(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b != 0 and d != 0:
            r = rat_sqrt(d)
            if r is not None:
                a, b, d = a + b * r, ZERO, ZERO
        else:
            b, d = ZERO, ZERO
        self.a, self.b, self.d = a, b, d

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return sign(a)
        sa, sb = sign(a), sign(b)
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        t = a * a - b * b * d
        if t > 0:
            return sa
        if t < 0:
            return sb
        return 0

    def cmp(self, other) -> int:
        if not isinstance(other, Surd):
            return Surd(self.a - rat(other), self.b, self.d).sign()
        if other.b == 0:
            return Surd(self.a - other.a, self.b, self.d).sign()
        if self.b == 0:
            return Surd(self.a - other.a, -other.b, other.d).sign()
        if self.d == other.d:
            return Surd(self.a - other.a, self.b - other.b, self.d).sign()
        return sign_surd2(self.a - other.a, self.b, self.d, -other.b, other.d)

    def __lt__(self, o):
        return self.cmp(o) < 0

    def __le__(self, o):
        return self.cmp(o) <= 0

    def __gt__(self, o):
        return self.cmp(o) > 0

    def __ge__(self, o):
        return self.cmp(o) >= 0

    def __eq__(self, o):
        if not isinstance(o, (Surd, MPQ, int, Fraction)):
            return NotImplemented
        return self.cmp(o) == 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def interval(self, width=mpq(1, 10 ** 12)) -> RInterval:
        if self.b == 0:
            return RInterval(self.a, self.a)
        width = rat(width)
        m = self.d.denominator
        # need |b| / (m * scale) <= width
        scale = int(abs(self.b) / (m * width)) + 1
        r_lo = _isqrt_floor_rat(self.d, scale)
        step = mpq(1, m * scale)
        lo = self.a + self.b * r_lo
        hi = self.a + self.b * (r_lo + step)
        return RInterval(min(lo, hi), max(lo, hi))

    def approx(self):
        """(value, error bound) in floating point; cheap filter before exact cmp."""
        fa = float(self.a)
        if self.b == 0:
            return fa, 1e-15 * (1 + abs(fa))
        fb = float(self.b) * math.sqrt(float(self.d))
        return fa + fb, 1e-12 * (1 + abs(fa) + abs(fb))

    def __float__(self):
        if self.b == 0:
            return float(self.a)
        mag = abs(float(self.a)) + abs(float(self.b)) * math.sqrt(float(self.d))
        if mag == 0:
            return 0.0
        return float(self.interval(mpq(mag) * mpq(1, 10 ** 18)).mid)

    def __repr__(self):
        if self.b == 0:
            return f"Surd({fmt_rat(self.a)})"
        return f"Surd({fmt_rat(self.a)} + {fmt_rat(self.b)}*sqrt({fmt_rat(self.d)}))"


def quadratic_roots(A, B, C):
    """Real roots of A t^2 + B t + C (A != 0) as Surds, ascending."""
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    base = -B / (2 * A)
    k = ONE / (2 * A)
    if disc == 0:
        return [Surd(base)]
    r1, r2 = Surd(base, -abs(k), disc), Surd(base, abs(k), disc)
    return [r1, r2]


def circle_line_params(center, s, o, d):
    """Float parameters t with |o + t d - center|^2 = s (exact coefficients)."""
    s = rat(s)
    ex, ey = o[0] - center[0], o[1] - center[1]
    A = d[0] * d[0] + d[1] * d[1]
    B = ex * d[0] + ey * d[1]           # half of the linear coefficient
    C = ex * ex + ey * ey - s
    disc = B * B - A * C
    if disc < 0:
        return []
    if disc == 0:
        return [float(-B / A)]
    r = rat_sqrt(disc)
    if r is not None:
        return [float((-B - r) / A), float((-B + r) / A)]
    sq = math.sqrt(float(disc))
    fB = float(B)
    qv = -(fB + math.copysign(sq, fB)) if fB != 0 else -sq
    t1 = qv / float(A)
    t2 = float(C) / qv if qv != 0 else -t1
    return sorted((t1, t2))


def circle_segment_intersections(center, s, seg: Segment2):
    """Parameters t in [0, 1] where |center - seg(t)|^2 = s, as floats."""
    ts = circle_line_params(center, s, seg.a, seg.b - seg.a)
    return [t for t in ts if 0.0 <= t <= 1.0]
