"""Slices, persistence barcodes, coning and barcode templates.

A slice is the line r = m*s + b in the parameter plane, walked by its
s-coordinate t.  Absolute bifiltrations use m > 0, relative ones m < 0 (m = 0
is accepted as a limiting case; then a simplex may never enter).

Relative barcodes come from coning: the cone vertex w (key (-1,)) enters
first, a nerve simplex sigma enters when the slice crosses its ambient wall,
and w*sigma when the slice enters sigma's relative region.  Reduced homology
of the coned complex is the relative homology of the pair.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cmp_to_key
from itertools import combinations
from typing import NamedTuple, Optional

from gmpy2 import mpq

from .curves import (ABSOLUTE, RELATIVE, VERTICAL, EntryCurve, eval_quadratic,
                     intersect_curves)
from .errors import DegenerateCurves, SubNotContained
from .kernel import ONE, ZERO, RInterval, Surd, quadratic_roots, rat, sign

CONE = -1


class Slice(NamedTuple):
    m: object
    b: object

    @staticmethod
    def of(m, b) -> "Slice":
        return Slice(rat(m), rat(b))

    def point(self, t):
        return (t, self.m * t + self.b)


# ---------------------------------------------------------------------------
# slice entry


def _first_root(A, B, C, t_hi) -> Optional[Surd]:
    """Smallest root of A t^2 + B t + C in (0, t_hi] (t_hi None = infinity)."""
    if A == 0:
        if B == 0:
            return None
        roots = [Surd(-C / B)]
    else:
        roots = quadratic_roots(A, B, C)
    best = None
    for r in roots:
        if r.cmp(ZERO) <= 0:
            continue
        if t_hi is not None and r.cmp(t_hi) > 0:
            continue
        if best is None or r < best:
            best = r
    return best


def slice_entry(curve: EntryCurve, sl: Slice) -> Optional[Surd]:
    """Smallest s-coordinate at which the slice lies in the active region, or None."""
    m, b = rat(sl.m), rat(sl.b)
    if curve.mode == VERTICAL:
        return Surd(curve.s0)
    # h >= 0 inside the region, h nondecreasing along the slice
    sg = 1 if curve.mode == ABSOLUTE else -1
    if (sg > 0 and m < 0) or (sg < 0 and m > 0):
        raise ValueError("slice slope sign does not match the curve mode")

    def h(s, r):
        return sg * (m * s + b - r)

    if h(curve.s0, curve.r_at_s0) >= 0:
        return Surd(curve.s0)
    for arc in curve.arcs:
        end = arc.end
        if end is not None and h(*end) < 0:
            continue
        A = sg * (m * arc.u[0] - arc.u[1])
        B = sg * (m * arc.v[0] - arc.v[1])
        C = sg * (m * arc.w[0] + b - arc.w[1])
        tau = _first_root(A, B, C, arc.t_hi)
        if tau is None:
            if end is not None:
                return Surd(end[0])
            return None
        return eval_quadratic((arc.w[0], arc.v[0], arc.u[0]), tau)
    if curve.tail is None:
        return None
    s1, r1 = curve.tail
    if m == 0:
        return None
    return Surd((r1 - b) / m)


# ---------------------------------------------------------------------------
# bifiltrations


@dataclass
class Bifiltration:
    """Simplices with their entry curves; relative ones carry ambient walls too."""
    mode: str                          # "absolute" | "relative"
    simplices: tuple
    curves: dict                       # absolute: simplex -> curve; relative: relative curves
    ambient: dict = field(default_factory=dict)

    @staticmethod
    def absolute(result) -> "Bifiltration":
        return Bifiltration("absolute", tuple(result.complex.simplices), dict(result.curves))

    @staticmethod
    def relative(nerve) -> "Bifiltration":
        return Bifiltration("relative", tuple(nerve.simplices), dict(nerve.relative), dict(nerve.ambient))

    def all_curves(self) -> list:
        out = [self.curves[s] for s in self.simplices]
        if self.mode == "relative":
            out = [self.ambient[s] for s in self.simplices] + out
        return out

    def check_slice(self, sl: Slice):
        if self.mode == "absolute" and sl.m < 0:
            raise ValueError("absolute slices need slope >= 0")
        if self.mode == "relative" and sl.m > 0:
            raise ValueError("relative slices need slope <= 0")


class Entry(NamedTuple):
    key: tuple            # simplex id; cone simplices start with -1
    value: object         # Surd, or None for the cone vertex (enters first)

    @property
    def dim(self) -> int:
        return len(self.key) - 1


def _entry_cmp(x, y) -> int:
    (x, fx), (y, fy) = x, y
    if x.value is None or y.value is None:
        c = (x.value is not None) - (y.value is not None)
    elif abs(fx[0] - fy[0]) > fx[1] + fy[1]:
        c = -1 if fx[0] < fy[0] else 1
    else:
        c = x.value.cmp(y.value)
    if c:
        return c
    if x.dim != y.dim:
        return x.dim - y.dim
    return (x.key > y.key) - (x.key < y.key)


def slice_filtration(bif: Bifiltration, sl: Slice) -> list:
    """Entries sorted by value, ties broken face-first and then by simplex id."""
    bif.check_slice(sl)
    out = []
    if bif.mode == "absolute":
        for s in bif.simplices:
            v = slice_entry(bif.curves[s], sl)
            if v is not None:
                out.append(Entry(s, v))
    else:
        out.append(Entry((CONE,), None))
        for s in bif.simplices:
            out.append(Entry(s, slice_entry(bif.ambient[s], sl)))
            v = slice_entry(bif.curves[s], sl)
            if v is not None:
                out.append(Entry((CONE,) + s, v))
    deco = [(e, None if e.value is None else e.value.approx()) for e in out]
    deco.sort(key=cmp_to_key(_entry_cmp))
    return [e for e, _ in deco]


def complex_at(bif: Bifiltration, s, r):
    """Simplices present at (s, r).  Relative mode returns (ambient, relative)."""
    from .curves import contains
    if bif.mode == "absolute":
        return [x for x in bif.simplices if contains(bif.curves[x], s, r)]
    amb = [x for x in bif.simplices if contains(bif.ambient[x], s, r)]
    rel = [x for x in bif.simplices if contains(bif.curves[x], s, r)]
    return amb, rel


# ---------------------------------------------------------------------------
# persistence over Z/2


class Bar(NamedTuple):
    dim: int
    birth: object
    death: object          # None = essential
    birth_key: tuple
    death_key: Optional[tuple]


def boundary_keys(key):
    if len(key) == 1:
        return ()
    return tuple(combinations(key, len(key) - 1))


def reduce_pairs(keys):
    """Standard column reduction; returns (pairs [(i, j)], essential [i]) by index."""
    index = {k: i for i, k in enumerate(keys)}
    low_of = {}
    pairs = []
    paired = set()
    for j, k in enumerate(keys):
        col = 0
        for f in boundary_keys(k):
            i = index.get(f)
            if i is None or i >= j:
                raise ValueError(f"face {f} of {k} missing or out of order")
            col |= 1 << i
        while col:
            low = col.bit_length() - 1
            other = low_of.get(low)
            if other is None:
                low_of[low] = (j, col)
                pairs.append((low, j))
                paired.add(low)
                paired.add(j)
                break
            col ^= other[1]
    essential = [i for i in range(len(keys)) if i not in paired]
    return pairs, essential


def persistence(filtration, drop_cone=True) -> list:
    """Barcode of a sorted filtration (list of Entry)."""
    keys = [e.key for e in filtration]
    pairs, essential = reduce_pairs(keys)
    bars = []
    for i, j in pairs:
        bi, bj = filtration[i], filtration[j]
        bars.append(Bar(bi.dim, bi.value, bj.value, bi.key, bj.key))
    for i in essential:
        e = filtration[i]
        if drop_cone and e.key == (CONE,):
            continue
        bars.append(Bar(e.dim, e.value, None, e.key, None))
    bars.sort(key=lambda b: (b.dim, keys.index(b.birth_key)))
    return bars


def nonzero_bars(bars) -> list:
    out = []
    for b in bars:
        if b.death is None or b.birth is None or b.birth.cmp(b.death) != 0:
            out.append(b)
    return out


def combinatorial_barcode(bars) -> tuple:
    return tuple(sorted((b.dim, b.birth_key, b.death_key or ()) for b in bars))


def slice_barcode(bif: Bifiltration, sl: Slice):
    filt = slice_filtration(bif, sl)
    bars = persistence(filt)
    return filt, bars


# ---------------------------------------------------------------------------
# static complexes: Betti numbers and coning


def _closure_sorted(simplices):
    """All faces of the given simplices, sorted by dimension then id."""
    out = set()
    for s in simplices:
        s = tuple(s)
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return sorted(out, key=lambda s: (len(s), s))


def betti_numbers(simplices, max_dim=None) -> list:
    """Z/2 Betti numbers of a finite simplicial complex via boundary ranks."""
    keys = _closure_sorted(simplices)
    if not keys:
        return []
    top = max(len(k) for k in keys) - 1
    if max_dim is None:
        max_dim = top
    by_dim = {}
    for k in keys:
        by_dim.setdefault(len(k) - 1, []).append(k)
    ranks = {}
    for d in range(1, min(top, max_dim + 1) + 1):
        idx = {k: i for i, k in enumerate(by_dim.get(d - 1, []))}
        rows = []
        for k in by_dim.get(d, []):
            col = 0
            for f in boundary_keys(k):
                col |= 1 << idx[f]
            rows.append(col)
        ranks[d] = gf2_rank(rows)
    out = []
    for d in range(0, max_dim + 1):
        n = len(by_dim.get(d, []))
        out.append(n - ranks.get(d, 0) - ranks.get(d + 1, 0))
    return out


def gf2_rank(rows) -> int:
    pivots = {}
    rank = 0
    for r in rows:
        while r:
            h = r.bit_length() - 1
            if h in pivots:
                r ^= pivots[h]
            else:
                pivots[h] = r
                rank += 1
                break
    return rank


@dataclass
class ConedComplex:
    base: tuple
    sub: tuple
    simplices: tuple

    def reduced_betti(self, max_dim=None) -> list:
        b = betti_numbers(self.simplices, max_dim)
        if b:
            b[0] -= 1
        return b


def cone(base, sub) -> ConedComplex:
    base = _closure_sorted(base)
    sub = _closure_sorted(sub)
    bs = set(base)
    missing = [s for s in sub if s not in bs]
    if missing:
        raise SubNotContained(f"{missing[0]} is not a simplex of the base complex")
    coned = [(CONE,)] + [(CONE,) + tuple(s) for s in sub]
    return ConedComplex(tuple(base), tuple(sub), tuple(base + coned))


def relative_betti(base, sub, max_dim=None) -> list:
    """Betti numbers of the relative chain complex C(base)/C(sub), computed directly."""
    sub = set(_closure_sorted(sub))
    keys = [k for k in _closure_sorted(base) if k not in sub]
    if not keys:
        return [0] * ((max_dim or 0) + 1)
    top = max(len(k) for k in keys) - 1
    if max_dim is None:
        max_dim = top
    by_dim = {}
    for k in keys:
        by_dim.setdefault(len(k) - 1, []).append(k)
    ranks = {}
    for d in range(1, top + 1):
        idx = {k: i for i, k in enumerate(by_dim.get(d - 1, []))}
        rows = []
        for k in by_dim.get(d, []):
            col = 0
            for f in boundary_keys(k):
                if f in idx:
                    col |= 1 << idx[f]
            rows.append(col)
        ranks[d] = gf2_rank(rows)
    return [len(by_dim.get(d, [])) - ranks.get(d, 0) - ranks.get(d + 1, 0) for d in range(max_dim + 1)]


# ---------------------------------------------------------------------------
# curve intersections and templates


def curve_intersection_set(curves, strict=False):
    """Union of pairwise boundary intersections.

    Returns (points, overlapping pairs).  Overlapping pieces contribute their
    overlap endpoints to the point set; with strict=True they raise instead.
    """
    pts = []
    overlaps = []
    curves = list(curves)
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            got, ov = intersect_curves(curves[i], curves[j])
            if ov:
                overlaps.append((curves[i].simplex, curves[j].simplex))
                if strict:
                    raise DegenerateCurves(f"curves of {curves[i].simplex} and {curves[j].simplex} overlap")
            pts.extend(got)
    from .curves import dedupe_points
    return dedupe_points(pts), overlaps


def dual_line(point):
    """The point (a, b) dualizes to k = a*m - b in the (m, k) plane."""
    a, b = point
    return rat(a), rat(b)


def slice_dual(sl: Slice):
    return (rat(sl.m), -rat(sl.b))


def side_of(sl: Slice, point) -> int:
    """+1 if the point lies below the slice line, -1 above, 0 on it."""
    a, b = point
    return sign(sl.m * a + sl.b - b)


def sign_vector(sl: Slice, points) -> tuple:
    return tuple(side_of(sl, x) for x in points)


@dataclass
class TemplateRegion:
    slice: Slice
    signs: tuple
    barcode: tuple


@dataclass
class Template:
    mode: str
    points: list                    # rational representatives of I
    regions: list
    overlaps: list

    def locate(self, sl: Slice) -> TemplateRegion:
        sv = sign_vector(sl, self.points)
        cands = [R for R in self.regions
                 if all(a == 0 or a == b for a, b in zip(sv, R.signs))]
        if not cands:
            raise LookupError("slice outside every region")
        return min(cands, key=lambda R: R.signs)

    def sample_in_region(self, R: TemplateRegion, rng: random.Random) -> Slice:
        return _sample_face(self.mode, R, self.points, rng)


def _point_rep(x):
    return (x[0].mid, x[1].mid)


def _domain_ok(mode, m) -> bool:
    return m > 0 if mode == "absolute" else m < 0


def barcode_template(bif: Bifiltration, strict=False) -> Template:
    pts_iv, overlaps = curve_intersection_set(bif.all_curves(), strict=strict)
    points = sorted({_point_rep(x) for x in pts_iv})
    sgn = 1 if bif.mode == "absolute" else -1
    # slab boundaries: m-coordinates of pairwise dual-line crossings inside the domain
    ms = set()
    for (a1, b1), (a2, b2) in combinations(points, 2):
        if a1 != a2:
            m = (b1 - b2) / (a1 - a2)
            if _domain_ok(bif.mode, m):
                ms.add(m)
    ms = sorted(ms, key=lambda m: sgn * m)
    reps = []
    prev = ZERO
    for m in ms:
        reps.append((prev + m) / 2)
        prev = m
    reps.append(prev + sgn)
    # within an open slab the dual lines are totally ordered; a face is the set
    # of lines below its points, recorded as a bitmask over the sorted prefix
    faces = {}
    for m in reps:
        order = sorted(range(len(points)), key=lambda i: points[i][0] * m - points[i][1])
        vals = [points[i][0] * m - points[i][1] for i in order]
        ks = [vals[0] - 1] if vals else [ZERO]
        ks += [(x + y) / 2 for x, y in zip(vals, vals[1:])]
        if vals:
            ks.append(vals[-1] + 1)
        mask = 0
        for j, k in enumerate(ks):
            if j > 0:
                mask |= 1 << order[j - 1]
            if mask not in faces:
                faces[mask] = Slice(m, -k)
    faces = {tuple(-1 if (mask >> i) & 1 else 1 for i in range(len(points))): sl
             for mask, sl in faces.items()}
    regions = []
    for sv in sorted(faces):
        sl = faces[sv]
        _, bars = slice_barcode(bif, sl)
        regions.append(TemplateRegion(sl, sv, combinatorial_barcode(bars)))
    return Template(bif.mode, points, regions, overlaps)


def _sample_face(mode, R: TemplateRegion, points, rng: random.Random) -> Slice:
    """Random slice strictly inside R's dual face, along a random chord."""
    m0, k0 = slice_dual(R.slice)
    for _ in range(100):
        dm = mpq(rng.randint(-1000, 1000), 1000)
        dk = mpq(rng.randint(-1000, 1000), 1000)
        if dm == 0 and dk == 0:
            continue
        lo, hi = None, None
        # domain m*sgn > 0
        cons = []
        sgn = 1 if mode == "absolute" else -1
        cons.append((sgn * dm, sgn * m0))            # sgn*(m0 + t dm) > 0
        for (a, b), s in zip(points, R.signs):
            # sign of (a*m + b_slice - b) with b_slice = -k: s * (a m - k - b) > 0
            cons.append((s * (a * dm - dk), s * (a * m0 - k0 - b)))
        for slope, c0 in cons:
            if slope == 0:
                continue
            t = -c0 / slope
            if slope > 0:
                lo = t if lo is None or t > lo else lo
            else:
                hi = t if hi is None or t < hi else hi
        lo = lo if lo is not None else mpq(-1000)
        hi = hi if hi is not None else mpq(1000)
        if lo >= hi:
            continue
        u = mpq(rng.randint(1, 999), 1000)
        t = lo + (hi - lo) * u
        m, k = m0 + t * dm, k0 + t * dk
        sl = Slice(m, -k)
        if sign_vector(sl, points) == R.signs and _domain_ok(mode, m):
            return sl
    return R.slice
