"""Randomized cross-checks between the exact stack and the float oracles.

Shared by the ``validate`` command and the acceptance tests.  Each check
returns a Check record; nothing here raises on a failed property.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from gmpy2 import mpq

from . import oracle as orc
from .curves import (ABSOLUTE, VERTICAL, absolute_pipeline, boundary_value, contains)
from .delaunay import SiteSet, triangulate, voronoi_face
from .errors import DegenerateInput, ResolutionTooCoarse
from .kernel import (ConvexRegion, Line2, Point2, Ray2, Segment2, cross, dot, face_contains,
                     line_of, param_frame, project_to_line, sq_dist, sq_norm)
from .paths import farthest_point, maximizing_path, minimizing_path, nearest_point
from .slices import (Bifiltration, Slice, barcode_template, betti_numbers, combinatorial_barcode,
                     complex_at, slice_barcode)
from .subdivision import relative_pipeline

FAR_S = (mpq(10 ** 2), mpq(10 ** 4), mpq(10 ** 6))


@dataclass
class Check:
    name: str
    passed: bool = True
    count: int = 0
    max_residual: float = 0.0
    failures: list = field(default_factory=list)

    def fail(self, msg):
        self.passed = False
        if len(self.failures) < 10:
            self.failures.append(msg)

    def residual(self, x: float):
        if x > self.max_residual:
            self.max_residual = x

    def merge(self, other: "Check"):
        self.count += other.count
        self.residual(other.max_residual)
        for f in other.failures:
            self.fail(f)
        if not other.passed:
            self.passed = False
        return self

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.count} checks, max residual {self.max_residual:.3g}"


# ---------------------------------------------------------------------------
# random inputs


def rand_point(rng: random.Random, hi=100, den=100) -> Point2:
    return Point2(mpq(rng.randint(0, hi * den), den), mpq(rng.randint(0, hi * den), den))


def random_siteset(rng: random.Random, n: int, relative=False, den=100, tries=50) -> SiteSet:
    """Random rational sites in [0,100]^2 with a generic center; retries degenerate draws."""
    for _ in range(tries):
        ss = SiteSet(tuple(rand_point(rng, den=den) for _ in range(n)), rand_point(rng, den=den * 10))
        try:
            if relative:
                relative_pipeline(ss)
            else:
                triangulate(ss)
            return ss
        except DegenerateInput:
            continue
    raise RuntimeError("could not draw a generic instance")


def random_face(rng: random.Random, kind: str):
    """A random face of the given kind: point, segment, ray, line, polygon, unbounded."""
    if kind == "point":
        return rand_point(rng, den=4)
    if kind == "segment":
        a, b = rand_point(rng, den=4), rand_point(rng, den=4)
        while b == a:
            b = rand_point(rng, den=4)
        return Segment2(a, b)
    if kind in ("ray", "line"):
        a = rand_point(rng, den=4)
        d = Point2(mpq(rng.randint(-9, 9)), mpq(rng.randint(-9, 9)))
        while d == (0, 0):
            d = Point2(mpq(rng.randint(-9, 9)), mpq(rng.randint(-9, 9)))
        return Ray2(a, d) if kind == "ray" else Line2.from_point_dir(a, d)
    # Voronoi cells give bounded and unbounded convex polygons
    while True:
        ss = [rand_point(rng, den=4) for _ in range(rng.randint(3, 9))]
        try:
            c = triangulate(ss)
        except DegenerateInput:
            continue
        from .delaunay import voronoi_cell
        cells = [voronoi_cell(c, i) for i in range(len(ss))]
        want = kind == "polygon"
        pool = [V for V in cells if V.bounded == want]
        if pool:
            return rng.choice(pool)


FACE_KINDS = ("point", "segment", "ray", "line", "polygon", "unbounded")


def random_subdivision_faces(rng: random.Random, n=None):
    """(F, p, q) triples from the nerve of a random subdivision.

    Maximizing paths are only specified on such faces, where the distance
    to q has a single local extremum.
    """
    ss = random_siteset(rng, n or rng.randint(1, 12), relative=True, den=4)
    nerve = relative_pipeline(ss)
    return [(F, p, ss.center) for F, p in (nerve.faces[s] for s in nerve.simplices)]


# ---------------------------------------------------------------------------
# path invariants


def _chain_points(chain, rng, k):
    """k rational points spread along the chain (terminal ray truncated)."""
    segs = list(zip(chain.vertices, chain.vertices[1:]))
    if chain.terminal_ray is not None:
        o, d = chain.terminal_ray
        segs.append((o, o + d.scale(rng.randint(1, 50))))
    if not segs:
        return [chain.vertices[0]] * min(k, 1)
    out = []
    for i in range(k):
        a, b = segs[i % len(segs)]
        t = mpq(rng.randint(0, 1000), 1000)
        out.append(a + (b - a).scale(t))
    return out


def _on_chain(chain, x) -> bool:
    vs = chain.vertices
    if len(vs) == 1 and chain.terminal_ray is None:
        return x == vs[0]
    for a, b in zip(vs, vs[1:]):
        if cross(b - a, x - a) == 0 and dot(x - a, b - a) >= 0 and dot(x - b, a - b) >= 0:
            return True
    if chain.terminal_ray is not None:
        o, d = chain.terminal_ray
        if cross(d, x - o) == 0 and dot(x - o, d) >= 0:
            return True
    return x in vs


def _edge_holding(V: ConvexRegion, a, b):
    for e in V.edges:
        obj = e.as_object()
        if face_contains(obj, a) and face_contains(obj, b):
            return obj
    return None


def path_invariants(V, p, q, maximize: bool, rng: random.Random, samples=200) -> Check:
    """Parameterization, endpoints, monotonicity, bridge containment, face property."""
    ck = Check("path invariants")
    tag = f"{'max' if maximize else 'min'} V={V!r} p={p} q={q}"
    try:
        chain, keys = (maximizing_path if maximize else minimizing_path)(V, p, q)
    except ValueError:
        # q' interior to a 1-dim face in max mode is rejected by design
        return ck
    vs = chain.vertices
    # endpoints
    ck.count += 1
    if vs[0] != nearest_point(V, p):
        ck.fail(f"start {vs[0]} != nearest point: {tag}")
    if not maximize:
        if vs[-1] != nearest_point(V, q):
            ck.fail(f"end {vs[-1]} != nearest point to q: {tag}")
    else:
        fp = farthest_point(V, q)
        if fp is None:
            if chain.terminal_ray is None:
                ck.fail(f"unbounded face without terminal ray: {tag}")
        elif sq_dist(vs[-1], q) != sq_dist(fp, q):
            ck.fail(f"end {vs[-1]} is not a farthest point: {tag}")
    # strict monotonicity of the distance to p
    ds = [sq_dist(p, v) for v in vs]
    ck.count += 1
    if any(x >= y for x, y in zip(ds, ds[1:])):
        ck.fail(f"sq_dist to p not increasing: {tag}")
    if chain.terminal_ray is not None and dot(chain.terminal_ray.direction, chain.terminal_ray.origin - p) < 0:
        ck.fail(f"terminal ray moves toward p: {tag}")
    # parameterization identity against the oracle
    ext = orc.oracle_max_r if maximize else orc.oracle_min_r
    for x in _chain_points(chain, rng, samples):
        ck.count += 1
        if not face_contains(V, x):
            ck.fail(f"chain point {x} outside V: {tag}")
            continue
        s = sq_dist(p, x)
        want = float(sq_dist(q, x))
        got = ext(V, p, q, s)
        if got is None:
            ck.fail(f"oracle empty at s={s}: {tag}")
            continue
        res = abs(got - want) / (1 + abs(want))
        ck.residual(res)
        if res > 1e-9:
            ck.fail(f"oracle {got} vs chain {want} at s={float(s)}: {tag}")
    if not isinstance(V, ConvexRegion) or V.bounded and not V.vertices:
        return ck
    # bridge containment and the face property, on 2-dim faces
    segs = list(zip(vs, vs[1:]))
    if chain.terminal_ray is not None:
        o, d = chain.terminal_ray
        segs.append((o, o + d))
    for a, b in segs:
        mid = Point2((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        ck.count += 1
        if V.contains_strict(mid):
            if cross(q - p, a - p) != 0 or cross(q - p, b - p) != 0:
                ck.fail(f"interior segment {a}->{b} off the bridge line: {tag}")
            continue
        F = _edge_holding(V, a, b)
        if F is None:
            ck.fail(f"segment {a}->{b} neither interior nor on an edge: {tag}")
            continue
        try:
            sub, _ = (maximizing_path if maximize else minimizing_path)(F, p, q)
        except ValueError:
            continue
        if not (_on_chain(sub, a) and _on_chain(sub, b)):
            ck.fail(f"segment {a}->{b} not on the path of its edge {F}: {tag}")
    return ck


def path_suite(rng, instances=500, samples=200) -> Check:
    """Minimizing paths on arbitrary faces, maximizing paths on subdivision faces."""
    ck = Check("path invariants")
    pool = []
    for i in range(instances):
        kind = FACE_KINDS[i % len(FACE_KINDS)]
        V = random_face(rng, kind)
        p, q = rand_point(rng, den=4), rand_point(rng, den=4)
        if p == q:
            p = p + Point2(mpq(1), mpq(0))
        ck.merge(path_invariants(V, p, q, False, rng, samples))
        if not pool:
            pool = random_subdivision_faces(rng)
            rng.shuffle(pool)
        F, p, q = pool.pop()
        ck.merge(path_invariants(F, p, q, True, rng, samples))
    return ck


# ---------------------------------------------------------------------------
# arcs


def _conic_row(s, r):
    return [s * s, s * r, r * r, s, r, mpq(1)]


def _nullspace(rows):
    """One nonzero rational vector in the nullspace of a 5x6 system, or None."""
    m = [list(r) for r in rows]
    ncol = len(m[0])
    piv = []
    row = 0
    for col in range(ncol):
        sel = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if sel is None:
            continue
        m[row], m[sel] = m[sel], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        piv.append(col)
        row += 1
        if row == len(m):
            break
    free = [c for c in range(ncol) if c not in piv]
    if not free:
        return None
    v = [mpq(0)] * ncol
    v[free[0]] = mpq(1)
    for i, c in enumerate(piv):
        v[c] = -m[i][free[0]]
    return v


def classify_arc(arc) -> bool:
    """Segment arcs give collinear samples; parabola arcs lie on one conic (exact)."""
    lo = arc.t_lo if arc.t_lo is not None else mpq(0)
    hi = arc.t_hi if arc.t_hi is not None else lo + 10
    ts = [lo + (hi - lo) * mpq(k, 9) for k in range(10)]
    pts = [arc.at(t) for t in ts]
    if arc.kind == "segment":
        a, b = pts[0], pts[-1]
        return all((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) == 0 for x in pts)
    coef = _nullspace([_conic_row(*x) for x in pts[:5]])
    if coef is None:
        return False
    return all(sum(c * v for c, v in zip(coef, _conic_row(*x))) == 0 for x in pts[5:])


def arc_classification(curves, label="absolute") -> Check:
    ck = Check(f"arc classification ({label})")
    for c in curves:
        for arc in c.arcs:
            ck.count += 1
            if not classify_arc(arc):
                ck.fail(f"arc of {c.simplex} fails the {arc.kind} test")
    return ck


# ---------------------------------------------------------------------------
# curves versus oracle


def _s_samples(c, k, far=False):
    if c.s1 is not None and c.s1 > c.s0:
        hi = c.s1
    elif c.s1 is not None:
        return [c.s0]
    else:
        hi = c.s0 + 100
    out = [c.s0 + (hi - c.s0) * mpq(j, max(k - 1, 1)) for j in range(k)]
    if far and c.s1 is None:
        out += [s for s in FAR_S if s >= c.s0]
    return out


def _curve_oracle(ck, c, V, p, q, samples, far):
    s0o = orc.oracle_s0(V, p)
    res = abs(float(c.s0) - s0o) / (1 + abs(s0o))
    ck.count += 1
    ck.residual(res)
    if res > 1e-9:
        ck.fail(f"s0 of {c.simplex}: {float(c.s0)} vs oracle {s0o}")
    ext = orc.oracle_max_r if c.mode != ABSOLUTE else orc.oracle_min_r
    for s in _s_samples(c, samples, far):
        v = boundary_value(c, s)
        o = ext(V, p, q, s)
        ck.count += 1
        if v is None or o is None:
            ck.fail(f"{c.simplex} at s={float(s)}: curve {v} oracle {o}")
            continue
        fv = float(v)
        res = abs(fv - o) / (1 + abs(fv))
        ck.residual(res)
        if res > 1e-9:
            ck.fail(f"{c.simplex} at s={float(s)}: curve {fv} oracle {o}")


def absolute_oracle(ss: SiteSet, curves: dict, samples=20) -> Check:
    ck = Check("oracle agreement (absolute)")
    c = triangulate(ss, strict_center=False)
    for sigma in c.simplices:
        f = voronoi_face(c, sigma)
        _curve_oracle(ck, curves[sigma], f.geometry, c.sites[f.nearest_site], ss.center, samples, False)
    return ck


def relative_oracle(ss: SiteSet, nerve, samples=20) -> Check:
    ck = Check("oracle agreement (relative)")
    for sigma in nerve.simplices:
        F, p = nerve.faces[sigma]
        amb = nerve.ambient[sigma]
        s0o = orc.oracle_s0(F, p)
        ck.count += 1
        if abs(float(amb.s0) - s0o) > 1e-9 * (1 + s0o):
            ck.fail(f"ambient s0 of {sigma}: {float(amb.s0)} vs {s0o}")
        _curve_oracle(ck, nerve.relative[sigma], F, p, ss.center, samples, True)
    return ck


def monotone_boundaries(curves, k=100) -> Check:
    ck = Check("monotone boundary")
    for c in curves:
        if c.mode == VERTICAL or c.s1 is None and not c.arcs:
            continue
        hi = c.s1 if c.s1 is not None else c.s0 + 100
        prev = None
        for j in range(k):
            v = boundary_value(c, c.s0 + (hi - c.s0) * mpq(j, k - 1))
            if v is None:
                ck.fail(f"no boundary value for {c.simplex} inside its own range")
                break
            if prev is not None:
                ck.count += 1
                d = v.cmp(prev)
                if (c.mode == ABSOLUTE and d > 0) or (c.mode != ABSOLUTE and d < 0):
                    ck.fail(f"boundary of {c.simplex} not monotone")
                    break
            prev = v
    return ck


# ---------------------------------------------------------------------------
# nerves and homology


def _sample_sr(rng, bif):
    curves = bif.all_curves()
    s_hi = max(float(c.s1 if c.s1 is not None else c.s0) for c in curves) * 1.3 + 1
    r_hi = max(float(c.r_at_s0) for c in curves if c.r_at_s0 is not None) * 1.3 + 1
    s = mpq(round(rng.uniform(0, s_hi) * 10 ** 4), 10 ** 4)
    r = mpq(round(rng.uniform(0, r_hi) * 10 ** 4), 10 ** 4)
    return s, r


def present_set(bif: Bifiltration, s, r):
    if bif.mode == "absolute":
        return set(complex_at(bif, s, r))
    return set(complex_at(bif, s, r)[1])


def nerve_equivalence(ss: SiteSet, bif: Bifiltration, rng, k=20, faces=None) -> Check:
    ck = Check(f"nerve equivalence ({bif.mode})")
    got = tries = 0
    while got < k and tries < 50 * k:
        tries += 1
        s, r = _sample_sr(rng, bif)
        want, amb = orc.oracle_nerve(ss, s, r, bif.mode, faces=faces)
        if amb:
            continue
        got += 1
        ck.count += 1
        have = present_set(bif, s, r)
        if have != want:
            ck.fail(f"(s,r)=({float(s)},{float(r)}): exact {sorted(have ^ want)[:4]} differ")
    if got < k:
        ck.fail(f"only {got} unambiguous samples")
    return ck


def margin_ok(bif: Bifiltration, s, r, h, k=4) -> bool:
    """(s, r) is more than k pixel widths (in radius units) from every boundary."""
    rs, rr = math.sqrt(float(s)), math.sqrt(float(r))
    for c in bif.all_curves():
        if abs(rs - math.sqrt(float(c.s0))) < k * h:
            return False
        if c.mode == VERTICAL or s < c.s0:
            continue
        R = float(boundary_value(c, s))
        if abs(rr - math.sqrt(max(R, 0.0))) < k * h:
            return False
    return True


def _betti01(simplices):
    b = betti_numbers(list(simplices), 2) if simplices else []
    b = (b + [0, 0])[:2]
    return tuple(b)


def homology_ground_truth(ss: SiteSet, bif: Bifiltration, rng, k=10, resolution=512) -> Check:
    ck = Check(f"homology ground truth ({bif.mode})")
    got = tries = 0
    while got < k and tries < 100 * k:
        tries += 1
        s, r = _sample_sr(rng, bif)
        h = orc.raster_pixel(ss, s, r, resolution, bif.mode)
        if not margin_ok(bif, s, r, h):
            continue
        try:
            rb = orc.raster_betti(ss, s, r, resolution, bif.mode)
        except ResolutionTooCoarse:
            continue
        got += 1
        ck.count += 1
        nb = _betti01(present_set(bif, s, r))
        if nb != tuple(rb):
            ck.fail(f"(s,r)=({float(s)},{float(r)}): nerve {nb} raster {rb}")
    if got < k:
        ck.fail(f"only {got} margin-checked samples")
    return ck


# ---------------------------------------------------------------------------
# subdivision


def subdivision_invariants(sub) -> Check:
    ck = Check("subdivision invariants")
    q = sub.sites.center
    for e in sub.edges:
        ck.count += 1
        g = e.geometry
        o, d, lo, hi = param_frame(g)
        qh = project_to_line(q, line_of(g))
        t = dot(qh - o, d) / sq_norm(d)
        if (lo is None or t > lo) and (hi is None or t < hi):
            ck.fail(f"problematic edge remains: {g}")
        if e.cut and line_of(g).value(q) != 0:
            ck.fail(f"cut edge {g} misses q")
    ck.count += 2
    star = sub.vertices.get(q, ())
    if len(star) < 3:
        ck.fail(f"q has {len(star)} incident polygons")
    if len(sub.polygons) > sub.n_cells + len(sub.problematic) + 3:
        ck.fail(f"{len(sub.polygons)} polygons exceed the size bound")
    return ck


# ---------------------------------------------------------------------------
# templates


def template_check(bif: Bifiltration, rng, pairs=10, straddle=3, max_regions=40) -> Check:
    """Random slices in one region share its combinatorial barcode; straddling pairs re-verified."""
    ck = Check(f"barcode template ({bif.mode})")
    T = barcode_template(bif)
    regions = T.regions
    if max_regions is not None and len(regions) > max_regions:
        regions = rng.sample(regions, max_regions)
    for R in regions:
        for _ in range(pairs):
            a = T.sample_in_region(R, rng)
            b = T.sample_in_region(R, rng)
            ck.count += 1
            ca = combinatorial_barcode(slice_barcode(bif, a)[1])
            cb = combinatorial_barcode(slice_barcode(bif, b)[1])
            if ca != cb or ca != R.barcode:
                ck.fail(f"slices {a} and {b} in one region disagree")
    # straddling pairs: both sides of a dual line, each checked against its located region
    done = 0
    pts = list(T.points)
    rng.shuffle(pts)
    sgn = 1 if bif.mode == "absolute" else -1
    for (a, b) in pts:
        if done >= straddle:
            break
        m = mpq(sgn * rng.randint(1, 400), 100)
        k0 = a * m - b
        eps = mpq(1, 10 ** 9)
        for kk in (k0 - eps, k0 + eps):
            sl = Slice(m, -kk)
            R = T.locate(sl)
            direct = combinatorial_barcode(slice_barcode(bif, sl)[1])
            ck.count += 1
            if direct != R.barcode:
                ck.fail(f"straddling slice {sl} disagrees with its region")
        done += 1
    if T.points and done < straddle:
        ck.fail(f"only {done} straddling pairs")
    return ck


# ---------------------------------------------------------------------------
# the validate command


def shift_s0(curves: dict, by=1) -> dict:
    """Test fixture: an off-by-one error in every s0."""
    return {k: replace(c, s0=c.s0 + by) for k, c in curves.items()}


TAMPERS = {"s0": shift_s0}


def run_validation(seed=1, n=10, samples=50, resolution=512, tamper=None, log=None):
    """All suites on one random instance per mode.  Returns a list of Check."""
    rng = random.Random(seed)
    out = []
    ss = random_siteset(rng, n)
    res = absolute_pipeline(ss)
    curves = res.curves
    if tamper:
        curves = TAMPERS[tamper](curves)
    bif = Bifiltration("absolute", tuple(res.complex.simplices), curves)
    out.append(absolute_oracle(ss, curves, samples))
    out.append(arc_classification(curves.values()))
    out.append(monotone_boundaries(curves.values()))
    out.append(nerve_equivalence(ss, bif, rng, k=min(samples, 20)))
    out.append(homology_ground_truth(ss, bif, rng, k=min(samples, 10), resolution=resolution))

    rs = random_siteset(rng, n, relative=True)
    nerve = relative_pipeline(rs)
    if tamper:
        nerve.relative = TAMPERS[tamper](nerve.relative)
    rbif = Bifiltration.relative(nerve)
    out.append(relative_oracle(rs, nerve, samples))
    out.append(arc_classification(nerve.relative.values(), "relative"))
    out.append(subdivision_invariants(nerve.subdivision))
    faces = {s: nerve.faces[s] for s in nerve.simplices}
    out.append(nerve_equivalence(rs, rbif, rng, k=min(samples, 20), faces=faces))
    out.append(homology_ground_truth(rs, rbif, rng, k=min(samples, 10), resolution=resolution))

    out.append(path_suite(rng, max(6, samples // 2), samples=20))
    if log:
        for c in out:
            log(c.line())
    return out
