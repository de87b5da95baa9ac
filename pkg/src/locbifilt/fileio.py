"""Points files, the curve JSON schema, barcode/template JSON and SVG output.

Rationals are written as "num/den" strings so a parse of an emitted file
gives back the exact same numbers.
"""
from __future__ import annotations

import json
import re

from gmpy2 import mpq

from .curves import ABSOLUTE, RELATIVE, VERTICAL, Arc, EntryCurve, make_arc, vertical_curve
from .delaunay import SiteSet
from .errors import DegenerateInput
from .kernel import ConvexRegion, Line2, Point2, fmt_decimal, fmt_rat, param_frame, rat

INF = "inf"


# ---------------------------------------------------------------------------
# points


def parse_point(text: str) -> Point2:
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise ValueError(f"cannot parse point {text!r}")
    return Point2(rat(parts[0]), rat(parts[1]))


def read_points(path) -> tuple:
    """One point per line, "x,y" or "x y"; decimals or num/den; '#' starts a comment."""
    pts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                pts.append(parse_point(line))
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    if not pts:
        raise DegenerateInput("no sites")
    return tuple(pts)


def write_points(path, pts):
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in pts:
            fh.write(f"{fmt_decimal(x)},{fmt_decimal(y)}\n")


# ---------------------------------------------------------------------------
# curves


def _r(x):
    return None if x is None else fmt_rat(x)


def _p(x):
    return None if x is None else rat(x)


def arc_to_json(a: Arc) -> dict:
    return {
        "kind": a.kind,
        "u": [fmt_rat(x) for x in a.u],
        "v": [fmt_rat(x) for x in a.v],
        "w": [fmt_rat(x) for x in a.w],
        "t_range": [fmt_rat(a.t_lo), INF if a.t_hi is None else fmt_rat(a.t_hi)],
    }


def arc_from_json(d: dict) -> Arc:
    lo, hi = d["t_range"]
    a = make_arc(tuple(rat(x) for x in d["u"]), tuple(rat(x) for x in d["v"]),
                 tuple(rat(x) for x in d["w"]), rat(lo), None if hi == INF else rat(hi))
    if a.kind != d["kind"]:
        raise ValueError(f"arc kind {d['kind']!r} does not match its coefficients")
    return a


def curve_to_json(c: EntryCurve, ambient_s=None, site=None) -> dict:
    out = {
        "vertices": list(c.simplex),
        "s0": fmt_rat(c.s0),
        "r_at_s0": _r(c.r_at_s0),
        "s1": _r(c.s1),
        "r1": _r(c.r1),
        "arcs": [arc_to_json(a) for a in c.arcs],
    }
    if ambient_s is not None:
        out["ambient_s"] = fmt_rat(ambient_s)
    if site is not None:
        out["site"] = site
    return out


def curve_from_json(d: dict, mode: str) -> EntryCurve:
    s1, r1 = _p(d.get("s1")), _p(d.get("r1"))
    tail = None if s1 is None else (s1, r1)
    return EntryCurve(tuple(d["vertices"]), mode, rat(d["s0"]), _p(d.get("r_at_s0")), tail,
                      tuple(arc_from_json(a) for a in d["arcs"]))


def _sites_json(ss: SiteSet) -> dict:
    return {"sites": [[fmt_decimal(x), fmt_decimal(y)] for x, y in ss.sites],
            "center": [fmt_decimal(ss.center[0]), fmt_decimal(ss.center[1])]}


def absolute_to_json(ss: SiteSet, result) -> dict:
    doc = {"mode": "absolute"}
    doc.update(_sites_json(ss))
    doc["simplices"] = [curve_to_json(result.curves[s]) for s in result.complex.simplices]
    return doc


def relative_to_json(ss: SiteSet, nerve) -> dict:
    doc = {"mode": "relative"}
    doc.update(_sites_json(ss))
    doc["simplices"] = [curve_to_json(nerve.relative[s], nerve.ambient[s].s0, nerve.owner[s])
                        for s in nerve.simplices]
    return doc


class CurveFile:
    """A parsed curve document."""

    def __init__(self, doc: dict):
        self.mode = doc["mode"]
        if self.mode not in ("absolute", "relative"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.sites = SiteSet.of([tuple(p) for p in doc["sites"]], tuple(doc["center"]))
        cmode = ABSOLUTE if self.mode == "absolute" else RELATIVE
        self.simplices = tuple(tuple(e["vertices"]) for e in doc["simplices"])
        self.curves = {tuple(e["vertices"]): curve_from_json(e, cmode) for e in doc["simplices"]}
        self.ambient = {}
        if self.mode == "relative":
            for e in doc["simplices"]:
                if e.get("ambient_s") is None:
                    raise ValueError("relative curve without ambient_s")
                self.ambient[tuple(e["vertices"])] = vertical_curve(e["vertices"], rat(e["ambient_s"]))

    def bifiltration(self):
        from .slices import Bifiltration
        return Bifiltration(self.mode, self.simplices, self.curves, self.ambient)


def load_curves(path) -> CurveFile:
    with open(path, encoding="utf-8") as fh:
        return CurveFile(json.load(fh))


def dump_json(doc, path=None):
    text = json.dumps(doc, indent=1, sort_keys=False) + "\n"
    if path is None or path == "-":
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


# ---------------------------------------------------------------------------
# barcodes and templates


def surd_to_json(v, width) -> dict:
    if v is None:
        return None
    iv = v.interval(width)
    return {"a": fmt_rat(v.a), "b": fmt_rat(v.b), "d": fmt_rat(v.d),
            "interval": [fmt_rat(iv.lo), fmt_rat(iv.hi)], "approx": float(v)}


def barcode_to_json(mode, sl, filtration, bars, width=mpq(1, 10 ** 12)) -> dict:
    return {
        "mode": mode,
        "slice": {"slope": fmt_rat(sl.m), "offset": fmt_rat(sl.b)},
        "filtration": [{"simplex": list(e.key), "entry": surd_to_json(e.value, width)} for e in filtration],
        "barcode": [{"dim": b.dim, "birth": surd_to_json(b.birth, width),
                     "death": surd_to_json(b.death, width),
                     "birth_simplex": list(b.birth_key),
                     "death_simplex": None if b.death_key is None else list(b.death_key)} for b in bars],
    }


def _sign_text(sv) -> str:
    return "".join("+" if x > 0 else "-" if x < 0 else "0" for x in sv)


def template_to_json(T) -> dict:
    return {
        "mode": T.mode,
        "points": [[fmt_rat(a), fmt_rat(b)] for a, b in T.points],
        "overlaps": [[list(a), list(b)] for a, b in T.overlaps],
        "regions": [{"slice": {"slope": fmt_rat(R.slice.m), "offset": fmt_rat(R.slice.b)},
                     "signs": _sign_text(R.signs),
                     "barcode": [[d, list(b), list(x) if x else None] for d, b, x in R.barcode]}
                    for R in T.regions],
    }


# ---------------------------------------------------------------------------
# SVG


def _f(x: float) -> str:
    return repr(float(x))


def _arc_t_max(a: Arc, s_max):
    """Parameter where an unbounded arc leaves the viewport (s = s_max)."""
    t = mpq(1)
    for _ in range(200):
        if float(a.at(t)[0]) >= s_max:
            return t
        t *= 2
    return t


def curve_polylines(c: EntryCurve, s_max: float, r_max: float, samples=64):
    """Polylines in (s, r) data coordinates: wall, one per arc, tail."""
    lines = []
    s0 = float(c.s0)
    if c.mode == VERTICAL:
        return [[(s0, 0.0), (s0, r_max)]]
    r0 = float(c.r_at_s0)
    lines.append([(s0, r0), (s0, r_max if c.mode == ABSOLUTE else 0.0)])
    for a in c.arcs:
        hi = a.t_hi if a.t_hi is not None else _arc_t_max(a, s_max)
        pts = []
        for k in range(samples):
            t = a.t_lo + (hi - a.t_lo) * mpq(k, samples - 1)
            s, r = a.at(t)
            pts.append((float(s), float(r)))
        lines.append(pts)
    if c.tail is not None:
        s1, r1 = float(c.tail[0]), float(c.tail[1])
        lines.append([(s1, r1), (max(s_max, s1), r1)])
    return lines


def _viewport(curves):
    s_vals = [float(c.s1) for c in curves if c.s1 is not None] + [float(c.s0) for c in curves]
    r_vals = [float(c.r_at_s0) for c in curves if c.r_at_s0 is not None]
    s_max = 1.1 * max(s_vals) if s_vals and max(s_vals) > 0 else 1.0
    r_max = 1.1 * max(r_vals) if r_vals and max(r_vals) > 0 else 1.0
    return s_max, r_max


def curves_svg(curves, size=600, samples=64) -> str:
    """Entry curves in the (s, r) plane; points are written in data coordinates."""
    curves = list(curves)
    s_max, r_max = _viewport(curves)
    sx, sy = size / s_max, size / r_max
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
           f'<clipPath id="view"><rect x="0" y="0" width="{_f(s_max)}" height="{_f(r_max)}"/></clipPath>',
           f'<g transform="matrix({_f(sx)} 0 0 {_f(-sy)} 0 {size})" clip-path="url(#view)" '
           'fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke">']
    for c in curves:
        label = "-".join(str(i) for i in c.simplex)
        out.append(f'<g class="curve" data-simplex="{label}" data-mode="{c.mode}">')
        for kind, pts in zip(_piece_kinds(c), curve_polylines(c, s_max, r_max, samples)):
            txt = " ".join(f"{_f(s)},{_f(r)}" for s, r in pts)
            out.append(f'<polyline class="{kind}" vector-effect="non-scaling-stroke" points="{txt}"/>')
        out.append("</g>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _piece_kinds(c: EntryCurve):
    if c.mode == VERTICAL:
        return ["wall"]
    return ["wall"] + ["arc"] * len(c.arcs) + (["tail"] if c.tail is not None else [])


def subdivision_svg(sub, size=600) -> str:
    """Polygons of the subdivision clipped to a box around the sites and q."""
    pts = list(sub.sites.sites) + [sub.sites.center]
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    pad = span * 0.25
    x0, x1 = rat(min(xs) - pad), rat(max(xs) + pad)
    y0, y1 = rat(min(ys) - pad), rat(max(ys) + pad)
    box = ConvexRegion([Line2(-1, 0, x0), Line2(1, 0, -x1), Line2(0, -1, y0), Line2(0, 1, -y1)])
    sc = size / float(max(x1 - x0, y1 - y0))

    def tx(p):
        return (float(p[0]) - float(x0)) * sc, size - (float(p[1]) - float(y0)) * sc

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>']
    for k, P in enumerate(sub.polygons):
        vs = ConvexRegion(P.region.lines + box.lines).vertices
        txt = " ".join(f"{_f(x)},{_f(y)}" for x, y in map(tx, vs))
        out.append(f'<polygon data-polygon="{k}" data-site="{P.site}" fill="none" stroke="black" '
                   f'points="{txt}"/>')
    for e in sub.cut_edges:
        o, d, lo, hi = param_frame(e.geometry)
        if lo is None or hi is None:
            continue
        (ax, ay), (bx, by) = tx(o + d.scale(lo)), tx(o + d.scale(hi))
        out.append(f'<line class="cut" stroke="red" x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}"/>')
    for i, p in enumerate(sub.sites.sites):
        x, y = tx(p)
        out.append(f'<circle class="site" data-site="{i}" cx="{_f(x)}" cy="{_f(y)}" r="3" fill="black"/>')
    x, y = tx(sub.sites.center)
    out.append(f'<circle class="center" cx="{_f(x)}" cy="{_f(y)}" r="4" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_polyline_points(svg: str):
    """(simplex label, class, [(s, r)]) for every polyline in a curves SVG."""
    out = []
    label = None
    for line in svg.splitlines():
        m = re.search(r'data-simplex="([^"]*)"', line)
        if m:
            label = m.group(1)
        m = re.search(r'<polyline class="(\w+)"[^>]*points="([^"]*)"', line)
        if m:
            pts = [tuple(float(v) for v in tok.split(",")) for tok in m.group(2).split()]
            out.append((label, m.group(1), pts))
    return out
