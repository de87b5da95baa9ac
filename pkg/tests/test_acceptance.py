"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary) and
then asserts, so a failing criterion is visible both ways.
"""
import math
import random
import time

import pytest
from gmpy2 import mpq

from locbifilt import fileio
from locbifilt.curves import absolute_pipeline, boundary_value
from locbifilt.delaunay import SiteSet
from locbifilt.slices import Bifiltration
from locbifilt.subdivision import relative_pipeline
from locbifilt.validate import (Check, absolute_oracle, arc_classification, homology_ground_truth,
                                nerve_equivalence, path_suite, random_siteset, relative_oracle,
                                subdivision_invariants, template_check)

SEED = 20240601


def _report(acceptance, name, ck: Check, extra=""):
    detail = f"{ck.count} checks, max residual {ck.max_residual:.3g}" + (f", {extra}" if extra else "")
    acceptance(name, ck.passed, detail)
    assert ck.passed, ck.failures[:5]


@pytest.fixture(scope="module")
def absolute_instances():
    rng = random.Random(SEED)
    out = []
    for _ in range(30):
        ss = random_siteset(rng, rng.randint(3, 50))
        out.append((ss, absolute_pipeline(ss)))
    return out


@pytest.fixture(scope="module")
def relative_instances():
    rng = random.Random(SEED + 1)
    out = []
    for _ in range(30):
        ss = random_siteset(rng, rng.randint(3, 50), relative=True)
        out.append((ss, relative_pipeline(ss)))
    return out


def test_oracle_agreement_absolute(acceptance, absolute_instances):
    t0 = time.perf_counter()
    ck = Check("oracle agreement (absolute)")
    for ss, res in absolute_instances:
        ck.merge(absolute_oracle(ss, res.curves, samples=20))
    dt = time.perf_counter() - t0
    if dt >= 60:
        ck.fail(f"took {dt:.1f} s")
    _report(acceptance, "oracle agreement (absolute)", ck, f"{dt:.1f} s")


def test_oracle_agreement_relative(acceptance, relative_instances):
    ck = Check("oracle agreement (relative)")
    unbounded = 0
    for ss, nerve in relative_instances:
        ck.merge(relative_oracle(ss, nerve, samples=20))
        if any(not nerve.relative[s].bounded for s in nerve.simplices):
            unbounded += 1
    if unbounded < 5:
        ck.fail(f"only {unbounded} instances with unbounded faces")
    _report(acceptance, "oracle agreement (relative)", ck, f"{unbounded} instances with unbounded faces")


def test_nerve_equivalence(acceptance, absolute_instances, relative_instances):
    rng = random.Random(SEED + 2)
    ck = Check("nerve equivalence")
    for ss, res in absolute_instances:
        ck.merge(nerve_equivalence(ss, Bifiltration.absolute(res), rng, k=20))
    for ss, nerve in relative_instances:
        faces = {s: nerve.faces[s] for s in nerve.simplices}
        ck.merge(nerve_equivalence(ss, Bifiltration.relative(nerve), rng, k=20, faces=faces))
    _report(acceptance, "nerve equivalence", ck)


def test_path_invariants(acceptance):
    ck = path_suite(random.Random(SEED + 3), instances=500, samples=200)
    _report(acceptance, "path invariants", ck)


def test_arc_classification(acceptance, absolute_instances, relative_instances):
    ck = Check("arc classification")
    for _, res in absolute_instances:
        ck.merge(arc_classification(res.curves.values()))
    for _, nerve in relative_instances:
        ck.merge(arc_classification(nerve.relative.values(), "relative"))
    _report(acceptance, "arc classification", ck)


def test_subdivision_invariants(acceptance, relative_instances):
    ck = Check("subdivision invariants")
    for _, nerve in relative_instances:
        ck.merge(subdivision_invariants(nerve.subdivision))
    _report(acceptance, "subdivision invariants", ck, f"{len(relative_instances)} instances")


def test_homology_ground_truth(acceptance):
    rng = random.Random(SEED + 4)
    ck = Check("homology ground truth")
    for _ in range(10):
        ss = random_siteset(rng, rng.randint(3, 15))
        ck.merge(homology_ground_truth(ss, Bifiltration.absolute(absolute_pipeline(ss)), rng,
                                       k=10, resolution=512))
        rs = random_siteset(rng, rng.randint(3, 15), relative=True)
        ck.merge(homology_ground_truth(rs, Bifiltration.relative(relative_pipeline(rs)), rng,
                                       k=10, resolution=512))
    _report(acceptance, "homology ground truth", ck)


def test_barcode_template(acceptance):
    rng = random.Random(SEED + 5)
    ck = Check("barcode template")
    three = SiteSet.of([(0, 0), (2, 0), (0, 2)], (3, 3))
    ck.merge(template_check(Bifiltration.absolute(absolute_pipeline(three)), rng,
                            pairs=10, straddle=3, max_regions=None))
    sizes = []
    for _ in range(5):
        ss = random_siteset(rng, rng.randint(3, 8))
        sizes.append(len(ss.sites))
        ck.merge(template_check(Bifiltration.absolute(absolute_pipeline(ss)), rng,
                                pairs=10, straddle=3, max_regions=None))
    _report(acceptance, "barcode template", ck, f"random n = {sizes}")


def _time_pipeline(n, rng, reps=3):
    ss = random_siteset(rng, n)
    best = math.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        absolute_pipeline(ss)
        best = min(best, time.perf_counter() - t0)
    return best


def test_performance(acceptance):
    rng = random.Random(SEED + 6)
    _time_pipeline(50, rng, reps=1)           # warm-up
    times = {n: _time_pipeline(n, rng) for n in (250, 500, 1000, 2000)}
    ratios = [times[2 * n] / times[n] for n in (250, 500, 1000)]
    ok = times[1000] < 5.0 and all(r <= 3.0 for r in ratios)
    detail = ", ".join(f"n={n}: {t:.2f} s" for n, t in times.items())
    detail += "; ratios " + ", ".join(f"{r:.2f}" for r in ratios)
    acceptance("performance", ok, detail)
    assert ok, detail


def test_svg_emitter(acceptance):
    ss = random_siteset(random.Random(SEED + 7), 25)
    res = absolute_pipeline(ss)
    curves = [res.curves[s] for s in res.complex.simplices]
    svg = fileio.curves_svg(curves)
    same = svg == fileio.curves_svg([absolute_pipeline(ss).curves[s] for s in res.complex.simplices])
    by_label = {"-".join(map(str, c.simplex)): c for c in curves}
    worst = 0.0
    for label, kind, pts in fileio.svg_polyline_points(svg):
        c = by_label[label]
        for s, r in pts:
            if kind == "wall":
                worst = max(worst, abs(s - float(c.s0)) / (1 + abs(s)))
            elif kind == "tail":
                worst = max(worst, abs(r - float(c.r1)) / (1 + abs(r)))
            else:
                s_q = max(mpq(s), c.s0)
                v = float(boundary_value(c, s_q))
                ds = mpq(1, 10 ** 6)
                slope = (float(boundary_value(c, s_q + ds)) - v) / float(ds)
                worst = max(worst, abs(v - r) / math.sqrt(1 + slope * slope) / (1 + abs(r)))
    ok = same and worst < 1e-9
    acceptance("SVG determinism and arc residual", ok, f"deterministic={same}, max residual {worst:.3g}")
    assert ok
