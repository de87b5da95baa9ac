"""Command line front end.

    locbifilt absolute --points pts.txt --center 3,3 --out curves.json [--svg curves.svg]
    locbifilt relative --points pts.txt --center 3,3 --out curves.json [--svg subdivision.svg]
    locbifilt slice    --curves curves.json --slope 1 --offset 0 [--out barcode.json]
    locbifilt template --curves curves.json [--out template.json]
    locbifilt validate --seed 1 --n 10 --samples 50

Exit codes: 0 ok, 1 other errors, 2 degenerate input, 3 validation failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import fileio
from .curves import absolute_pipeline
from .delaunay import SiteSet
from .errors import DegenerateInput, LocBifiltError
from .kernel import rat

log = logging.getLogger("locbifilt")

EXIT_OK, EXIT_ERROR, EXIT_DEGENERATE, EXIT_VALIDATION = 0, 1, 2, 3


def _sites(args) -> SiteSet:
    pts = fileio.read_points(args.points)
    return SiteSet(pts, fileio.parse_point(args.center))


def _emit(doc, path):
    text = fileio.dump_json(doc, path)
    if path in (None, "-"):
        sys.stdout.write(text)


def cmd_absolute(args) -> int:
    ss = _sites(args)
    res = absolute_pipeline(ss, jobs=args.jobs)
    _emit(fileio.absolute_to_json(ss, res), args.out)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(fileio.curves_svg(res.curves[s] for s in res.complex.simplices))
    log.info("%d simplices", len(res.curves))
    return EXIT_OK


def cmd_relative(args) -> int:
    from .subdivision import relative_pipeline
    ss = _sites(args)
    nerve = relative_pipeline(ss, jobs=args.jobs)
    _emit(fileio.relative_to_json(ss, nerve), args.out)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(fileio.subdivision_svg(nerve.subdivision))
    log.info("%d polygons, %d nerve simplices", len(nerve.subdivision.polygons), len(nerve.simplices))
    return EXIT_OK


def cmd_slice(args) -> int:
    from .slices import Slice, slice_barcode
    cf = fileio.load_curves(args.curves)
    if args.mode and args.mode != cf.mode:
        raise ValueError(f"--mode {args.mode} but the curve file is {cf.mode}")
    sl = Slice(rat(args.slope), rat(args.offset))
    if (cf.mode == "absolute" and sl.m <= 0) or (cf.mode == "relative" and sl.m >= 0):
        raise ValueError(f"slope {args.slope} has the wrong sign for {cf.mode} mode")
    filt, bars = slice_barcode(cf.bifiltration(), sl)
    _emit(fileio.barcode_to_json(cf.mode, sl, filt, bars, rat(args.width)), args.out)
    return EXIT_OK


def cmd_template(args) -> int:
    from .slices import barcode_template
    cf = fileio.load_curves(args.curves)
    T = barcode_template(cf.bifiltration())
    if T.overlaps:
        log.warning("%d overlapping curve pairs; their overlap endpoints are part of I", len(T.overlaps))
    _emit(fileio.template_to_json(T), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_validation
    checks = run_validation(seed=args.seed, n=args.n, samples=args.samples,
                            resolution=args.resolution, tamper=args.tamper)
    ok = True
    for c in checks:
        print(c.line())
        for f in c.failures[:3]:
            print(f"    {f}")
        ok = ok and c.passed
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locbifilt",
                                 description="Entry curves and slice barcodes of localized bifiltrations.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, svg_help in (("absolute", cmd_absolute, "SVG of the entry curves"),
                               ("relative", cmd_relative, "SVG of the subdivision")):
        p = sub.add_parser(name, help=f"{name} entry curves")
        p.add_argument("--points", required=True, help="points file, one x,y per line")
        p.add_argument("--center", required=True, help="center q as x,y")
        p.add_argument("--out", default="-", help="JSON output (default stdout)")
        p.add_argument("--svg", help=svg_help)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.set_defaults(fn=fn)

    p = sub.add_parser("slice", help="barcode along one slice")
    p.add_argument("--curves", required=True, help="curve JSON from absolute/relative")
    p.add_argument("--slope", required=True)
    p.add_argument("--offset", required=True)
    p.add_argument("--mode", choices=("absolute", "relative"))
    p.add_argument("--width", default="1/1000000000000", help="interval width for entry values")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_slice)

    p = sub.add_parser("template", help="barcode template")
    p.add_argument("--curves", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_template)

    p = sub.add_parser("validate", help="randomized oracle cross-checks")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--tamper", choices=("s0",), help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except DegenerateInput as e:
        who = f" (sites {list(e.sites)})" if getattr(e, "sites", None) else ""
        print(f"error: degenerate input: {e}{who}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (LocBifiltError, ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
