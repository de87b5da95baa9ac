#!/usr/bin/env python3
"""Compare the numba and numpy backends of the oracle raster kernels.

    python3 benchmarks/bench_kernels.py [--res 512] [--n 20] [--repeat 5]

Both backends run on identical inputs; outputs are checked for agreement
before timings are reported.
"""
import argparse
import time

import numpy as np

from locbifilt import _kernels as K


def _inputs(n, res, seed):
    rng = np.random.default_rng(seed)
    P = rng.uniform(0, 10, size=(n, 2))
    g = np.linspace(-1, 11, res)
    return g, g.copy(), P[:, 0].copy(), P[:, 1].copy()


def _time(fn, repeat):
    fn()  # warm-up, includes JIT compile for numba
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--res", type=int, default=512)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    xs, ys, px, py = _inputs(args.n, args.res, args.seed)
    s, qx, qy, r = 2.0, 5.0, 5.0, 16.0
    mask = K.occupancy(xs, ys, px, py, s, qx, qy, r, False)

    cases = {
        "occupancy": lambda: K.occupancy(xs, ys, px, py, s, qx, qy, r, False),
        "distance_fields": lambda: K.distance_fields(xs, ys, px, py, s, qx, qy, r, True),
        "count_components": lambda: K.count_components(~mask, True, True),
    }
    backends = ["numpy"] + (["numba"] if K._nb is not None else [])
    prev = K.backend()
    results = {}
    try:
        for b in backends:
            K.set_backend(b)
            for name, fn in cases.items():
                results[(name, b)] = (_time(fn, args.repeat), fn())
    finally:
        K.set_backend(prev)

    print(f"res={args.res} n={args.n} best of {args.repeat}")
    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}  agree")
    for name in cases:
        t_np, out_np = results[(name, "numpy")]
        if "numba" in backends:
            t_nb, out_nb = results[(name, "numba")]
            if isinstance(out_np, tuple):
                agree = all(np.allclose(a, b, atol=1e-9) for a, b in zip(out_np, out_nb))
            else:
                agree = bool(np.all(np.asarray(out_np) == np.asarray(out_nb)))
            print(f"{name:<18}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}  {agree}")
        else:
            print(f"{name:<18}{t_np:>12.4f}{'-':>12}{'-':>10}  -")


if __name__ == "__main__":
    main()
