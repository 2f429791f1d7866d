"""Compare the compiled kernels with the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--paths 64] [--level 14] [--repeat 3]
"""

import argparse
import time

import numpy as np

from hdsim import _pykernels, kernels


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=64)
    ap.add_argument("--level", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if kernels.BACKEND != "cython":
        print("compiled extension not available; only the fallback can be timed")
    n = 2 ** args.level
    dt = 1.0 / n
    g = np.random.default_rng(0)
    db = g.standard_normal((args.paths, n)) * np.sqrt(dt)
    dw = g.standard_normal((args.paths, n)) * np.sqrt(dt)
    u = g.random((args.paths, n))

    cases = {
        "euler_ito": lambda impl: kernels.euler_ito(0.0, db, dw, dt, 0.5, 0.25, impl=impl),
        "heun_strat": lambda impl: kernels.heun_strat(0.0, db, dw, 0.5, 0.25, impl=impl),
        "skew_walk": lambda impl: kernels.skew_walk(0, u, 0.75, impl=impl),
    }
    print(f"{args.paths} paths x {n} steps, best of {args.repeat}")
    print(f"{'kernel':<12}{'fallback s':>12}{'compiled s':>12}{'speedup':>10}{'max diff':>12}")
    for name, fn in cases.items():
        t_py = _best(lambda: fn(_pykernels), args.repeat)
        if kernels.BACKEND == "cython":
            t_c = _best(lambda: fn(None), args.repeat)
            diff = np.max(np.abs(np.asarray(fn(None)[0], float) - np.asarray(fn(_pykernels)[0], float)))
            print(f"{name:<12}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>10.1f}{diff:>12.3g}")
        else:
            print(f"{name:<12}{t_py:>12.4f}{'-':>12}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
