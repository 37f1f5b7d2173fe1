"""Benchmark the numba and numpy implementations of the hot kernels.

The workloads mirror the shapes seen by the negative-squares estimator
(power tables, kernel series sandwiches over a Gram batch, double power
series, batched polynomial evaluation).  Run with

    python benchmarks/bench_backends.py [--batch 40] [--terms 150] [--repeat 5]

Results are wall-clock medians; the numba path is warmed up once so JIT
compilation is not billed to the measurement.
"""

import argparse
import time

import numpy as np

from qschur import _accel


def timed(fn, args, repeat):
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best.append(time.perf_counter() - t0)
    return float(np.median(best))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--batch", type=int, default=40)
    parser.add_argument("--terms", type=int, default=150)
    parser.add_argument("--trunc", type=int, default=48)
    parser.add_argument("--degree", type=int, default=12)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    impls = _accel.implementations()
    if impls["numba"] is None:
        print("numba unavailable; only the numpy path can be timed")

    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.65, 0.65, size=(args.batch, 4))
    pw = impls["numpy"]["qpow_table"](pts, args.terms)
    mid = rng.uniform(-1, 1, size=(args.batch, args.batch, 1, 1, 4))
    tpts = rng.uniform(-0.4, 0.4, size=(12, 4))
    tpw = impls["numpy"]["qpow_table"](tpts, args.trunc)
    coeffs = rng.uniform(-1, 1, size=(args.trunc + 1, args.trunc + 1, 1, 1, 4))
    poly = rng.uniform(-1, 1, size=(args.degree + 1, 1, 1, 4))

    workloads = [
        ("qpow_table", (pts, args.terms)),
        ("series_sandwich", (pw, mid, pw)),
        ("double_series", (tpw, coeffs, tpw)),
        ("polyval_batch", (poly, pts)),
    ]

    print("backend selected at import: %s" % _accel.backend())
    header = "%-18s %12s %12s %9s" % ("kernel", "numpy [ms]", "numba [ms]", "speedup")
    print(header)
    print("-" * len(header))
    for name, wargs in workloads:
        t_np = timed(impls["numpy"][name], wargs, args.repeat)
        if impls["numba"] is not None:
            impls["numba"][name](*wargs)  # warm the JIT cache
            t_nb = timed(impls["numba"][name], wargs, args.repeat)
            ratio = t_np / t_nb if t_nb > 0 else float("inf")
            print("%-18s %12.3f %12.3f %8.1fx" % (name, t_np * 1e3, t_nb * 1e3, ratio))
        else:
            print("%-18s %12.3f %12s %9s" % (name, t_np * 1e3, "-", "-"))

    # ensure both paths agree on the benchmark inputs
    if impls["numba"] is not None:
        for name, wargs in workloads:
            a = impls["numpy"][name](*wargs)
            b = impls["numba"][name](*wargs)
            dev = float(np.max(np.abs(a - b)))
            if dev > 1e-10:
                raise SystemExit("backend mismatch on %s: %.3e" % (name, dev))
        print("\nbackend agreement verified (max deviation < 1e-10)")


if __name__ == "__main__":
    main()
