#!/usr/bin/env python3
"""Benchmark the compiled covering-scan kernel against the pure fallback.

Times the three kernel entry points on synthetic workloads sized like the
calibration hot path (one binary-search calibration evaluates
coverage_count ~30 times over the full calibration matrix), checks the two
backends agree bit-for-bit, and prints a speedup table.

Usage: python benchmarks/bench_scan.py [--n 2000] [--k 50] [--repeat 5]
"""

import argparse
import time

import numpy as np

from ordinalcps.backend import compiled_available, get_kernels
from ordinalcps.harness import SynthSpec, synth_generate


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not compiled_available():
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    d = synth_generate(SynthSpec(k=args.k, n=args.n, sigma_range=(1.0, 5.0), seed=123))
    scores, labels = d.scores, d.labels
    tau, lam = 0.9, 0.003
    pure = get_kernels("pure")
    comp = get_kernels("compiled")

    agree = (
        pure.coverage_count(scores, labels, tau, lam)
        == comp.coverage_count(scores, labels, tau, lam)
        and all(
            np.array_equal(a, b)
            for a, b in zip(
                pure.batch_min_intervals(scores, tau, lam),
                comp.batch_min_intervals(scores, tau, lam),
            )
        )
    )
    print(f"backends agree bit-for-bit: {agree}")
    if not agree:
        raise SystemExit("backend mismatch -- kernels out of sync")

    cases = {
        f"coverage_count ({args.n}x{args.k})": (
            lambda be: be.coverage_count(scores, labels, tau, lam)
        ),
        f"batch_min_intervals ({args.n}x{args.k})": (
            lambda be: be.batch_min_intervals(scores, tau, lam)
        ),
        "scan_min_interval (single row x 1000)": (
            lambda be: [be.scan_min_interval(scores[0], tau, lam) for _ in range(1000)]
        ),
    }
    print(f"{'kernel':<40} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for name, fn in cases.items():
        t_pure = _time(lambda: fn(pure), args.repeat)
        t_comp = _time(lambda: fn(comp), args.repeat)
        print(f"{name:<40} {t_pure * 1e3:>10.2f}ms {t_comp * 1e3:>10.2f}ms {t_pure / t_comp:>8.1f}x")


if __name__ == "__main__":
    main()
