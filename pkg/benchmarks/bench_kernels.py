#!/usr/bin/env python3
"""Benchmark the compiled kink-counting kernel against the numpy fallback.

Runs the same batches through both backends, checks they agree bit for bit,
and reports trials/second plus the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--rows N] [--repeats K]
"""

import argparse
import time

import numpy as np

from kinkscope._kernels import _reference

try:
    from kinkscope._kernels import _fast
except ImportError:
    _fast = None


def _time_kernel(func, biases, weights, radius, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func(biases, weights, radius, 1e-12)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=200_000, help="trials per batch")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best kept)")
    args = parser.parse_args()

    if _fast is None:
        print("compiled backend not built; only timing the numpy fallback")

    rng = np.random.default_rng(12345)
    print(f"{'width':>6} {'radius':>7} {'numpy tr/s':>12} {'cython tr/s':>12} {'speedup':>8}")
    for width in (2, 5, 10, 20, 50):
        biases = rng.standard_normal((args.rows, width))
        weights = rng.standard_normal((args.rows, width))
        for radius in (1.0, float("inf")):
            t_ref = _time_kernel(_reference.count_kinks_batch, biases, weights, radius, args.repeats)
            ref_rate = args.rows / t_ref
            if _fast is None:
                print(f"{width:>6} {radius:>7g} {ref_rate:>12.4g}")
                continue
            t_fast = _time_kernel(_fast.count_kinks_batch, biases, weights, radius, args.repeats)
            same = np.array_equal(
                _reference.count_kinks_batch(biases, weights, radius, 1e-12),
                _fast.count_kinks_batch(biases, weights, radius, 1e-12),
            )
            assert same, "backends disagree!"
            print(
                f"{width:>6} {radius:>7g} {ref_rate:>12.4g} "
                f"{args.rows / t_fast:>12.4g} {t_ref / t_fast:>8.2f}x"
            )


if __name__ == "__main__":
    main()
