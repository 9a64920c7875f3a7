#!/usr/bin/env python3
"""Benchmark the differential-scan kernel: numba JIT backend vs pure NumPy.

The scan dominates the workbench's runtime (one histogram over all 2^16
inputs for every one of the 2^16 - 1 input differences), so both backends
are compared on the same codebook. Results are bit-identical; only speed
differs.

Usage:
    python benchmarks/bench_scan.py [--desc toy-heys] [--rounds 4]
                                    [--rows 4096] [--iterations 3] [--full]

--rows benchmarks a slice of the input-difference axis (default 4096 rows);
--full times one complete 65535-row scan per backend instead.
"""

import argparse
import os
import statistics
import time

from spndiff import evaluate_all, resolve_description, zero_key
from spndiff import kernels


def run_backend(name: str, table, lo: int, hi: int, iterations: int):
    os.environ[kernels.BACKEND_ENV] = name
    kernels.row_maxima(table, 1, 2)  # warm (jit compile / first touch)
    times = []
    result = None
    for _ in range(iterations):
        t0 = time.perf_counter()
        result = kernels.row_maxima(table, lo, hi)
        times.append(time.perf_counter() - t0)
    return result, times


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--desc", default="toy-heys")
    parser.add_argument("--rounds", type=int, default=4)
    parser.add_argument("--rows", type=int, default=4096)
    parser.add_argument("--iterations", type=int, default=3)
    parser.add_argument("--full", action="store_true",
                        help="time one full 65535-row scan per backend")
    args = parser.parse_args()

    name, desc = resolve_description(args.desc)
    desc = desc.with_rounds(args.rounds)
    table = evaluate_all(desc, zero_key(desc))
    if args.full:
        lo, hi, iterations = 1, 65536, 1
    else:
        lo, hi, iterations = 1, 1 + args.rows, args.iterations
    rows = hi - lo

    print(f"cipher {desc.name} ({name}), rounds {args.rounds}, "
          f"{rows} rows x {iterations} iteration(s), "
          f"{kernels.effective_jobs(None)} worker(s)")

    saved = os.environ.get(kernels.BACKEND_ENV)
    try:
        nb_result, nb_times = run_backend("numba", table, lo, hi, iterations)
        np_result, np_times = run_backend("numpy", table, lo, hi, iterations)
    finally:
        if saved is None:
            os.environ.pop(kernels.BACKEND_ENV, None)
        else:
            os.environ[kernels.BACKEND_ENV] = saved

    identical = bool((nb_result == np_result).all())
    nb_med = statistics.median(nb_times)
    np_med = statistics.median(np_times)

    print(f"{'backend':<10} {'median':>10} {'min':>10} {'rows/s':>12}")
    for label, med, times in (("numba", nb_med, nb_times), ("numpy", np_med, np_times)):
        print(f"{label:<10} {med:>9.3f}s {min(times):>9.3f}s {rows / med:>12.0f}")
    print(f"speedup (numpy/numba): {np_med / nb_med:.2f}x")
    print(f"results bit-identical: {identical}")
    if not identical:
        raise SystemExit("backend mismatch")


if __name__ == "__main__":
    main()
