#!/usr/bin/env python3
"""Benchmark the population-sweep kernels: numba JIT vs pure numpy.

The segment gather-sum is the hot loop of every solver sweep.  This script
times both backends on the same draws and prints a small table, plus one
end-to-end fixed-point solve per backend.

Run with the package installed:

    python3 benchmarks/bench_kernels.py
    SPARSESPECTRA_NO_NUMBA=1 python3 benchmarks/bench_kernels.py   # numpy only
"""

import time

import numpy as np

from sparsespectra._kernels import (
    HAVE_NUMBA,
    _segment_sums_numpy,
    segment_sums,
)
from sparsespectra.distributions import DegreeDistribution
from sparsespectra.rde import RdeParams, rde_fixed_point

REPEATS = 20


def time_fn(fn, *args) -> float:
    fn(*args)  # warm-up (JIT compile / cache touch)
    t0 = time.perf_counter()
    for _ in range(REPEATS):
        fn(*args)
    return (time.perf_counter() - t0) / REPEATS


def bench_segment_sums():
    rng = np.random.default_rng(0)
    print(f"{'M':>10} {'E[N]':>5} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    for m, lam in ((10_000, 2.0), (100_000, 2.0), (100_000, 5.0), (1_000_000, 2.0)):
        values = rng.standard_normal(m) + 1j * np.abs(rng.standard_normal(m))
        counts = rng.poisson(lam, size=m)
        idx = rng.integers(0, m, size=int(counts.sum()))
        t_np = time_fn(_segment_sums_numpy, values, idx, counts)
        if HAVE_NUMBA:
            t_nb = time_fn(segment_sums, values, idx, counts)
            check = np.abs(
                segment_sums(values, idx, counts)
                - _segment_sums_numpy(values, idx, counts)
            ).max()
            assert check < 1e-9, f"backend mismatch: {check}"
            print(f"{m:>10} {lam:>5.1f} {t_np*1e3:>12.3f} {t_nb*1e3:>12.3f} {t_np/t_nb:>8.1f}x")
        else:
            print(f"{m:>10} {lam:>5.1f} {t_np*1e3:>12.3f} {'-':>12} {'-':>8}")


def bench_solve():
    params = RdeParams(population_size=100_000, sweeps=30, seed=0, convergence_tol=1e-12)
    poi2 = DegreeDistribution.poisson(2.0)
    t0 = time.perf_counter()
    rde_fixed_point(poi2, 0, 0.5 + 0.05j, params)
    dt = time.perf_counter() - t0
    backend = "numba" if HAVE_NUMBA else "numpy"
    print(f"\nfull solve (M=1e5, 30 sweeps, Poisson(2), {backend} active): {dt:.2f}s")


if __name__ == "__main__":
    print("numba available:", HAVE_NUMBA)
    bench_segment_sums()
    bench_solve()
