"""Compiled versus pure-Python degree-sequence kernels.

Times one G(n, p) degree sample per backend over a grid of (n, p), checks
that both backends return identical samples, and prints a table:

    python3 benchmarks/bench_kernels.py --n 1000,4096,10000 --p 0.5,0.3,0.01
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from gnp_extremes import sim


def time_backend(n: int, p: float, backend: str, repeats: int) -> tuple[float, np.ndarray]:
    samples = []
    first = None
    for rep in range(repeats):
        rng = sim.trial_rng(12345, rep)
        start = time.perf_counter()
        deg = sim.sample_degrees(n, p, rng, backend)
        samples.append(time.perf_counter() - start)
        if first is None:
            first = deg
    return statistics.median(samples), first


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", default="1000,4096,10000")
    parser.add_argument("--p", default="0.5,0.3,0.01")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    ns = [int(float(v)) for v in args.n.split(",")]
    ps = [float(v) for v in args.p.split(",")]
    if sim.BACKEND != "compiled":
        print("compiled kernels are not built; only the python backend is timed")
    print(f"{'n':>7} {'p':>6} {'sampler':>7} {'compiled ms':>12} {'python ms':>10} "
          f"{'speedup':>8} {'identical':>9}")
    for n in ns:
        for p in ps:
            sampler = "sparse" if min(p, 1 - p) < sim.SPARSE_CUTOFF else "dense"
            py_time, py_deg = time_backend(n, p, "python", max(1, args.repeats // 2))
            if sim.BACKEND == "compiled":
                c_time, c_deg = time_backend(n, p, "compiled", args.repeats)
                same = np.array_equal(c_deg, py_deg)
                print(f"{n:>7} {p:>6g} {sampler:>7} {c_time * 1e3:>12.2f} {py_time * 1e3:>10.1f} "
                      f"{py_time / c_time:>8.1f} {str(same):>9}")
            else:
                print(f"{n:>7} {p:>6g} {sampler:>7} {'-':>12} {py_time * 1e3:>10.1f} "
                      f"{'-':>8} {'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
