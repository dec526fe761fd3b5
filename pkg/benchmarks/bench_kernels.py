#!/usr/bin/env python3
"""Benchmark the compiled witness kernel against the pure-Python fallback.

Replays the Monte Carlo workload (perturbation batches at several damping
values) on both backends and reports wall time, per-sample cost and the
largest disagreement between the two.

    python3 benchmarks/bench_kernels.py --samples 10000 --repeats 5
"""

import argparse
import math
import time

import numpy as np

from qracsim._kernels import _witness_py

try:
    from qracsim._kernels import _witness_cy
except ImportError:
    _witness_cy = None


def make_workload(samples, gammas, seed):
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    batches = []
    for gamma in gammas:
        draws = rng.uniform(-1.0, 1.0, size=(samples, 8))
        batches.append(
            (
                gamma,
                draws[:, 0:4] * math.radians(1.0),
                draws[:, 4:6] * math.radians(1.0),
                draws[:, 6:8] * 0.01,
            )
        )
    return batches


def run_backend(module, batches, f_a, f_b, repeats):
    best = math.inf
    outputs = None
    for _ in range(repeats):
        start = time.perf_counter()
        outputs = [
            module.witness_batch(gamma, f_a, f_b, prep, meas, deltas)
            for gamma, prep, meas, deltas in batches
        ]
        best = min(best, time.perf_counter() - start)
    return best, outputs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--fa", type=float, default=0.45)
    parser.add_argument("--fb", type=float, default=0.45)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    gammas = [0.0, 0.25, 0.5, 0.75, 1.0]
    batches = make_workload(args.samples, gammas, args.seed)
    total = args.samples * len(gammas)
    print(f"workload: {len(gammas)} gammas x {args.samples} samples = {total} evaluations")

    t_py, out_py = run_backend(_witness_py, batches, args.fa, args.fb, args.repeats)
    print(f"python backend: {t_py * 1e3:9.2f} ms  ({t_py / total * 1e6:8.3f} us/sample)")

    if _witness_cy is None:
        print("cython backend: not built (pip install -e . compiles it)")
        return

    t_cy, out_cy = run_backend(_witness_cy, batches, args.fa, args.fb, args.repeats)
    print(f"cython backend: {t_cy * 1e3:9.2f} ms  ({t_cy / total * 1e6:8.3f} us/sample)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    worst = 0.0
    for (w_p, acc_p, ok_p), (w_c, acc_c, ok_c) in zip(out_py, out_cy):
        assert np.array_equal(ok_p, ok_c)
        kept = ok_p == 1
        worst = max(
            worst,
            float(np.abs(w_p[kept] - w_c[kept]).max(initial=0.0)),
            float(np.abs(acc_p[kept] - acc_c[kept]).max(initial=0.0)),
        )
    print(f"max |python - cython| over the workload: {worst:.3e}")


if __name__ == "__main__":
    main()
