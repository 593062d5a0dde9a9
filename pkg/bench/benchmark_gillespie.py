#!/usr/bin/env python3
"""Compare the two simulation backends on an ensemble workload.

Usage: python3 bench/benchmark_gillespie.py [--n 256] [--replicas 200]
       [--t-max 5.0] [--threads 1] [--seed 0]

The backends run the same kernel source (one jitted, one interpreted) on
identical replica streams, so their outputs are bit-identical; the point
of the benchmark is the wall-clock ratio. The first numba call includes
JIT compilation and is timed separately.
"""

import argparse
import time

import numpy as np

from snnss import build_cycle, ensemble_mcf, make_noisy_voter


def run(backend, g, r, t_grid, replicas, seed, threads):
    t0 = time.perf_counter()
    est = ensemble_mcf(g, r, 0.5, t_grid, replicas, seed, threads=threads, backend=backend)
    return time.perf_counter() - t0, est


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--t-max", type=float, default=5.0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = build_cycle(args.n)
    r = make_noisy_voter(2, d=0.3, h1=0.5, h2=0.7)
    t_grid = np.linspace(0.0, args.t_max, 21)
    events = args.n * r.max_rate * args.t_max * args.replicas
    print(
        f"cycle n={args.n}, {args.replicas} replicas to t={args.t_max}, "
        f"threads={args.threads} (~{events:.0f} candidate events)"
    )

    warm, _ = run("numba", g, r, t_grid, 1, args.seed, 1)
    print(f"numba first call (includes compile): {warm:.3f} s")

    t_nb, est_nb = run("numba", g, r, t_grid, args.replicas, args.seed, args.threads)
    t_np, est_np = run("numpy", g, r, t_grid, args.replicas, args.seed, args.threads)

    same = np.array_equal(est_nb.mean, est_np.mean) and np.array_equal(
        est_nb.stderr, est_np.stderr
    )
    print(f"numba: {t_nb:.3f} s")
    print(f"numpy: {t_np:.3f} s")
    print(f"speedup: {t_np / t_nb:.1f}x, outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
