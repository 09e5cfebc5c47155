"""Benchmark: numba kernels vs the pure fallback on a real workload.

Builds the degree-5 bar cochain factorizations of the symmetric group on
three letters (3125 x 625 over Z and mod 2) and times the hot query paths:
row-operation log replay, CSR matvec, and full solves.  Run with

    python benchmarks/bench_kernels.py [--deg 6]

COHOMKIT_NUMBA is overridden internally; the numbers are per call.
"""

import argparse
import time

import numpy as np

from cohomkit import kernels
from cohomkit.groups import symmetric_3
from cohomkit.resolutions import bar_cochains


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--deg", type=int, default=5,
                    help="bar degree to factor (5 is quick, 6 is heavy)")
    args = ap.parse_args()
    n = args.deg

    G = symmetric_3()
    bc = bar_cochains(G)
    print(f"factoring the degree-{n} differential of {G.label} "
          f"({bc.rank(n)} x {bc.rank(n - 1)}) ...")
    t0 = time.time()
    fact_z = bc.fact(n, 0)
    fact_2 = bc.fact(n, 2)
    print(f"  factorizations built in {time.time() - t0:.1f}s "
          f"(log length {len(fact_z.log[0])})")

    rng = np.random.default_rng(0)
    vec_m = rng.integers(0, 2, bc.rank(n)).tolist()
    vec_z = rng.integers(-3, 4, bc.rank(n)).tolist()
    indptr, indices, data = bc.csr(n)
    cvec = rng.integers(-2, 3, bc.rank(n - 1)).tolist()
    # an image vector so that solve() succeeds
    img = fact_2.matvec([rng.integers(0, 2) for _ in range(bc.rank(n - 1))])

    rows = []
    for backend in ("pure", "numba"):
        try:
            kernels.set_backend(backend)
        except ValueError:
            continue
        if kernels.backend() != backend:
            print(f"  backend {backend} unavailable, skipping")
            continue
        t_replay_m = timeit(lambda: kernels.apply_oplog_mod(
            vec_m, fact_2.log, 2))
        t_replay_z = timeit(lambda: kernels.apply_oplog_int(
            vec_z, fact_z.log), repeat=3)
        t_matvec = timeit(lambda: kernels.csr_matvec_int(
            indptr, indices, data, cvec))
        t_solve = timeit(lambda: fact_2.solve(img), repeat=3)
        rows.append((backend, t_replay_m, t_replay_z, t_matvec, t_solve))

    print(f"\n{'backend':<8} {'replay mod2':>12} {'replay Z':>12} "
          f"{'matvec Z':>12} {'solve mod2':>12}")
    for backend, a, b, c, d in rows:
        print(f"{backend:<8} {a * 1e3:>10.1f}ms {b * 1e3:>10.1f}ms "
              f"{c * 1e3:>10.1f}ms {d * 1e3:>10.1f}ms")
    if len(rows) == 2:
        print(f"\nspeedups (pure / numba): "
              f"replay mod2 {rows[0][1] / rows[1][1]:.0f}x, "
              f"replay Z {rows[0][2] / rows[1][2]:.0f}x, "
              f"matvec {rows[0][3] / rows[1][3]:.0f}x, "
              f"solve {rows[0][4] / rows[1][4]:.0f}x")


if __name__ == "__main__":
    main()
