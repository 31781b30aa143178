"""Compare the numba and numpy variants of the hot kernels.

Run with ``python benchmarks/bench_kernels.py``.  The first numba call of
each kernel is timed separately (compile or cache load), then every kernel
is timed on identical inputs under both backends and the results checked
for agreement.
"""

import argparse
import time

import numpy as np

from convexgreen import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def membership_case(rng):
    G = rng.integers(0, 6, size=(24, 3)).astype(float)
    P = rng.uniform(-0.5, 6.0, size=(400, 3))
    return (G, P, 1e-8, 5000)


def grid_case(rng):
    n = 4
    axes = np.vstack([np.linspace(-3, 3, 41)] * n)
    counts = np.full(n, 41, dtype=np.int64)
    s1, o1 = rng.uniform(0, 2, (12, n)), np.zeros(12)
    s2, o2 = rng.uniform(0, 2, (30, n)), np.zeros(30)
    return (axes, counts, s1, o1, s2, o2, 0, 41**n)


def simplex_case(rng):
    G = rng.uniform(0, 3, size=(60, 4))
    return (G.T.copy(), rng.uniform(0, 2, 4), np.ones(60), 1e-8, 5000)


def batch_simplex(impl, args, count=200):
    def run():
        last = None
        for _ in range(count):
            last = impl(*args)
        return last

    return run


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if K.simplex_numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)

    sargs, margs, gargs = simplex_case(rng), membership_case(rng), grid_case(rng)
    cases = [
        ("simplex x200", batch_simplex(K.simplex_numpy, sargs), batch_simplex(K.simplex_numba, sargs)),
        ("membership 400 pts", lambda: K.membership_batch_numpy(*margs), lambda: K.membership_batch_numba(*margs)),
        ("grid diff 41^4", lambda: K.grid_diff_numpy(*gargs), lambda: K.grid_diff_numba(*gargs)),
    ]

    print(f"{'kernel':<20}{'first numba':>14}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, np_run, nb_run in cases:
        t = time.perf_counter()
        nb_run()
        first = time.perf_counter() - t
        t_nb, out_nb = best_of(nb_run, args.repeat)
        t_np, out_np = best_of(np_run, args.repeat)
        if isinstance(out_nb, np.ndarray):
            agree = np.array_equal(out_nb, out_np)
        else:
            agree = all(np.allclose(a, b) for a, b in zip(out_nb, out_np))
        flag = "" if agree else "  MISMATCH"
        print(f"{name:<20}{first:>13.3f}s{t_nb:>11.4f}s{t_np:>11.4f}s{t_np / t_nb:>9.1f}x{flag}")


if __name__ == "__main__":
    main()
