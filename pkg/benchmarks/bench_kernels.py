"""Compare the compiled and pure-Python truncated-product kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py --factors 2000 --trunc 40

Two workloads are timed: raw ``term_products`` on random factor arrays, and
``eval_numeric`` of a restricted stable envelope entry.
"""

import argparse
import random
import time

import numpy as np

from ellstab import kernels
from ellstab.quiver import QuiverData, chamber_example, fixed_points, pol_example
from ellstab.stab import stab
from ellstab.theta import eval_numeric, random_point


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_factors(n, nterms, seed):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.3, 3.0, n) * np.exp(1j * rng.uniform(-0.5, 0.5, n))
    return (
        rng.integers(0, nterms, n),
        rng.integers(0, 3, n),
        xs,
        np.sqrt(xs),
        rng.choice([-2, -1, 1, 2], n),
    )


def bench_raw(n, nterms, trunc, repeat):
    args = random_factors(n, nterms, 0)
    rows = []
    results = {}
    for backend in ("python", "cython"):
        if backend == "cython" and kernels._compiled is None:
            rows.append((backend, None))
            continue
        t, out = _best_of(lambda: kernels.term_products(*args, nterms, 0.1, trunc, backend=backend), repeat)
        rows.append((backend, t))
        results[backend] = out
    if len(results) == 2:
        a, b = results["python"], results["cython"]
        err = max(abs(complex(p) - complex(c)) / (1 + abs(complex(p))) for p, c in zip(a[0] + a[1], list(b[0]) + list(b[1])))
        print("max relative difference between backends: %.2e" % err)
    return rows


def bench_eval(trunc, repeat):
    d = QuiverData([3], [1])
    c = chamber_example(d)
    e = stab(d, fixed_points(d, c)[0], pol_example(d), c)
    point = random_point(e.variables(), random.Random(1))
    rows = []
    for backend in ("python", "cython"):
        if backend == "cython" and kernels._compiled is None:
            rows.append((backend, None))
            continue
        t, _ = _best_of(lambda: eval_numeric(e, point, 0.1, trunc, backend=backend), repeat)
        rows.append((backend, t))
    return len(e), rows


def _report(title, rows):
    print(title)
    base = dict(rows).get("python")
    for backend, t in rows:
        if t is None:
            print("  %-7s unavailable" % backend)
        else:
            print("  %-7s %9.4f s  x%.1f" % (backend, t, base / t if base else 1.0))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--factors", type=int, default=2000)
    ap.add_argument("--terms", type=int, default=50)
    ap.add_argument("--trunc", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    _report("term_products, %d factors, trunc %d" % (args.factors, args.trunc),
            bench_raw(args.factors, args.terms, args.trunc, args.repeat))
    nterms, rows = bench_eval(args.trunc, args.repeat)
    _report("eval_numeric of the v=[3], w=[1] envelope (%d terms)" % nterms, rows)


if __name__ == "__main__":
    main()
