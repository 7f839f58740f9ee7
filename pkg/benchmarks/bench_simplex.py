"""Benchmark of the two feasibility kernels on identical inputs.

Runs the pure Python kernel and the compiled kernel over the same batch
of randomly generated row systems, checks that their answers agree
exactly, and reports wall times per backend.  Also times an end-to-end
verification of a corpus program in a subprocess per backend, because
callers feel kernel speed only through the polyhedra layer on top.

Usage: python3 benchmarks/bench_simplex.py [--trials N] [--seed S]
"""

from __future__ import annotations

import argparse
import os
import pathlib
import random
import subprocess
import sys
import time
from fractions import Fraction

from hornsafe.lra import _simplex_py
from hornsafe.lra._simplex_py import REL_EQ, REL_LE, REL_LT

try:
    from hornsafe.lra import _simplex_cy
except ImportError:
    _simplex_cy = None

REPO = pathlib.Path(__file__).resolve().parent.parent


def random_system(rng: random.Random, ncols: int, nrows: int):
    rows = []
    for _ in range(nrows):
        coeffs = [
            Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(ncols)
        ]
        rel = rng.choice((REL_LE, REL_LE, REL_LT, REL_EQ))
        rhs = Fraction(rng.randint(-6, 6), rng.randint(1, 2))
        rows.append((coeffs, rel, rhs))
    return ncols, rows


def bench_kernel(mod, systems):
    t0 = time.perf_counter()
    results = [mod.simplex_feasible(ncols, rows) for ncols, rows in systems]
    return time.perf_counter() - t0, results


def bench_end_to_end(backend: str, chc: pathlib.Path) -> float:
    env = dict(os.environ, HORNSAFE_KERNEL=backend)
    t0 = time.perf_counter()
    subprocess.run(
        [sys.executable, "-m", "hornsafe", "verify", str(chc)],
        capture_output=True,
        env=env,
        check=True,
    )
    return time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--cols", type=int, default=8)
    ap.add_argument("--rows", type=int, default=12)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    systems = [
        random_system(rng, rng.randint(2, args.cols), rng.randint(2, args.rows))
        for _ in range(args.trials)
    ]

    t_py, r_py = bench_kernel(_simplex_py, systems)
    print(f"pure     kernel: {args.trials} systems in {t_py * 1000:8.1f} ms")

    if _simplex_cy is None:
        print("compiled kernel: not built (install with Cython available)")
        return 0

    t_cy, r_cy = bench_kernel(_simplex_cy, systems)
    print(f"compiled kernel: {args.trials} systems in {t_cy * 1000:8.1f} ms")
    if r_py != r_cy:
        print("MISMATCH: backends disagree on at least one system")
        return 1
    print(f"identical results on all systems; speedup {t_py / t_cy:.1f}x")

    chc = REPO / "corpus" / "fib.chc"
    if chc.exists():
        e_py = bench_end_to_end("pure", chc)
        e_cy = bench_end_to_end("compiled", chc)
        print(
            f"end-to-end {chc.name}: pure {e_py * 1000:.0f} ms, "
            f"compiled {e_cy * 1000:.0f} ms, speedup {e_py / e_cy:.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
