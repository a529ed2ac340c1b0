#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the cyclic Jacobi eigensolver and the Cholesky factorization on
random symmetric matrices, plus one end-to-end pattern projection per
backend, and prints a speedup table. Run after `pip install -e .`:

    python benchmarks/bench_kernels.py --sizes 10,25,51 --repeats 5
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def load_backends():
    backends = {}
    try:
        backends["cython"] = importlib.import_module("corrgen._kernels")
    except ImportError:
        print("note: compiled extension not built; benchmarking the fallback only")
    backends["python"] = importlib.import_module("corrgen._kernels_py")
    return backends


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(sizes, repeats):
    backends = load_backends()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<10} {'p':>5} " + " ".join(f"{name:>12}" for name in backends) + "   speedup")
    for p in sizes:
        a = rng.standard_normal((p, p))
        a = (a + a.T) / 2
        times = {
            name: time_call(lambda mod=mod: mod.jacobi_eigh(a, 1e-12, 100), repeats)
            for name, mod in backends.items()
        }
        _print_row("jacobi", p, times, backends)
        spd = a + p * np.eye(p)
        times = {
            name: time_call(lambda mod=mod: mod.cholesky_lower(spd, 1e-12), repeats)
            for name, mod in backends.items()
        }
        _print_row("cholesky", p, times, backends)


def _print_row(kernel, p, times, backends):
    cells = " ".join(f"{times[name]*1e3:>10.3f}ms" for name in backends)
    if len(times) == 2:
        ratio = times["python"] / times["cython"]
        print(f"{kernel:<10} {p:>5} {cells}   {ratio:>6.1f}x")
    else:
        print(f"{kernel:<10} {p:>5} {cells}")


def bench_solve(p, repeats):
    """End-to-end: one unconstrained projection per backend."""
    import os
    import subprocess
    import sys
    import textwrap

    script = textwrap.dedent(
        f"""
        import time
        import numpy as np
        from corrgen.experiments import uniform_seed_matrix
        from corrgen.graphs import gen_erdos_renyi
        from corrgen.solver import ProblemSpec, solve
        from corrgen import backend
        spec = ProblemSpec(graph=gen_erdos_renyi({p}, 0.5, 0),
                           seed_matrix=uniform_seed_matrix({p}, 1))
        t0 = time.perf_counter()
        rep = solve(spec)
        print(f"{{backend.BACKEND}}: {{time.perf_counter()-t0:.3f}}s "
              f"({{rep.iterations}} cycles, status {{rep.status.value}})")
        """
    )
    print(f"\nfull projection solve at p={p}, d=0.5, b=-1:", flush=True)
    for pure in ("0", "1"):
        env = dict(os.environ, CORRGEN_PURE_PYTHON=pure)
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--sizes", default="10,25,51")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument(
        "--solve-p",
        type=int,
        default=25,
        help="size for the end-to-end solve comparison (0 to skip)",
    )
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernels(sizes, args.repeats)
    if args.solve_p:
        bench_solve(args.solve_p, args.repeats)


if __name__ == "__main__":
    main()
