"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --L 10 --repeat 3
"""
import argparse
import time

import numpy as np

from scarlett import fock_basis as fb
from scarlett import hamiltonian as ham
from scarlett import kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(L):
    Np = L
    D = fb.count_states(L, Np)
    table = fb.rank_table(L, Np)
    states = fb.enumerate_basis(L, Np).states
    m = ham.full_operator("H1", L, Np).matrix
    x = np.random.default_rng(0).normal(size=D) + 0j
    out = np.empty_like(x)
    return {
        "enumerate": lambda k: k.enumerate_compositions(L, Np, D),
        "rank": lambda k: k.rank_states(states, table, Np),
        "hops(H1)": lambda k: k.hop_ranks(states, 0, True, table, Np),
        "orbits": lambda k: k.orbit_data(states, table, Np),
        "colors": lambda k: k.colors(states, Np, True),
        "census": lambda k: k.census(L, Np, D),
        "spmv": lambda k: k.csr_matvec(m.indptr, m.indices, m.data, x, out, 1),
    }, D


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    try:
        cy = kernels.backend_module("cython")
    except ImportError:
        raise SystemExit("compiled core is not built; run pip install -e . first")
    py = kernels.backend_module("python")

    table, D = cases(args.L)
    print(f"L = Np = {args.L}, dimension {D}, best of {args.repeat}")
    print(f"{'kernel':<12}{'cython [s]':>12}{'python [s]':>12}{'speedup':>10}")
    for name, fn in table.items():
        tc = best_of(lambda: fn(cy), args.repeat)
        tp = best_of(lambda: fn(py), args.repeat)
        print(f"{name:<12}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
