"""Benchmark: compiled vs pure-Python separated-set kernel.

Two workloads, timed on identical inputs for both backends:

* "bowen": separation graphs that actually arise here — thresholded Bowen
  rho_n matrices over full-shift window nets (highly structured; the
  colouring shortcut usually closes them immediately).
* "random": sparse Erdos-Renyi graphs (edge probability --density), the
  branch-and-bound stress case.

Asserts that both backends return maximum sets of identical size.

Run: python3 benchmarks/bench_sep.py
"""

import argparse
import time

import numpy as np

from slovaklab import sepkernel
from slovaklab.entropy import rho_running
from slovaklab.spaces import epsilon_net
from slovaklab.systems import make_fullshift


def bowen_adjacency(depth: int, n: int, eps: float) -> np.ndarray:
    handle = make_fullshift(depth)
    K = epsilon_net("fullshift", eps, depth)
    d = None
    for _, mat in rho_running(handle, K, n):
        d = mat
    adj = d > eps
    np.fill_diagonal(adj, False)
    return adj


def random_adjacency(n: int, p: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < p
    adj = np.triu(adj, 1)
    return adj | adj.T


def time_backends(name: str, adj: np.ndarray, backends, repeat: int) -> None:
    times, size = {}, None
    for backend in backends:
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            idx = sepkernel.max_separated_indices(adj, backend=backend)
            best = min(best, time.perf_counter() - t)
        times[backend] = best
        if size is None:
            size = len(idx)
        elif len(idx) != size:
            raise AssertionError(f"backend disagreement on {name}")
    row = f"{name:>24} " + " ".join(f"{times[b]:>10.4f}s" for b in backends)
    if len(backends) == 2:
        row += f"  {times['python'] / times['cython']:>6.1f}x"
    print(row + f"   |max set| = {size}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--density", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["python"]
    if sepkernel.BACKEND == "cython":
        backends.insert(0, "cython")
    else:
        print("compiled kernel unavailable; timing the fallback only")
    print(f"{'workload':>24} " + " ".join(f"{b:>11}" for b in backends))

    for depth, n in ((6, 6), (8, 8), (9, 8)):
        adj = bowen_adjacency(depth, n, eps=0.4)
        time_backends(f"bowen d={depth} ({adj.shape[0]}v)", adj,
                      backends, args.repeat)
    for n in (80, 120, 160):
        adj = random_adjacency(n, args.density, seed=n)
        time_backends(f"random n={n} p={args.density}", adj,
                      backends, args.repeat)


if __name__ == "__main__":
    main()
