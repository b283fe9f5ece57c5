"""Benchmark the batched 4x4 boundary-solver backends.

Runs the pure-NumPy fallback and (when built) the Cython extension on
identical inputs, reports throughput, and verifies that the results are
bitwise identical.

Usage: python benchmarks/kernel_benchmark.py [batch ...]
"""

import sys
import time

import numpy as np

from fiberforce import _kernels_py

try:
    from fiberforce import _kernels_cy
except ImportError:
    _kernels_cy = None


def _systems(rng, n):
    a = rng.standard_normal((n, 4, 4)) + 1j * rng.standard_normal((n, 4, 4))
    b = rng.standard_normal((n, 4, 2)) + 1j * rng.standard_normal((n, 4, 2))
    # spread row scales over many decades, like the Bessel-matched
    # boundary systems the solver actually sees
    a *= 10.0 ** rng.uniform(-40, 40, size=(n, 1, 1))
    b *= 10.0 ** rng.uniform(-40, 40, size=(n, 1, 1))
    return a, b


def _time(solver, a, b, repeats=7):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = solver(a, b)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(batches):
    rng = np.random.default_rng(12345)
    print(f"{'batch':>8} {'numpy':>12} {'cython':>12} {'speedup':>9}  "
          f"identical")
    for n in batches:
        a, b = _systems(rng, n)
        t_py, x_py = _time(_kernels_py.solve_4x2, a, b)
        if _kernels_cy is None:
            print(f"{n:>8} {t_py * 1e3:>10.3f}ms {'-':>12} {'-':>9}  -")
            continue
        t_cy, x_cy = _time(_kernels_cy.solve_4x2, a, b)
        same = np.array_equal(x_py.view(np.uint64), x_cy.view(np.uint64))
        print(f"{n:>8} {t_py * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms "
              f"{t_py / t_cy:>8.2f}x  {same}")
        if not same:
            raise SystemExit("backends disagree bitwise")


if __name__ == "__main__":
    sizes = [int(s) for s in sys.argv[1:]] or [64, 512, 4096, 32768]
    main(sizes)
