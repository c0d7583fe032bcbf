"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from sppca import _kernels
from sppca.rng import SeededRNG


def rng_fill(backend, kind, n):
    g = SeededRNG(1, backend=backend)
    if kind == "normal":
        return lambda: g.standard_normal(n)
    return lambda: g.random(n)


def jacobi(backend, d):
    b = np.random.default_rng(0).normal(size=(d, d))
    a = np.ascontiguousarray(b + b.T)
    tol = 1e-12 * np.linalg.norm(a)
    return lambda: backend.jacobi_eigh(a.copy(), tol, 100)


CASES = [
    ("uniform fill, 100k", lambda be: rng_fill(be, "uniform", 100_000)),
    ("normal fill, 100k", lambda be: rng_fill(be, "normal", 100_000)),
    ("jacobi 20x20", lambda be: jacobi(be, 20)),
    ("jacobi 60x60", lambda be: jacobi(be, 60)),
]


def best_of(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = _kernels.compiled_backend
    if compiled is None:
        print("compiled extension not available; only the fallback can be timed")
    print(f"{'case':<22}{'cython (ms)':>14}{'python (ms)':>14}{'speedup':>10}")
    for name, make in CASES:
        py = best_of(make(_kernels.python_backend), args.repeat) * 1e3
        if compiled is None:
            print(f"{name:<22}{'-':>14}{py:>14.3f}{'-':>10}")
            continue
        cy = best_of(make(compiled), args.repeat) * 1e3
        print(f"{name:<22}{cy:>14.3f}{py:>14.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
