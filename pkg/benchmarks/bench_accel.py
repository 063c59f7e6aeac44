"""Timing comparison of the compiled kernels against the numpy fallback.

Run as:

    python benchmarks/bench_accel.py

The accelerated path is selected automatically when numba is importable
and SATETT_NO_NUMBA is unset; this script times both implementations
directly so no environment juggling is needed.
"""

import time

import numpy as np

from satett._accel import numpy_impl

try:
    from satett._accel import numba_impl
except ImportError:
    numba_impl = None


def _time(fn, *args, repeats=5):
    fn(*args)  # warm-up (includes JIT compilation for the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_qp(rng, n=400):
    A = rng.standard_normal((n, n))
    Q = A @ A.T / n + 0.1 * np.eye(n)
    c = rng.standard_normal(n)
    x0 = np.zeros(n)
    L = np.linalg.eigvalsh(Q)[-1]
    args = (Q, c, x0, 1.0 / (2.0 * L), 1e-8, 20000)
    return args


def bench_pav(rng, n=200000):
    values = rng.standard_normal(n).cumsum() + rng.standard_normal(n)
    weights = np.ones(n)
    return values, weights


def bench_scan(rng, n=100000):
    x = np.sort(rng.standard_normal(n))
    y = rng.standard_normal(n)
    return x, y, 5


def main():
    rng = np.random.Generator(np.random.Philox(key=42))
    cases = [
        ("apg_qp 400x400", "apg_qp", bench_qp(rng)),
        ("pav n=200k", "pav", bench_pav(rng)),
        ("scan_split n=100k", "scan_split", bench_scan(rng)),
    ]
    print(f"{'kernel':<22}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    for label, name, args in cases:
        t_np = _time(getattr(numpy_impl, name), *args)
        if numba_impl is None:
            print(f"{label:<22}{t_np:>12.5f}{'n/a':>12}{'n/a':>10}")
            continue
        t_nb = _time(getattr(numba_impl, name), *args)
        print(f"{label:<22}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
