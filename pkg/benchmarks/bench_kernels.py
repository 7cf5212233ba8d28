"""Timing comparison of the compiled kernels against the numpy fallback.

Run from the repo root after an editable install:

    python benchmarks/bench_kernels.py

Each kernel is timed on the same random inputs with both backends, and the
outputs are cross-checked before timings are reported.
"""

import time

import numpy as np

from noisereg import _kernels_py

try:
    from noisereg import _kernels_cy
except ImportError:
    _kernels_cy = None


def _time(fn, repeats=5):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_simplex(rng, p=25):
    # a Dantzig-shaped LP: 4p rows, 3p columns after the beta split
    n = 4 * p
    X = rng.standard_normal((60, p))
    y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.3)) \
        + 0.1 * rng.standard_normal(60)
    G = X.T @ X
    g = X.T @ y
    band = 0.5 * np.abs(g).max() * np.ones(p)
    I = np.eye(p)
    Z = np.zeros((p, p))
    A_ab = np.vstack([
        np.hstack([-I, I]), np.hstack([-I, -I]),
        np.hstack([Z, G]), np.hstack([Z, -G]),
    ])
    A = np.hstack([A_ab[:, :p], A_ab[:, p:], -A_ab[:, p:]])
    b = np.concatenate([np.zeros(2 * p), g + band, band - g])
    c = np.concatenate([np.ones(p), np.zeros(2 * p)])
    return ("simplex_solve (m=%d, n=%d)" % A.shape,
            lambda k: k.simplex_solve(A, b, c),
            lambda out_a, out_b: np.allclose(out_a[1], out_b[1], rtol=1e-8))


def bench_cd(rng, n=400, p=80):
    X = rng.standard_normal((n, p))
    y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.2)) \
        + 0.3 * rng.standard_normal(n)
    lam = 0.05 * np.abs(X.T @ y).max()
    return ("cd_lasso (n=%d, p=%d)" % (n, p),
            lambda k: k.cd_lasso(X, y, lam),
            lambda a, b: np.allclose(a[0], b[0], atol=1e-8))


def bench_fs(rng, n=300, p=60, steps=4000):
    X = rng.standard_normal((n, p))
    y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.2)) \
        + 0.3 * rng.standard_normal(n)
    gamma = 1e-3 * np.abs(X.T @ y).max() / n
    return ("fs_loop (n=%d, p=%d, %d steps)" % (n, p, steps),
            lambda k: k.fs_loop(X, y, gamma, steps, 1e-4),
            lambda a, b: np.allclose(a[2], b[2], rtol=1e-8))


def main():
    if _kernels_cy is None:
        print("compiled extension not available; nothing to compare")
        return
    rng = np.random.default_rng(20240817)
    for make in (bench_simplex, bench_cd, bench_fs):
        name, run, check = make(rng)
        t_py, out_py = _time(lambda: run(_kernels_py))
        t_cy, out_cy = _time(lambda: run(_kernels_cy))
        assert check(out_py, out_cy), f"backend outputs disagree for {name}"
        print(f"{name:42s}  python {t_py * 1e3:9.2f} ms"
              f"  cython {t_cy * 1e3:9.2f} ms  speedup {t_py / t_cy:6.1f}x")
    print("note: fs_loop always dispatches to the BLAS-backed numpy "
          "implementation (see noisereg/_backend.py)")


if __name__ == "__main__":
    main()
