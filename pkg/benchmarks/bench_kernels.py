"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--quick]

Each hot kernel is timed on both backends with identical inputs; integer
outputs are asserted equal along the way.
"""

import argparse
import time

import numpy as np

from permix import groups
from permix.kernels import fallback

try:
    from permix import _speedups as compiled
except ImportError:
    compiled = None


def timeit(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(name, make_args, runners, check=None):
    args = make_args()
    rows = []
    results = {}
    for label, impl in runners:
        if impl is None:
            continue
        t, out = timeit(lambda impl=impl: impl(*[a.copy() if isinstance(a, np.ndarray) and a.flags.writeable else a for a in args]))
        rows.append((label, t))
        results[label] = out
    line = f"{name:<34}"
    for label, t in rows:
        line += f"  {label}: {t * 1e3:9.2f} ms"
    if len(rows) == 2:
        line += f"  speedup: {rows[0][1] / rows[1][1]:6.1f}x"
    if check is not None and len(results) == 2:
        check(*results.values())
        line += "  [outputs agree]"
    print(line)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    opts = parser.parse_args()
    scale = 4 if opts.quick else 1

    if compiled is None:
        print("compiled kernels not built; timing the fallback only")
    pairs = [("fallback", fallback), ("compiled", compiled)]

    a6 = groups.enumerate_group(6, "even")
    rng = np.random.default_rng(0)
    X = groups.random_subset(a6, 0.5, rng)
    Y = groups.random_subset(a6, 0.5, rng)
    Z = groups.random_subset(a6, 0.5, rng)
    xi, yi = X.images(), Y.images()
    zc = a6.codes[Z.membership]

    bench(
        "count_triple (A_6, ~180^2 pairs x40)",
        lambda: (),
        [
            (label, (lambda impl: (lambda: [impl.count_triple(xi, yi, zc, a6.powers) for _ in range(40 // scale)]))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: None if a == b else (_ for _ in ()).throw(AssertionError),
    )

    s6 = groups.enumerate_group(6)
    bench(
        "build_mult_table (S_6, 720^2)",
        lambda: (),
        [
            (label, (lambda impl: (lambda: impl.build_mult_table(s6.images_table, s6.codes, s6.powers)))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: np.testing.assert_array_equal(a, b),
    )

    f = rng.random(s6.order)
    g = rng.random(s6.order)
    table = s6.mult_table
    inv = s6.inverse_ranks
    bench(
        "convolve_table (S_6 dense x10)",
        lambda: (),
        [
            (label, (lambda impl: (lambda: [impl.convolve_table(table, inv, f, g) for _ in range(10 // max(1, scale // 2))]))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: np.testing.assert_allclose(a[-1], b[-1], atol=1e-13),
    )

    n_mc = 300 if opts.quick else 600
    k_mc = 2000 if opts.quick else 8000
    u = rng.random((k_mc, n_mc - 1))
    base = np.tile(np.arange(n_mc, dtype=np.int32), (k_mc, 1))
    bench(
        f"fy_steps ({k_mc} perms of n={n_mc})",
        lambda: (),
        [
            (label, (lambda impl: (lambda: impl.fy_steps(base.copy(), u, 0)))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: np.testing.assert_array_equal(a, b),
    )

    imgs = base[:1000].astype(np.int16)
    bench(
        "parity_batch (1000 rows)",
        lambda: (),
        [
            (label, (lambda impl: (lambda: impl.parity_batch(imgs)))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: np.testing.assert_array_equal(a, b),
    )

    n_perm = 12 if opts.quick else 16
    M = rng.normal(size=(n_perm, n_perm))
    bench(
        f"ryser_permanent (n={n_perm})",
        lambda: (),
        [
            (label, (lambda impl: (lambda: impl.ryser_permanent(M)))(impl))
            for label, impl in pairs
            if impl
        ],
        check=lambda a, b: np.testing.assert_allclose(a, b, rtol=1e-9),
    )

    print("\nend-to-end Monte Carlo (both backends, identical streams):")
    for label in ("fallback", "compiled") if compiled else ("fallback",):
        import os
        import subprocess
        import sys

        code = (
            "from permix import constructions as C, mixing as M;"
            "kp = C.KedlayaParams(200, tuple(range(1, 11)), 0);"
            "import time; t0 = time.perf_counter();"
            "r = M.kedlaya_monte_carlo(kp, 50000, seed=1);"
            "print(f'{time.perf_counter() - t0:.2f}s hits={r.hits}')"
        )
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env=dict(os.environ, PERMIX_BACKEND=label),
        )
        print(f"  kedlaya MC n=200 50k samples [{label}]: {out.stdout.strip()}")


if __name__ == "__main__":
    main()
