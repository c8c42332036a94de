"""Compare the compiled and pure-Python evaluation kernels.

Usage::

    python3 benchmarks/bench_kernels.py --points 20000 --repeat 5
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from polegamma import _backend
from polegamma.evaluator import GammaApproximation, eval_many
from polegamma.kernels import ReferenceOracle
from polegamma.schemes import RTarget, build_expansion, solve_r


def make_points(count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    re = rng.uniform(-50.0, 150.0, count)
    im = rng.uniform(-60.0, 60.0, count)
    return re + 1j * im


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    oracle = ReferenceOracle()
    r = solve_r("lanczos", args.n, RTarget.infinity(), oracle)
    approx = GammaApproximation.from_expansion(build_expansion("lanczos", args.n, r, oracle))
    zs = make_points(args.points, args.seed)

    results = {}
    for name in sorted(_backend.available):
        best = min(timeit.repeat(lambda: eval_many(approx, zs, backend=name), number=1, repeat=args.repeat))
        results[name] = best
        print(f"{name:>7}: {best * 1e3:9.2f} ms  ({best / args.points * 1e9:8.1f} ns/point)")
    if len(results) == 2:
        v_c, _, _ = eval_many(approx, zs, backend="cython")
        v_p, _, _ = eval_many(approx, zs, backend="python")
        ok = np.isfinite(v_c) & (v_c != 0)
        diff = np.max(np.abs(v_c[ok] / v_p[ok] - 1))
        print(f"speedup: {results['python'] / results['cython']:.1f}x, max rel difference {diff:.2e}")
    else:
        print("compiled kernel not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
