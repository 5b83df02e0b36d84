"""Compare the compiled kernels with the numpy fallback.

Reports nanoseconds per draw for ``fill_draws`` and per summand for
``mc_accumulate``, plus the largest relative difference between backends.

    python benchmarks/bench_backends.py --count 2000000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fatkappa import backend
from fatkappa.distributions import (
    Exponential, Gamma, Gaussian, GaussianMeanMix, GaussianVarianceMix, Lognormal, Pareto,
    Stable, StudentT,
)
from fatkappa.rng import bit_generator

SPECS = [
    Gaussian(0.0, 1.0), StudentT(3.0, 1.0), Pareto(2.0, 1.0), Exponential(1.0), Gamma(2.5, 1.0),
    Lognormal(0.0, 1.0), Stable(1.5, 0.5, 0.0, 1.0), GaussianVarianceMix(1.0, 1.0, 0.1),
    GaussianMeanMix(0.0, 5.0, 1.0, 1.0),
]


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(count: int, reps: int, n: int, repeat: int) -> list[dict]:
    if backend.compiled is None:
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    cps = np.array([1, n], dtype=np.int64)
    rows = []
    for spec in SPECS:
        code, params = spec.kernel_params()
        row = {"spec": spec.label()}
        draws = {}
        for name in ("cython", "python"):
            mod = backend.get(name)
            draws[name] = mod.fill_draws(bit_generator(1, 0), code, params, count)
            row[f"draw_ns_{name}"] = 1e9 * _best(
                lambda: mod.fill_draws(bit_generator(1, 0), code, params, count), repeat) / count

            def acc():
                plain, cv = np.zeros(2), np.zeros(2)
                mod.mc_accumulate(bit_generator(1, 0), code, params, spec.mean(), reps, cps,
                                  False, plain, cv)
            row[f"accumulate_ns_{name}"] = 1e9 * _best(acc, repeat) / (reps * n)
        row["speedup_draw"] = row["draw_ns_python"] / row["draw_ns_cython"]
        row["speedup_accumulate"] = row["accumulate_ns_python"] / row["accumulate_ns_cython"]
        a, b = draws["cython"], draws["python"]
        row["max_rel_diff"] = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        rows.append(row)
    return rows


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=1_000_000, help="draws per fill_draws call")
    p.add_argument("--reps", type=int, default=20_000, help="replicates per mc_accumulate call")
    p.add_argument("--n", type=int, default=50, help="summands per replicate")
    p.add_argument("--repeat", type=int, default=3, help="timing repeats (best is kept)")
    args = p.parse_args(argv)
    rows = bench(args.count, args.reps, args.n, args.repeat)
    head = f"{'spec':<48}{'draw cy':>9}{'draw py':>9}{'x':>6}{'acc cy':>9}{'acc py':>9}{'x':>6}{'max rel':>10}"
    print(head)
    for r in rows:
        print(f"{r['spec']:<48}{r['draw_ns_cython']:9.1f}{r['draw_ns_python']:9.1f}"
              f"{r['speedup_draw']:6.1f}{r['accumulate_ns_cython']:9.1f}"
              f"{r['accumulate_ns_python']:9.1f}{r['speedup_accumulate']:6.1f}{r['max_rel_diff']:10.1e}")
    print("times in ns per draw (fill) and per summand (accumulate)")


if __name__ == "__main__":
    main()
