"""Time the compiled stepping kernels against the numpy reference.

Runs the same seeded workloads through ``resband._kernels._fast`` and
``resband._kernels.pyref`` and reports wall time per backend, the speedup,
and whether the outputs are bit-identical (they must be: both backends
consume variates in the same order and evaluate every floating-point
expression with the same association).

Usage:
    python benchmarks/bench_kernels.py [--paths N] [--steps N] [--repeats N]
"""

import argparse
import math
import sys
import time

import numpy as np

from resband.model import ModelParams
from resband.montecarlo import MAX_EVENT_STEPS
from resband.simulate import (
    CROSS_NORMAL_BLOCK,
    GUARD_FRACTION,
    UNIFORM_BLOCK,
    normal_draw,
    path_rng,
    uniform_draw,
)
from resband._kernels import pyref

try:
    from resband._kernels import _fast
except ImportError:
    _fast = None


def run_conditioned(kernels, params, n_paths, n_steps, dt, seed):
    """One batch of band-conditioned paths; returns packed outputs."""
    guard = GUARD_FRACTION * params.epsilon
    x = np.empty((n_paths, n_steps + 1))
    db = np.empty((n_paths, n_steps))
    phase = np.empty((n_paths, n_steps + 1), dtype=np.int8)
    i0 = np.empty((n_paths, n_steps + 1), dtype=np.int32)
    rets = np.empty((n_paths, 3), dtype=np.int64)
    for j in range(n_paths):
        rng = path_rng(seed, j)
        rets[j] = kernels.simulate_conditioned(
            params.mu,
            params.alpha,
            params.epsilon,
            guard,
            dt,
            n_steps,
            2,
            64,
            0,
            normal_draw(rng),
            x[j],
            db[j],
            phase[j],
            i0[j],
        )
    return x, db, phase, i0, rets


def run_crossings(kernels, params, n_paths, dt, seed):
    """One batch of unconditioned crossing walks; returns the return tuples."""
    rets = np.empty((n_paths, 5), dtype=np.int64)
    empty_probes = (
        np.empty(0, dtype=np.int64),
        np.empty(0, dtype=float),
        np.empty(0, dtype=np.int32),
        np.empty(0, dtype=np.int8),
    )
    for j in range(n_paths):
        rng = path_rng(seed, j)
        rets[j] = kernels.simulate_crossings(
            params.mu,
            params.alpha,
            params.epsilon,
            dt,
            MAX_EVENT_STEPS,
            normal_draw(rng, CROSS_NORMAL_BLOCK),
            uniform_draw(rng, UNIFORM_BLOCK),
            *empty_probes,
        )
    return (rets,)


def best_time(fn, repeats):
    """Best-of-``repeats`` wall time and the outputs of the last run."""
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def identical(out_a, out_b):
    return all(np.array_equal(a, b) for a, b in zip(out_a, out_b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=100, help="paths per workload")
    ap.add_argument("--steps", type=int, default=10_000, help="grid steps per conditioned path")
    ap.add_argument("--dt", type=float, default=1e-3, help="grid spacing")
    ap.add_argument("--seed", type=int, default=0, help="base seed")
    ap.add_argument("--repeats", type=int, default=3, help="timed repeats, best kept")
    args = ap.parse_args(argv)

    if _fast is None:
        print("compiled backend not built; run pip install -e . first", file=sys.stderr)
        return 1

    params = ModelParams.from_log_band(mu0=0.1, sigma=0.15, r=0.02, alpha=1.0, epsilon=0.3)
    workloads = [
        (
            "simulate_conditioned",
            lambda k: run_conditioned(k, params, args.paths, args.steps, args.dt, args.seed),
        ),
        (
            "simulate_crossings",
            lambda k: run_crossings(k, params, args.paths, args.dt, args.seed),
        ),
    ]

    print(f"paths={args.paths} steps={args.steps} dt={args.dt} repeats={args.repeats}")
    print(f"{'kernel':<22} {'python (s)':>11} {'compiled (s)':>13} {'speedup':>8} {'identical':>10}")
    ok = True
    for name, work in workloads:
        t_py, out_py = best_time(lambda: work(pyref), args.repeats)
        t_c, out_c = best_time(lambda: work(_fast), args.repeats)
        same = identical(out_py, out_c)
        ok = ok and same
        print(f"{name:<22} {t_py:>11.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x {'yes' if same else 'NO':>10}")
    if not ok:
        print("backend outputs diverged", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
