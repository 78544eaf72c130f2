#!/usr/bin/env python3
"""Time the numba kernels against their pure-numpy fallbacks.

Runs every hot kernel on a fixed seeded workload under both backends,
prints a table of wall times and speedups, and checks that the two sides
agree (exactly where the computations are identical, statistically where
the fallback uses a different but equivalent construction).

Usage: python benchmarks/bench_backends.py [--trials N] [--repeat K]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from noisyqr import _kernels as K
from noisyqr._backend import NUMBA_AVAILABLE


def _time(fn, *args, repeat: int) -> tuple[float, object]:
    best = math.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not NUMBA_AVAILABLE:
        print("numba is not importable; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    rows = []

    # norm tail counting: identical arithmetic up to reduction order
    y = 0.1 * rng.standard_normal((args.trials, 100))
    t_nb, c_nb = _time(K.norm_tail_count_numba, y, 1.0, 0.9, repeat=args.repeat)
    t_np, c_np = _time(K._norm_tail_count_numpy, y, 1.0, 0.9, repeat=args.repeat)
    rows.append(("norm_tail_count", t_nb, t_np, f"counts {c_nb} vs {c_np}"))
    assert abs(c_nb - c_np) <= 2, "norm tail counts diverged"

    # least squares trial statistic: same law, different complement choice
    ls_trials = max(args.trials // 5, 1000)
    a_block = rng.standard_normal((ls_trials, 30, 5))
    y_block = 0.05 * rng.standard_normal((ls_trials, 30))
    t_nb, c_nb = _time(K.ls_residual_count_numba, a_block, y_block, 1.0, 0.2, repeat=args.repeat)
    t_np, c_np = _time(K._ls_residual_count_numpy, a_block, y_block, 1.0, 0.2, repeat=args.repeat)
    pa, pb = c_nb / ls_trials, c_np / ls_trials
    se = math.sqrt(max(pa * (1 - pa), pb * (1 - pb), 1.0 / ls_trials) / ls_trials)
    rows.append(("ls_residual_count", t_nb, t_np, f"freq {pa:.4f} vs {pb:.4f}"))
    assert abs(pa - pb) <= 6 * se, "ls residual frequencies diverged"

    # noisy chain: identical arithmetic
    chain_trials = max(args.trials // 20, 200)
    v = rng.standard_normal((5, 100))
    v /= np.sqrt((v * v).sum(axis=1))[:, None]
    e = rng.standard_normal((chain_trials, 5, 100))
    t_nb, out_nb = _time(K.chain_batch_numba, v, e, 1e-3, repeat=args.repeat)
    t_np, out_np = _time(K._chain_batch_source, v, e, 1e-3, repeat=args.repeat)
    rows.append(("chain_batch", t_nb, t_np, f"max kappa {out_nb[0].max():.6f}"))
    assert np.allclose(out_nb[0], out_np[0], rtol=1e-12), "chain kappas diverged"

    # jacobi singular values: identical arithmetic
    mats = rng.standard_normal((200, 40, 8))
    rows_list = [np.ascontiguousarray(m.T) for m in mats]

    def run_all(fn):
        return [fn(r) for r in rows_list]

    t_nb, sv_nb = _time(run_all, K.jacobi_singular_values_numba, repeat=args.repeat)
    t_np, sv_np = _time(run_all, K._jacobi_singular_values_source, repeat=args.repeat)
    rows.append(("jacobi_singular_values x200", t_nb, t_np, ""))
    assert all(np.allclose(a, b, rtol=1e-12) for a, b in zip(sv_nb, sv_np))

    print(f"{'kernel':<30} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}  notes")
    for name, t_nb, t_np, note in rows:
        print(f"{name:<30} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x  {note}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
