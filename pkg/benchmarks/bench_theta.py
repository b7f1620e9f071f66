#!/usr/bin/env python3
"""Benchmark: compiled vs pure-Python Mazur-Tate sum kernels.

The Riemann sum over (Z/p^(n+1))^* dominates end-to-end runtime; this times
both backends on the same inputs and checks they agree bit for bit.

Usage: python benchmarks/bench_theta.py [--p P] [--n N] [--curve "a1,..;N"]
"""

import argparse
import time

import numpy as np

from prpoint._kernels import backend_name, theta_branch_sums
from prpoint.elliptic import parse_curve
from prpoint.modsym import eigen_plus_symbol


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--curve", default="1,-1,1,0,0;53")
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--skip-pure-above", type=int, default=10 ** 6,
                    help="skip the pure backend when p^(n+1) exceeds this")
    args = ap.parse_args()

    curve, _ = parse_curve(args.curve)
    phi = eigen_plus_symbol(curve)
    m = args.p ** (args.n + 1)
    print(f"curve {curve.label()}, p = {args.p}, depth {args.n} "
          f"({m - m // args.p} unit evaluations)")
    print(f"compiled backend available: {backend_name() == 'cython'}")

    rows = []
    t0 = time.perf_counter()
    fast = theta_branch_sums(args.p, args.n, curve.conductor,
                             phi.space.p1.table, phi.numerators)
    t_fast = time.perf_counter() - t0
    rows.append((backend_name(), t_fast))

    if m <= args.skip_pure_above or backend_name() == "python":
        t0 = time.perf_counter()
        pure = theta_branch_sums(args.p, args.n, curve.conductor,
                                 phi.space.p1.table, phi.numerators,
                                 backend="python")
        t_pure = time.perf_counter() - t0
        rows.append(("python", t_pure))
        assert np.array_equal(fast, pure), "backends disagree"
        print("backends agree bit-for-bit")
    else:
        print("pure backend skipped (too large); rerun with --skip-pure-above")

    print(f"{'backend':<10} {'seconds':>10} {'evals/s':>14}")
    evals = m - m // args.p
    for name, t in rows:
        print(f"{name:<10} {t:>10.3f} {evals / t:>14.0f}")
    if len(rows) == 2:
        print(f"speedup: {rows[1][1] / rows[0][1]:.1f}x")


if __name__ == "__main__":
    main()
