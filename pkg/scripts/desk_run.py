"""Desk-scale run: n=50, p=100 simulated design, all three samplers, one chain each.

Prints wall-clock time and the relative movement of the cumulative beta'beta
average over the last 20% of stored draws; optionally saves the curves.
"""
import argparse
import csv
import time

import numpy as np

from hsgibbs.cli import run_chains
from hsgibbs.config import RunConfig
from hsgibbs.diagnostics import cumulative_average
from hsgibbs.simulate import simulate_data

PRIORS = {
    "horseshoe": {},
    "regularized": {"c": 1.0},
    "nishimura": {"c": 1.0, "tau_family": "truncated-half-cauchy", "tau_T": 0.1},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--p", type=int, default=100)
    ap.add_argument("--iters", type=int, default=2500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--curves", help="write cumulative-average curves to this CSV")
    args = ap.parse_args()

    data = simulate_data(args.n, args.p, args.seed)
    curves = {}
    for name, extra in PRIORS.items():
        cfg = RunConfig(sampler=name, n=args.n, p=args.p, iters=args.iters, seed=args.seed,
                        **extra)
        t0 = time.perf_counter()
        out = run_chains(cfg, data)[0]
        secs = time.perf_counter() - t0
        ca = cumulative_average(np.sum(out.beta**2, axis=1))
        k = int(0.8 * ca.size) - 1
        change = np.max(np.abs(ca[k:] - ca[k])) / abs(ca[k])
        curves[name] = ca
        print(f"{name:12s} {secs:6.1f} s  final beta'beta avg {ca[-1]:9.3f}  "
              f"last-20% change {100 * change:.3f}%")
    if args.curves:
        with open(args.curves, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["draw"] + list(curves))
            for i in range(len(next(iter(curves.values())))):
                w.writerow([i + 1] + [f"{c[i]:.6g}" for c in curves.values()])


if __name__ == "__main__":
    main()
