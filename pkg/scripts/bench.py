"""Wall-clock comparison of the samplers across problem sizes (one chain, fixed iterations)."""
import argparse
import time

import numpy as np

from hsgibbs.cli import make_data, run_chains
from hsgibbs.config import RunConfig

EXTRA = {"horseshoe": {}, "regularized": {"c": 1.0},
         "nishimura": {"c": 1.0, "tau_family": "truncated-half-cauchy", "tau_T": 0.1}}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", default=["50x100", "100x200", "100x1000"],
                    help="n x p pairs")
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    print("n,p," + ",".join(EXTRA))
    for size in args.sizes:
        n, p = map(int, size.lower().split("x"))
        times = {s: [] for s in EXTRA}
        for r in range(args.reps):
            data = make_data(n, p, r)
            for s, extra in EXTRA.items():
                cfg = RunConfig(sampler=s, n=n, p=p, iters=args.iters,
                                burnin=min(500, args.iters // 5), seed=r, **extra)
                t0 = time.perf_counter()
                run_chains(cfg, data)
                times[s].append(time.perf_counter() - t0)
        print(f"{n},{p}," + ",".join(f"{np.median(v):.2f}" for v in times.values()))


if __name__ == "__main__":
    main()
