"""Command-line entry point: ``hs simulate | run | lab | bench``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig, dump_config, load_config
from .diagnostics import batch_means_mcse, cumulative_average, ess
from .errors import HorseshoeError
from .model import Dataset, init_chain_state, read_dataset_csv, validate_dataset, write_dataset_csv
from .samplers import SAMPLERS, get_sampler
from .samplers.base import ChainOutput, TauProposal
from .simulate import N_SIGNALS, simulate_data

LAB_COMMANDS = ("interval", "constants", "drift-check", "minorization", "matrix-suite",
                "geweke", "moment-bounds")


# ------------------------------------------------------------------ helpers

def chain_rng(seed: int, k: int) -> np.random.Generator:
    """Stream for chain k: depends on (seed, k) only, never on the number of chains."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def make_data(n: int, p: int, seed: int) -> Dataset:
    """The simulation design when n, p >= 20; otherwise a plain Gaussian design for small checks."""
    if n >= N_SIGNALS and p >= N_SIGNALS:
        return simulate_data(n, p, seed)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X @ rng.standard_normal(p) + 0.1 * rng.standard_normal(n)
    return validate_dataset(y, X)


def _data_for(cfg: RunConfig) -> Dataset:
    return read_dataset_csv(cfg.data) if cfg.data else make_data(cfg.n, cfg.p, cfg.seed)


def _fmt(x) -> str:
    return repr(float(x))


def chain_header(p: int) -> list:
    return (["iter", "sigma2", "tau2", "accept_tau"] + [f"beta_{j}" for j in range(1, p + 1)]
            + [f"lambda2_{j}" for j in range(1, p + 1)] + [f"nu_{j}" for j in range(1, p + 1)])


def write_chain_csv(path, out: ChainOutput) -> None:
    p = out.beta.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(chain_header(p))
        for k in range(len(out)):
            w.writerow([str(int(out.iters[k])), _fmt(out.sigma2[k]), _fmt(out.tau2[k]),
                        str(int(out.accept_tau[k]))]
                       + [_fmt(v) for v in out.beta[k]] + [_fmt(v) for v in out.lambda2[k]]
                       + [_fmt(v) for v in out.nu[k]])


def _run_one(args):
    cfg, y, X, k = args
    data = validate_dataset(y, X)
    prior = cfg.prior
    rng = chain_rng(cfg.seed, k)
    r_init, r_run = rng.spawn(2)
    init = init_chain_state(prior, data.p, r_init)
    mod = get_sampler(cfg.sampler)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return mod.run_chain(init, cfg.iters, cfg.thin, data, prior, r_run, burnin=cfg.burnin,
                             prop=TauProposal(step_size=cfg.step_size))


def run_chains(cfg: RunConfig, data: Dataset, parallel: bool = True) -> list:
    jobs = [(cfg, np.array(data.y), np.array(data.X), k) for k in range(cfg.chains)]
    if cfg.chains == 1 or not parallel:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(cfg.chains, 8)) as ex:
        return list(ex.map(_run_one, jobs))  # map keeps chain order


def _series_summary(x) -> dict:
    x = np.asarray(x, dtype=float)
    if x.size >= 100:
        mean, se = batch_means_mcse(x)
        return {"mean": mean, "mcse": se, "ess": ess(x)}
    return {"mean": float(x.mean()), "mcse": None, "ess": None}


def summarize(outs: list) -> dict:
    chains = []
    for o in outs:
        btb = np.sum(o.beta**2, axis=1)
        chains.append({
            "draws": len(o),
            "tau2_acceptance": o.acceptance_rate,
            "final_step_size": o.step_size,
            "lambda_proposals_per_draw": (o.lambda_proposals / o.lambda_draws
                                          if o.lambda_draws else None),
            "sigma2": _series_summary(o.sigma2),
            "tau2": _series_summary(o.tau2),
            "beta_t_beta": _series_summary(btb),
            "beta_mean": o.beta.mean(axis=0).tolist(),
            "beta_mcse": [batch_means_mcse(o.beta[:, j])[1] if len(o) >= 100 else None
                          for j in range(o.beta.shape[1])],
        })
    pooled = np.concatenate([np.sum(o.beta**2, axis=1) for o in outs])
    return {"chains": chains, "pooled_beta_t_beta_mean": float(pooled.mean())}


def write_cumavg_csv(path, outs: list) -> None:
    curves = [cumulative_average(np.sum(o.beta**2, axis=1)) for o in outs]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter"] + [f"chain_{k + 1}" for k in range(len(outs))])
        for i in range(len(curves[0])):
            w.writerow([str(int(outs[0].iters[i]))] + [_fmt(c[i]) for c in curves])


# ----------------------------------------------------------------- commands

def cmd_simulate(args) -> int:
    data = simulate_data(args.n, args.p, args.seed)
    write_dataset_csv(args.out, data)
    print(f"wrote {args.out} (n={data.n}, p={data.p})")
    return 0


def cmd_run(args, cfg: RunConfig) -> int:
    data = _data_for(cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outs = run_chains(cfg, data)
    elapsed = time.perf_counter() - t0
    for k, o in enumerate(outs, 1):
        write_chain_csv(out_dir / f"chain_{k}.csv", o)
    summary = summarize(outs)
    summary.update({"sampler": cfg.sampler, "n": data.n, "p": data.p, "seconds": elapsed,
                    "config": {k: (str(v) if isinstance(v, float) and not np.isfinite(v) else v)
                               for k, v in cfg.as_dict().items()}})
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    write_cumavg_csv(out_dir / "cumavg_btb.csv", outs)
    (out_dir / "config.txt").write_text(dump_config(cfg))
    print(f"{cfg.sampler}: {cfg.chains} chain(s), {cfg.iters} iterations, {elapsed:.1f} s -> {out_dir}")
    return 0


def cmd_lab(args, cfg: RunConfig) -> int:
    from .lab import report

    which = args.lab_command
    rng = np.random.default_rng(cfg.seed)
    if which == "interval":
        from .lab.constants import admissible_interval, float64_breakdown, gamma_d1_roots

        lo, hi = admissible_interval()
        res = {"interval": [lo, hi], "gamma_d1_roots": gamma_d1_roots(),
               "float64_lower_crossing": float64_breakdown()}
        print(f"gamma_d1 < 1 on ({lo:.5f}, {hi:.5f}); float64 evaluation crosses 1 at "
              f"{res['float64_lower_crossing']:.5f}", file=sys.stderr)
    elif which == "constants":
        from .lab.constants import drift_constants

        res = drift_constants(cfg.prior, _data_for(cfg).design, args.variant,
                              stress_draws=args.stress_draws, rng=rng)
    elif which == "drift-check":
        from .lab.constants import DriftSpec, drift_constants
        from .lab.drift import empirical_drift_check, spread_starts

        data = _data_for(cfg)
        spec = (DriftSpec("V", cfg.delta0, cfg.delta1) if args.variant == "horseshoe"
                else DriftSpec("V_tilde", delta=cfg.delta))
        consts = drift_constants(cfg.prior, data.design, args.variant,
                                 stress_draws=args.stress_draws, rng=rng)
        starts = spread_starts(spec, data.p, args.starts)
        res = empirical_drift_check(args.variant, spec, starts, args.replicates, data,
                                    cfg.prior, rng, consts)
    elif which == "minorization":
        from .lab.minorization import minorization_constants

        data = _data_for(cfg)
        d = args.d if args.d else 2.0 * data.p
        res = minorization_constants(args.variant, d, cfg.prior, data.design)
    elif which == "matrix-suite":
        from .lab.matrix import matrix_bound_suite

        res = matrix_bound_suite(_data_for(cfg).design, args.trials, rng)
    elif which == "geweke":
        from .diagnostics import geweke_joint_test

        sampler = args.target or cfg.sampler
        g = geweke_joint_test(sampler, None, args.sweeps, rng)
        for name, z in g.rows():
            print(f"{name:>16s}  z={z:+7.3f}  {'pass' if abs(z) < 4 else 'FAIL'}", file=sys.stderr)
        res = {"sampler": sampler, "sweeps": args.sweeps, "passed": g.passed(),
               "z": dict(g.rows())}
    elif which == "moment-bounds":
        from .lab.moments import extreme_starts, tau2_moment_bound_check

        data = _data_for(cfg)
        res = tau2_moment_bound_check(args.variant, cfg.delta, args.epsilon, cfg.prior, data,
                                      extreme_starts(data.p, args.starts), rng, sign=args.sign,
                                      iters=args.mh_iters)
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(which)
    text = report.to_json(res)
    if args.json:
        Path(args.json).write_text(text)
    else:
        print(text)
    return 0


def cmd_bench(args, cfg: RunConfig) -> int:
    samplers = args.samplers
    rows = []
    for r in range(args.reps):
        data = make_data(cfg.n, cfg.p, cfg.seed + r)
        row = []
        for s in samplers:
            c = load_config(None, {**cfg.as_dict(), "sampler": s, "chains": 1})
            t0 = time.perf_counter()
            _run_one((c, np.array(data.y), np.array(data.X), 0))
            row.append(time.perf_counter() - t0)
        rows.append(row)
    lines = [",".join(samplers)] + [",".join(f"{t:.3f}" for t in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0


# ------------------------------------------------------------------- parser

def _add_run_flags(sp, with_sampler=True):
    if with_sampler:
        sp.add_argument("--sampler", choices=sorted(SAMPLERS))
    sp.add_argument("--config", help="key=value file; flags override it")
    sp.add_argument("--data", help="dataset CSV (header y,x1,...,xp)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--thin", type=int)
    sp.add_argument("--burnin", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--chains", type=int)
    sp.add_argument("--step-size", dest="step_size", type=float)
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--tau-family", dest="tau_family",
                    choices=["half-cauchy", "truncated-half-cauchy", "inverse-gamma"])
    sp.add_argument("--tau-T", dest="tau_T", type=float)
    sp.add_argument("--tau-scale", dest="tau_scale", type=float)
    sp.add_argument("--tau-shape", dest="tau_shape", type=float)
    sp.add_argument("--tau-rate", dest="tau_rate", type=float)
    sp.add_argument("--delta0", type=float)
    sp.add_argument("--delta1", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hs", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="write a synthetic regression dataset")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("run", help="run Gibbs chains and write chain/summary/cumulative CSVs")
    _add_run_flags(sp)

    sp = sub.add_parser("lab", help="drift/minorization constants and numeric checks")
    sp.add_argument("lab_command", choices=LAB_COMMANDS)
    sp.add_argument("target", nargs="?", choices=sorted(SAMPLERS),
                    help="sampler for the geweke command")
    sp.add_argument("--variant", default="horseshoe",
                    choices=["horseshoe", "regularized", "nishimura"])
    sp.add_argument("--stress-draws", dest="stress_draws", type=int, default=100_000)
    sp.add_argument("--replicates", type=int, default=2000)
    sp.add_argument("--starts", type=int, default=20)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--sweeps", type=int, default=50_000)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--sign", type=int, default=1, choices=[1, -1])
    sp.add_argument("--mh-iters", dest="mh_iters", type=int, default=4000)
    sp.add_argument("--json", help="write the report here instead of stdout")
    _add_run_flags(sp)

    sp = sub.add_parser("bench", help="wall-clock table, one column per sampler")
    sp.add_argument("--samplers", nargs="+", default=["horseshoe", "nishimura"],
                    choices=sorted(SAMPLERS))
    sp.add_argument("--reps", type=int, default=1)
    _add_run_flags(sp, with_sampler=False)
    return ap


_RUN_KEYS = ("sampler", "data", "n", "p", "iters", "thin", "burnin", "seed", "chains",
             "step_size", "a", "b", "c", "tau_family", "tau_T", "tau_scale", "tau_shape",
             "tau_rate", "delta0", "delta1", "delta", "out")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "simulate":
        try:
            return cmd_simulate(args)
        except (HorseshoeError, ValueError, OSError) as e:
            print(f"hs: error: {e}", file=sys.stderr)
            return 1
    overrides = {k: getattr(args, k, None) for k in _RUN_KEYS}
    try:
        cfg = load_config(args.config, overrides)
    except (HorseshoeError, ValueError, OSError, TypeError) as e:
        ap.error(f"bad configuration: {e}")  # exits with status 2
    try:
        if args.command == "run":
            return cmd_run(args, cfg)
        if args.command == "lab":
            return cmd_lab(args, cfg)
        return cmd_bench(args, cfg)
    except (HorseshoeError, ValueError, ArithmeticError, OSError) as e:
        print(f"hs: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
