"""Pieces common to the three Gibbs samplers.

Every sweep runs the marginal lambda-chain order
    tau2 (Metropolis) -> nu -> sigma2 -> beta -> lambda2
and draws each conditional from its own child RNG stream, so a change in one
block never shifts the random numbers consumed by another.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..distributions import (
    BetaConditional,
    RidgeTerm,
    beta_conditional,
    draw_from,
    log_tau2_conditional,
)
from ..errors import InvalidParameter
from ..model import ChainState, Dataset, PriorConfig

STREAMS = ("tau2", "nu", "sigma2", "beta", "lambda2")
LAMBDA2_FLOOR, LAMBDA2_CEIL = 1e-300, 1e300


@dataclass
class TauProposal:
    """Random-walk scale on s = log(tau2 - T) and its counters."""

    step_size: float = 1.0
    accept_count: int = 0
    reject_count: int = 0
    adapt: bool = False
    target_rate: float = 0.44
    n_adapt: int = 0

    def __post_init__(self):
        if not self.step_size > 0:
            raise InvalidParameter("step_size must be positive")

    @property
    def acceptance_rate(self) -> float:
        total = self.accept_count + self.reject_count
        return self.accept_count / total if total else float("nan")

    def record(self, accepted: bool, accept_prob: float) -> None:
        if accepted:
            self.accept_count += 1
        else:
            self.reject_count += 1
        if self.adapt:
            # Robbins-Monro on the log scale
            self.n_adapt += 1
            gain = self.n_adapt ** -0.6
            self.step_size *= math.exp(gain * (accept_prob - self.target_rate))
            self.step_size = min(max(self.step_size, 1e-4), 50.0)


@dataclass
class RejectionStats:
    proposals: int = 0
    draws: int = 0


@dataclass
class Kernel:
    """Variant-specific ingredients plugged into the generic sweep."""

    variant: str
    ridge: RidgeTerm
    lambda_step: Callable  # (nu, beta, sigma2, tau2, cfg, rng) -> (lambda2, proposals)
    log_c_fn: Optional[Callable] = None


def sample_nu(lambda2, rng: np.random.Generator) -> np.ndarray:
    """nu_j ~ IG(1, 1 + 1/lambda2_j), independently."""
    lambda2 = np.asarray(lambda2, dtype=float)
    if np.any(~(lambda2 > 0)):
        raise InvalidParameter("lambda2 must be positive")
    return (1.0 + 1.0 / lambda2) / rng.standard_exponential(lambda2.shape)


def lambda_rate(nu, beta, sigma2, tau2) -> np.ndarray:
    return 1.0 / nu + beta * beta / (2.0 * sigma2 * tau2)


def sample_lambda(nu, beta, sigma2, tau2, rng: np.random.Generator) -> np.ndarray:
    """lambda2_j ~ IG(1, 1/nu_j + beta_j^2/(2 sigma2 tau2)), independently.

    Draws are clipped to [1e-300, 1e300]; the clip is never active outside
    pathological states but keeps the chain inside floating range.
    """
    nu = np.asarray(nu, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(~(nu > 0)) or not (sigma2 > 0 and tau2 > 0):
        raise InvalidParameter("nu, sigma2 and tau2 must be positive")
    rate = lambda_rate(nu, beta, sigma2, tau2)
    out = rate / rng.standard_exponential(nu.shape)
    return np.clip(out, LAMBDA2_FLOOR, LAMBDA2_CEIL)


def _lambda_step_ig(nu, beta, sigma2, tau2, cfg, rng):
    return sample_lambda(nu, beta, sigma2, tau2, rng), nu.size


def mh_accept_prob(log_target_from: float, log_target_to: float,
                   s_from: float, s_to: float) -> float:
    """Acceptance probability for the log-scale random walk.

    The walk is symmetric in s = log(tau2 - T); the s-density carries the
    Jacobian exp(s), hence the (s_to - s_from) term.
    """
    log_r = log_target_to - log_target_from + (s_to - s_from)
    return 1.0 if log_r >= 0 else math.exp(log_r)


def _tau2_target(kernel: Kernel, tau2, lambda2, data: Dataset, y, cfg: PriorConfig):
    bc = beta_conditional(data.design, y, tau2, lambda2, kernel.ridge)
    lt = log_tau2_conditional(kernel.variant, tau2, lambda2, data.design, y, cfg,
                              log_c_fn=kernel.log_c_fn, bc=bc)
    return lt, bc


def mh_tau2(kernel: Kernel, state: ChainState, data: Dataset, y, cfg: PriorConfig,
            prop: TauProposal, rng: np.random.Generator):
    """One Metropolis update of tau2; returns (tau2, accepted, factorisation at tau2)."""
    T = cfg.T
    s = math.log(state.tau2 - T)
    lt_cur, bc_cur = _tau2_target(kernel, state.tau2, state.lambda2, data, y, cfg)
    s_new = s + prop.step_size * rng.standard_normal()
    log_u = math.log(rng.random())
    tau2_new = T + math.exp(s_new) if s_new < 700 else math.inf
    if not (math.isfinite(tau2_new) and tau2_new > T):
        prop.record(False, 0.0)
        return state.tau2, False, bc_cur
    lt_new, bc_new = _tau2_target(kernel, tau2_new, state.lambda2, data, y, cfg)
    acc = mh_accept_prob(lt_cur, lt_new, s, s_new)
    if acc > 0 and log_u < math.log(acc):
        prop.record(True, acc)
        return tau2_new, True, bc_new
    prop.record(False, acc)
    return state.tau2, False, bc_cur


def gibbs_step(kernel: Kernel, state: ChainState, data: Dataset, cfg: PriorConfig,
               prop: TauProposal, rng: np.random.Generator, *, y=None,
               trace: Optional[list] = None, rstats: Optional[RejectionStats] = None,
               sigma2_rate_offset: float = 0.0):
    """One sweep of the marginal lambda-chain.  Returns (new_state, tau2_accepted).

    ``sigma2_rate_offset`` deliberately corrupts the sigma2 conditional; it
    exists only so the correctness tests can demonstrate their power.
    """
    y = data.y if y is None else y
    r_tau, r_nu, r_sig, r_beta, r_lam = rng.spawn(len(STREAMS))
    n = data.n

    tau2, accepted, bc = mh_tau2(kernel, state, data, y, cfg, prop, r_tau)
    if trace is not None:
        trace.append("tau2")

    nu = sample_nu(state.lambda2, r_nu)
    if trace is not None:
        trace.append("nu")

    rate = 0.5 * bc.res + cfg.b + sigma2_rate_offset
    sigma2 = rate / r_sig.gamma(cfg.a + 0.5 * n)
    if trace is not None:
        trace.append("sigma2")

    beta = draw_from(bc, data.X, y, sigma2, r_beta)
    if trace is not None:
        trace.append("beta")

    lambda2, used = kernel.lambda_step(nu, beta, sigma2, tau2, cfg, r_lam)
    if rstats is not None:
        rstats.proposals += int(used)
        rstats.draws += nu.size
    if trace is not None:
        trace.append("lambda2")

    new = ChainState(beta=beta, sigma2=float(sigma2), tau2=float(tau2), lambda2=lambda2, nu=nu)
    return new, accepted


@dataclass
class ChainOutput:
    iters: np.ndarray
    beta: np.ndarray
    sigma2: np.ndarray
    tau2: np.ndarray
    lambda2: np.ndarray
    nu: np.ndarray
    accept_tau: np.ndarray
    tau_accept: int = 0
    tau_reject: int = 0
    lambda_proposals: int = 0
    lambda_draws: int = 0
    step_size: float = float("nan")
    provenance: list = field(default_factory=list)

    def __len__(self) -> int:
        return self.iters.size

    @property
    def acceptance_rate(self) -> float:
        total = self.tau_accept + self.tau_reject
        return self.tau_accept / total if total else float("nan")

    def state(self, k: int) -> ChainState:
        return ChainState(beta=self.beta[k].copy(), sigma2=float(self.sigma2[k]),
                          tau2=float(self.tau2[k]), lambda2=self.lambda2[k].copy(),
                          nu=self.nu[k].copy())


def merge(a: ChainOutput, b: ChainOutput) -> ChainOutput:
    """Concatenate stored draws and add counters (associative)."""
    cat = lambda u, v: np.concatenate([u, v], axis=0)
    return ChainOutput(
        iters=cat(a.iters, b.iters), beta=cat(a.beta, b.beta), sigma2=cat(a.sigma2, b.sigma2),
        tau2=cat(a.tau2, b.tau2), lambda2=cat(a.lambda2, b.lambda2), nu=cat(a.nu, b.nu),
        accept_tau=cat(a.accept_tau, b.accept_tau),
        tau_accept=a.tau_accept + b.tau_accept, tau_reject=a.tau_reject + b.tau_reject,
        lambda_proposals=a.lambda_proposals + b.lambda_proposals,
        lambda_draws=a.lambda_draws + b.lambda_draws,
        step_size=b.step_size, provenance=a.provenance + b.provenance,
    )


def run_kernel(kernel: Kernel, init: ChainState, iters: int, thin: int, data: Dataset,
               cfg: PriorConfig, rng: np.random.Generator, *, burnin: int = 0,
               prop: Optional[TauProposal] = None, store_init: bool = False,
               sigma2_rate_offset: float = 0.0) -> ChainOutput:
    """Run ``iters`` sweeps; the first ``burnin`` adapt the tau2 step and are not stored."""
    if iters < 1 or thin < 1 or burnin < 0:
        raise InvalidParameter("need iters >= 1, thin >= 1, burnin >= 0")
    prop = TauProposal() if prop is None else prop
    init.check(cfg.T)
    p = init.p
    kept = [] if not store_init else [(0, init, False)]
    rstats = RejectionStats()
    state = init
    counts_at_burnin = (prop.accept_count, prop.reject_count)
    for t in range(1, iters + 1):
        prop.adapt = t <= burnin
        state, acc = gibbs_step(kernel, state, data, cfg, prop, rng, rstats=rstats,
                                sigma2_rate_offset=sigma2_rate_offset)
        if t == burnin:
            counts_at_burnin = (prop.accept_count, prop.reject_count)
        if t > burnin and (t - burnin) % thin == 0:
            kept.append((t, state, acc))
    prop.adapt = False
    m = len(kept)
    out = ChainOutput(
        iters=np.array([k[0] for k in kept], dtype=int),
        beta=np.array([k[1].beta for k in kept]).reshape(m, p),
        sigma2=np.array([k[1].sigma2 for k in kept]),
        tau2=np.array([k[1].tau2 for k in kept]),
        lambda2=np.array([k[1].lambda2 for k in kept]).reshape(m, p),
        nu=np.array([k[1].nu for k in kept]).reshape(m, p),
        accept_tau=np.array([k[2] for k in kept], dtype=bool),
        tau_accept=prop.accept_count - counts_at_burnin[0],
        tau_reject=prop.reject_count - counts_at_burnin[1],
        lambda_proposals=rstats.proposals, lambda_draws=rstats.draws,
        step_size=prop.step_size,
    )
    seed_seq = getattr(rng.bit_generator, "seed_seq", None)
    if seed_seq is not None:
        out.provenance.append({"entropy": str(seed_seq.entropy),
                               "spawn_key": list(seed_seq.spawn_key)})
    return out
