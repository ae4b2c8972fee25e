"""Regularized horseshoe Gibbs sampler with a rejection step for lambda2.

The lambda2_j conditional is proportional to
    phi(x) = (c^-2 + 1/(tau2 x))^(1/2) x^(-3/2) exp(-R/x),
    R = 1/nu + beta^2/(2 sigma2 tau2).
Since sqrt(c^-2 + 1/(tau2 x)) <= |c|^-1 + tau^-1 x^(-1/2),
    phi(x) <= |c|^-1 (sqrt(pi)/sqrt(R)) IG(x; 1/2, R) + tau^-1 (1/R) IG(x; 1, R)
           <= M psi(x),
with psi = w1 IG(1/2, R) + w2 IG(1, R), w1 = |c|^-1/(|c|^-1 + tau^-1),
w2 = 1 - w1 and M = (|c|^-1 + tau^-1)(sqrt(pi)/sqrt(R) + 1/R).
The weights sum to one by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..distributions import RidgeTerm
from ..errors import EnvelopeViolation, InvalidParameter, RejectionCapExceeded
from ..model import ChainState, Dataset, PriorConfig
from .base import (
    LAMBDA2_CEIL,
    LAMBDA2_FLOOR,
    Kernel,
    RejectionStats,
    TauProposal,
    gibbs_step,
    lambda_rate,
    mh_tau2,
    run_kernel,
)

VARIANT = "regularized"
MAX_PROPOSALS = 10**6
RATIO_TOL = 1e-12
HALF_LOG_PI = 0.5 * math.log(math.pi)
# switch a coordinate to the matched-weight envelope once the fixed-weight M is this much larger
MATCHED_SWITCH = math.log(32.0)


def _inv_c(c) -> float:
    return 0.0 if math.isinf(c) else 1.0 / abs(c)


def target_lambda_logdensity(x, nu, beta, sigma2, tau2, c):
    """log phi(x), unnormalised."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise InvalidParameter("x must be positive")
    if not (nu > 0 and sigma2 > 0 and tau2 > 0 and c > 0):
        raise InvalidParameter("nu, sigma2, tau2, c must be positive")
    R = lambda_rate(nu, beta, sigma2, tau2)
    lx = np.log(x)
    log_r = -math.inf if math.isinf(c) else -2.0 * math.log(c)
    out = 0.5 * np.logaddexp(log_r, -math.log(tau2) - lx) - 1.5 * lx - R / x
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class EnvelopeSpec:
    """psi = mix_weight IG(1/2, R) + (1 - mix_weight) IG(1, R), bound M."""

    mix_weight: float
    R: float
    M: float
    log_M: float
    log_w1: float
    log_w2: float
    ig_a: tuple = (0.5, None)
    ig_b: tuple = (1.0, None)

    def log_psi(self, x):
        lx = np.log(np.asarray(x, dtype=float))
        return _log_psi(lx, self.log_w1, self.log_w2, self.R, self.R / np.asarray(x, dtype=float))

    def sample(self, rng: np.random.Generator, size=None):
        comp = rng.random(size) < self.mix_weight
        z = rng.standard_normal(size)
        e = rng.standard_exponential(size)
        return np.where(comp, 2.0 * self.R / (z * z), self.R / e)


def _log_psi(lx, log_w1, log_w2, R, R_over_x):
    logR = np.log(R)
    a = log_w1 + 0.5 * logR - HALF_LOG_PI - 1.5 * lx - R_over_x
    b = log_w2 + logR - 2.0 * lx - R_over_x
    return np.logaddexp(a, b)


def _envelope_params(R, tau2, c):
    R = np.asarray(R, dtype=float)
    ic, it = _inv_c(c), 1.0 / math.sqrt(tau2)
    s = ic + it
    log_w1 = math.log(ic / s) if ic > 0 else -math.inf
    log_w2 = math.log(it / s)
    logR = np.log(R)
    log_M = math.log(s) + np.logaddexp(HALF_LOG_PI - 0.5 * logR, -logR)
    return log_w1, log_w2, log_M


def _matched_params(R, tau2, c):
    """Weights proportional to each component's mass; M' = a sqrt(pi/R) + b/R <= M."""
    logR = np.log(np.asarray(R, dtype=float))
    ic, it = _inv_c(c), 1.0 / math.sqrt(tau2)
    la = (math.log(ic) if ic > 0 else -math.inf) + HALF_LOG_PI - 0.5 * logR
    lb = math.log(it) - logR
    log_M = np.logaddexp(la, lb)
    return la - log_M, lb - log_M, log_M


def build_envelope(nu, beta, sigma2, tau2, c) -> EnvelopeSpec:
    if not (nu > 0 and sigma2 > 0 and tau2 > 0 and c > 0):
        raise InvalidParameter("nu, sigma2, tau2, c must be positive")
    R = float(lambda_rate(nu, beta, sigma2, tau2))
    if not (R > 0 and math.isfinite(R)):
        raise InvalidParameter(f"rate R={R} must be positive and finite")
    log_w1, log_w2, log_M = _envelope_params(R, tau2, c)
    log_M = float(log_M)
    return EnvelopeSpec(mix_weight=math.exp(log_w1), R=R, M=math.exp(log_M), log_M=log_M,
                        log_w1=log_w1, log_w2=log_w2, ig_a=(0.5, R), ig_b=(1.0, R))


def _log_accept_ratio(lx, R, tau2, c, log_w1, log_w2, log_M):
    """log phi/(M psi); the common exp(-R/x) factor cancels exactly."""
    log_r = -math.inf if math.isinf(c) else -2.0 * math.log(c)
    log_phi = 0.5 * np.logaddexp(log_r, -math.log(tau2) - lx) - 1.5 * lx
    logR = np.log(R)
    log_psi = np.logaddexp(log_w1 + 0.5 * logR - HALF_LOG_PI - 1.5 * lx,
                           log_w2 + logR - 2.0 * lx)
    return log_phi - log_M - log_psi


def rejection_sample_lambda(nu, beta, sigma2, tau2, c, rng: np.random.Generator,
                            max_proposals: int = MAX_PROPOSALS):
    """Exact draws of every lambda2_j; returns (lambda2, proposals per coordinate)."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    R = lambda_rate(nu, beta, sigma2, tau2)
    if np.any(~(R > 0)) or np.any(~np.isfinite(R)):
        raise InvalidParameter("rate R must be positive and finite")
    log_w1, log_w2, log_M = _envelope_params(R, tau2, c)
    p = R.size
    log_w1 = np.full(p, log_w1)
    log_w2 = np.full(p, log_w2)
    log_M = np.broadcast_to(log_M, (p,)).copy()
    # tiny or huge R: the fixed weights accept ~sqrt(R) or ~1/sqrt(R) of proposals
    mw1, mw2, mM = _matched_params(R, tau2, c)
    sw = log_M - mM > MATCHED_SWITCH
    log_w1[sw], log_w2[sw], log_M[sw] = mw1[sw], mw2[sw], mM[sw]
    w1 = np.exp(log_w1)
    out = np.empty(p)
    used = np.zeros(p, dtype=np.int64)
    pending = np.arange(p)
    while pending.size:
        k = pending.size
        Rk = R[pending]
        comp = rng.random(k) < w1[pending]
        z = rng.standard_normal(k)
        e = rng.standard_exponential(k)
        u = rng.random(k)
        # log x for x = 2R/z^2 (IG(1/2, R)) or x = R/e (IG(1, R))
        lx = np.where(comp, np.log(2.0 * Rk) - 2.0 * np.log(np.abs(z)), np.log(Rk) - np.log(e))
        lr = _log_accept_ratio(lx, Rk, tau2, c, log_w1[pending], log_w2[pending],
                               log_M[pending])
        if np.any(lr > math.log1p(RATIO_TOL)):
            bad = float(np.max(lr))
            raise EnvelopeViolation(f"phi/(M psi) = {math.exp(bad)!r} exceeds 1")
        used[pending] += 1
        ok = np.log(u) <= lr
        out[pending[ok]] = np.exp(lx[ok])
        pending = pending[~ok]
        if pending.size and np.any(used[pending] >= max_proposals):
            raise RejectionCapExceeded(f"more than {max_proposals} proposals for one draw")
    return np.clip(out, LAMBDA2_FLOOR, LAMBDA2_CEIL), used


def rejection_sample_lambda_j(nu, beta, sigma2, tau2, c, rng: np.random.Generator):
    """Single coordinate; returns (lambda2_j, proposals_used)."""
    x, used = rejection_sample_lambda([nu], [beta], sigma2, tau2, c, rng)
    return float(x[0]), int(used[0])


def _lambda_step_rejection(nu, beta, sigma2, tau2, cfg, rng):
    lam, used = rejection_sample_lambda(nu, beta, sigma2, tau2, cfg.c, rng)
    return lam, int(used.sum())


def kernel(cfg: PriorConfig) -> Kernel:
    return Kernel(VARIANT, RidgeTerm.from_c(cfg.c), _lambda_step_rejection)


def metropolis_tau2(state: ChainState, data: Dataset, cfg: PriorConfig,
                    prop: TauProposal, rng: np.random.Generator):
    tau2, accepted, _ = mh_tau2(kernel(cfg), state, data, data.y, cfg, prop, rng)
    return tau2, accepted


def step(state: ChainState, data: Dataset, cfg: PriorConfig, prop: TauProposal,
         rng: np.random.Generator, *, trace: Optional[list] = None,
         rstats: Optional[RejectionStats] = None, y=None,
         sigma2_rate_offset: float = 0.0) -> ChainState:
    new, _ = gibbs_step(kernel(cfg), state, data, cfg, prop, rng, y=y, trace=trace,
                        rstats=rstats, sigma2_rate_offset=sigma2_rate_offset)
    return new


def run_chain(init: ChainState, iters: int, thin: int, data: Dataset, cfg: PriorConfig,
              rng: np.random.Generator, **kw):
    return run_kernel(kernel(cfg), init, iters, thin, data, cfg, rng, **kw)
