"""Regularized variant whose local prior is tilted so the lambda2 step stays Inverse-Gamma.

The local prior becomes
    pi(lambda | tau2) = c(tau2) (1 + tau2 lambda^2 / c^2)^(-1/2) pi_ell(lambda),
with pi_ell the half-Cauchy(0, 1) density, so the tau2 conditional picks up
c(tau2)^p.  c(tau2) depends on (tau2, c) only through k = tau2 / c^2, so a
single cache over log k serves every c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from ..distributions import RidgeTerm
from ..errors import InvalidParameter, QuadratureFailure
from ..model import ChainState, Dataset, PriorConfig
from .base import (
    Kernel,
    RejectionStats,
    TauProposal,
    _lambda_step_ig,
    gibbs_step,
    mh_tau2,
    run_kernel,
)

VARIANT = "nishimura"
LOG_K_RANGE = (-40.0, 40.0)
KNOT_SPACING = 0.02


def half_cauchy_density(lam):
    return 2.0 / (math.pi * (1.0 + lam * lam))


def _inv_c_of_k(k: float) -> float:
    """1/c as (2/pi) * int_0^{pi/2} (1 + k tan^2 t)^(-1/2) dt (lambda = tan t)."""
    if k == 0.0:
        return 1.0
    # the integrand drops from 1 to ~0 around t ~ 1/sqrt(k); give quad that breakpoint
    brk = [min(math.atan(1.0 / math.sqrt(k)), 0.5 * math.pi * 0.999)]
    f = lambda t: 1.0 / math.sqrt(1.0 + k * math.tan(t) ** 2) if t < 0.5 * math.pi else 0.0
    val, err = integrate.quad(f, 0.0, 0.5 * math.pi, points=brk, epsabs=0.0,
                              epsrel=1e-12, limit=500)
    if not (val > 0 and math.isfinite(val)) or err > 1e-9 * val:
        raise QuadratureFailure(f"1/c(k={k}) quadrature: value {val}, error {err}")
    return 2.0 / math.pi * val


def normalizing_c(tau2: float, c: float, pi_ell=half_cauchy_density) -> float:
    """c(tau2) with 1/c(tau2) = int_0^inf (1 + tau2 lambda^2/c^2)^(-1/2) pi_ell(lambda) dlambda."""
    if not tau2 >= 0 or not c > 0:
        raise InvalidParameter("need tau2 >= 0 and c > 0")
    if pi_ell is not half_cauchy_density:
        raise InvalidParameter("only the half-Cauchy(0, 1) local prior is supported")
    if math.isinf(c):
        return 1.0
    return 1.0 / _inv_c_of_k(tau2 / c**2)


@dataclass(frozen=True)
class NormalizerCache:
    """log c(tau2) on a log-spaced knot grid, monotone cubic interpolation in log k."""

    c: float
    grid: np.ndarray  # tau2 knots
    values: np.ndarray  # log c at knots
    order: int = 3

    @property
    def _interp(self):
        return _interpolator_for_knots()

    def log_c(self, tau2):
        tau2 = np.asarray(tau2, dtype=float)
        if math.isinf(self.c):
            return np.zeros_like(tau2) if tau2.ndim else 0.0
        lk = np.log(tau2) - 2.0 * math.log(self.c)
        lo, hi = LOG_K_RANGE
        inside = (lk >= lo) & (lk <= hi)
        out = np.empty_like(lk)
        out[inside] = self._interp(lk[inside])
        for i in np.flatnonzero(~inside):
            k = math.exp(lk.flat[i])
            out.flat[i] = -math.log(_inv_c_of_k(k)) if k > 0 else 0.0
        return out if out.ndim else float(out)

    def __call__(self, tau2):
        return self.log_c(tau2)

    def c_tilde(self, upper_log_tau2: float = 60.0) -> float:
        """sup over tau2 of c(tau2)/sqrt(1 + tau2), on the knot grid plus a fine scan."""
        lt = np.linspace(-40.0, upper_log_tau2, 20001)
        vals = self.log_c(np.exp(lt)) - 0.5 * np.log1p(np.exp(lt))
        return float(np.exp(np.max(vals)))


@lru_cache(maxsize=1)
def _knots():
    lo, hi = LOG_K_RANGE
    lk = np.arange(lo, hi + 0.5 * KNOT_SPACING, KNOT_SPACING)
    vals = np.array([-math.log(_inv_c_of_k(math.exp(v))) for v in lk])
    return lk, vals


@lru_cache(maxsize=1)
def _interpolator_for_knots():
    lk, vals = _knots()
    return PchipInterpolator(lk, vals, extrapolate=False)


@lru_cache(maxsize=64)
def build_normalizer(c: float) -> NormalizerCache:
    lk, vals = _knots()
    if math.isinf(c):
        return NormalizerCache(c=c, grid=np.exp(lk), values=np.zeros_like(vals))
    return NormalizerCache(c=c, grid=np.exp(lk + 2.0 * math.log(c)), values=vals)


def sample_tilted_lambda2(tau2: float, c: float, rng: np.random.Generator, size) -> np.ndarray:
    """Prior draws of lambda2 given tau2: half-Cauchy lambda accepted w.p. (1 + k lambda^2)^(-1/2)."""
    k = 0.0 if math.isinf(c) else tau2 / c**2
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        t = np.tan(0.5 * np.pi * rng.random(pending.size))
        lam2 = t * t
        ok = rng.random(pending.size) * np.sqrt(1.0 + k * lam2) <= 1.0
        out[pending[ok]] = lam2[ok]
        pending = pending[~ok]
    return np.clip(out, 1e-300, 1e300)


def kernel(cfg: PriorConfig) -> Kernel:
    return Kernel(VARIANT, RidgeTerm.from_c(cfg.c), _lambda_step_ig,
                  log_c_fn=build_normalizer(cfg.c))


def hypothesis_warnings(cfg: PriorConfig, p: int) -> list:
    """Conditions under which the ergodicity guarantee is not established (sampler still runs)."""
    out = []
    if cfg.T <= 0:
        out.append("global prior is not truncated away from zero (T = 0)")
    if not cfg.tau_prior.moment_finite((p + cfg.delta) / 2):
        out.append(f"global prior lacks a finite {(p + cfg.delta) / 2:g}-moment")
    return out


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
    import warnings

    for msg in hypothesis_warnings(cfg, data.p):
        warnings.warn(msg, stacklevel=2)
    return run_kernel(kernel(cfg), init, iters, thin, data, cfg, rng, **kw)
