"""Original horseshoe: two-block Gibbs sampler on (beta, sigma2, nu, tau2 | lambda) and lambda."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..distributions import RidgeTerm
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

VARIANT = "horseshoe"


def kernel(cfg: PriorConfig) -> Kernel:
    return Kernel(VARIANT, RidgeTerm(0.0), _lambda_step_ig)


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
