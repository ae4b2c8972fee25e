"""Output analysis: batch means, ESS, cumulative averages and the Geweke joint test."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, TooShort
from .model import ChainState, Dataset, PriorConfig, sample_half_cauchy_lambda2
from .samplers import get_sampler
from .samplers.base import TauProposal

MIN_LENGTH = 100


@dataclass(frozen=True)
class ScalarSeries:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise TooShort("series must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise NonFinite("series has non-finite values")
        object.__setattr__(self, "values", v)


def _values(series) -> np.ndarray:
    if isinstance(series, ScalarSeries):
        return series.values
    return ScalarSeries(np.asarray(series, dtype=float)).values


def batch_means_mcse(series):
    """(mean, se) with floor(sqrt(m)) batches of equal length.

    Leftover draws (m - batches * size) fall into the mean but not the batches.
    """
    x = _values(series)
    m = x.size
    if m < MIN_LENGTH:
        raise TooShort(f"need at least {MIN_LENGTH} values, got {m}")
    nb = math.isqrt(m)
    size = m // nb
    means = x[: nb * size].reshape(nb, size).mean(axis=1)
    se = float(np.std(means, ddof=1) / math.sqrt(nb))
    return float(np.mean(x)), se


def cumulative_average(series) -> np.ndarray:
    x = _values(series)
    return np.cumsum(x) / np.arange(1, x.size + 1)


def ess(series) -> float:
    """Effective sample size via Geyer's initial positive sequence, clipped to (0, m]."""
    x = _values(series)
    m = x.size
    if m < MIN_LENGTH:
        raise TooShort(f"need at least {MIN_LENGTH} values, got {m}")
    xc = x - x.mean()
    var0 = float(xc @ xc) / m
    if var0 == 0.0:
        return float(m)
    nfft = 1 << (2 * m - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:m] / m
    rho = acov / var0
    tau = -1.0
    for k in range(0, m - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    tau = max(tau, 1.0 / m)
    return float(min(m / tau, m))


# ---------------------------------------------------------------- Geweke test

@dataclass(frozen=True)
class GewekeConfig:
    """Small proper model for the joint-distribution test."""

    sampler: str = "horseshoe"
    n: int = 4
    p: int = 3
    prior: PriorConfig = field(default_factory=PriorConfig)
    design_seed: int = 2024
    design_scale: float = 0.5

    def design(self) -> np.ndarray:
        X = np.random.default_rng(self.design_seed).standard_normal((self.n, self.p))
        return self.design_scale * X


def default_geweke_config(sampler: str) -> GewekeConfig:
    from .model import GlobalPrior

    if sampler == "horseshoe":
        # a light-tailed global prior: with c = inf nothing bounds beta, and a
        # heavy-tailed tau2 lets the successive-conditional chain park in the tails
        prior = PriorConfig(a=2.0, b=1.0, tau_prior=GlobalPrior("inverse-gamma", shape=3.0, rate=1.0))
    elif sampler == "regularized":
        prior = PriorConfig(a=2.0, b=1.0, c=1.0, tau_prior=GlobalPrior("half-cauchy"))
    elif sampler == "nishimura":
        prior = PriorConfig(a=2.0, b=1.0, c=1.0, tau_prior=GlobalPrior("truncated-half-cauchy", T=0.5))
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return GewekeConfig(sampler=sampler, prior=prior)


def statistic_names(p: int) -> list:
    names = [f"atan(beta_{j + 1})" for j in range(p)]
    names += [f"log beta_{j + 1}^2" for j in range(p)]
    names += ["1/sigma2", "log tau2"]
    names += [f"log lambda2_{j + 1}" for j in range(p)]
    return names


def _stats(beta, sigma2, tau2, lambda2) -> np.ndarray:
    """Test functions with finite variance under every prior used here.

    Raw beta moments do not exist under half-Cauchy local scales, so beta enters
    through atan(beta) and log(beta^2).
    """
    return np.concatenate([np.arctan(beta), np.log(beta * beta), [1.0 / sigma2, math.log(tau2)],
                           np.log(lambda2)])


def draw_prior(gcfg: GewekeConfig, rng: np.random.Generator, X: np.ndarray):
    """One joint draw (state, y) from the prior and likelihood."""
    cfg = gcfg.prior
    p = gcfg.p
    tau2 = float(cfg.tau_prior.sample(rng))
    if gcfg.sampler == "nishimura":
        from .samplers.nishimura import sample_tilted_lambda2

        lambda2 = sample_tilted_lambda2(tau2, cfg.c, rng, p)
    else:
        lambda2 = sample_half_cauchy_lambda2(rng, p)
    nu = (1.0 + 1.0 / lambda2) / rng.standard_exponential(p)
    sigma2 = float(cfg.b / rng.gamma(cfg.a))
    ridge = 0.0 if gcfg.sampler == "horseshoe" else cfg.ridge
    prec = 1.0 / (tau2 * lambda2) + ridge
    beta = rng.standard_normal(p) * np.sqrt(sigma2 / prec)
    y = X @ beta + math.sqrt(sigma2) * rng.standard_normal(X.shape[0])
    return ChainState(beta=beta, sigma2=sigma2, tau2=tau2, lambda2=lambda2, nu=nu), y


@dataclass
class GewekeResult:
    names: list
    z: np.ndarray
    mean_prior: np.ndarray
    mean_chain: np.ndarray
    sweeps: int

    def passed(self, threshold: float = 4.0) -> bool:
        return bool(np.all(np.abs(self.z) < threshold))

    def rows(self):
        return list(zip(self.names, self.z.tolist()))


def geweke_joint_test(sampler_id: str, small_cfg: GewekeConfig | None, sweeps: int,
                      rng: np.random.Generator, *, sigma2_rate_offset: float = 0.0,
                      step_size: float = 1.0) -> GewekeResult:
    """Marginal-conditional vs successive-conditional simulators.

    (A) ``sweeps`` independent prior draws of (theta, y).
    (B) a chain alternating one Gibbs sweep theta | y with a fresh y | theta.
    z = (mean_A - mean_B) / sqrt(se_A^2 + se_B^2), with se_B by batch means.
    """
    gcfg = default_geweke_config(sampler_id) if small_cfg is None else small_cfg
    if gcfg.sampler != sampler_id:
        raise ValueError("small_cfg was built for a different sampler")
    X = gcfg.design()
    mod = get_sampler(sampler_id)
    r_prior, r_chain = rng.spawn(2)

    prior_stats = np.empty((sweeps, len(statistic_names(gcfg.p))))
    for i in range(sweeps):
        st, _ = draw_prior(gcfg, r_prior, X)
        prior_stats[i] = _stats(st.beta, st.sigma2, st.tau2, st.lambda2)

    state, y = draw_prior(gcfg, r_chain, X)
    data = Dataset(y=y, X=X)
    kern = mod.kernel(gcfg.prior)
    prop = TauProposal(step_size=step_size)
    from .samplers.base import gibbs_step

    chain_stats = np.empty_like(prior_stats)
    sd = math.sqrt
    for i in range(sweeps):
        state, _ = gibbs_step(kern, state, data, gcfg.prior, prop, r_chain, y=y,
                              sigma2_rate_offset=sigma2_rate_offset)
        y = X @ state.beta + sd(state.sigma2) * r_chain.standard_normal(X.shape[0])
        chain_stats[i] = _stats(state.beta, state.sigma2, state.tau2, state.lambda2)

    ma = prior_stats.mean(axis=0)
    sa = prior_stats.std(axis=0, ddof=1) / math.sqrt(sweeps)
    mb = np.empty_like(ma)
    sb = np.empty_like(ma)
    for k in range(ma.size):
        mb[k], sb[k] = batch_means_mcse(chain_stats[:, k])
    z = (ma - mb) / np.sqrt(sa**2 + sb**2)
    return GewekeResult(names=statistic_names(gcfg.p), z=z, mean_prior=ma, mean_chain=mb,
                        sweeps=sweeps)
