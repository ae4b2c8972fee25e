"""Minorization constants k(lambda0, .) >= eps* h(.) on drift sublevel sets, and the h densities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter
from ..model import DesignCache, PriorConfig
from .constants import _prior_integral


@dataclass(frozen=True)
class HorseshoeH:
    """Per coordinate h(x) = (3/2) sqrt(x) / (1+x)^(5/2): x/(1+x) ~ Beta(3/2, 1)."""

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return math.log(1.5) + 0.5 * np.log(x) - 2.5 * np.log1p(x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return (x / (1.0 + x)) ** 1.5

    def sample(self, rng: np.random.Generator, size):
        u = rng.random(size) ** (2.0 / 3.0)
        return u / (1.0 - u)


@dataclass(frozen=True)
class RegularizedH:
    """Per coordinate h(x) = 2 eta^2 x / (1 + eta x)^3: eta x/(1 + eta x) ~ Beta(2, 1).

    The single-eta form 2 eta x/(1+eta x)^3 integrates to 1/eta; eta^2 makes it a density.
    """

    eta: float

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return math.log(2.0) + 2.0 * math.log(self.eta) + np.log(x) - 3.0 * np.log1p(self.eta * x)

    def cdf(self, x):
        t = self.eta * np.asarray(x, dtype=float)
        return (t / (1.0 + t)) ** 2

    def sample(self, rng: np.random.Generator, size):
        u = np.sqrt(rng.random(size))
        return u / ((1.0 - u) * self.eta)


@dataclass
class MinorizationResult:
    variant: str
    d: float
    log_eps: float
    h: object
    params: dict

    @property
    def eps(self) -> float:
        return math.exp(self.log_eps)

    def h_logpdf(self, lambda2) -> float:
        return float(np.sum(self.h.logpdf(lambda2)))

    def to_dict(self) -> dict:
        return {"variant": self.variant, "d": self.d, "log_eps": self.log_eps,
                "eps": self.eps, **self.params}


def _horseshoe(d: float, cfg: PriorConfig, cache: DesignCache) -> MinorizationResult:
    if cfg.T <= 0:
        raise InvalidParameter("the horseshoe minorization needs a truncated global prior (T > 0)")
    p, n = cache.p, cache.n
    d0, d1 = cfg.delta0, cfg.delta1
    wbar = cache.omega_bar
    # log of omega_* = max{1, wbar d^(2/d0)} and omega^* = max{wbar, d^(2/d1)}
    lw_lo = max(0.0, math.log(wbar) + 2.0 / d0 * math.log(d))
    lw_hi = max(math.log(wbar), 2.0 / d1 * math.log(d))
    log_1pd = np.logaddexp(0.0, 2.0 / d1 * math.log(d))
    integral = _prior_integral(cfg.tau_prior, 0.0, cfg.T, np.inf,
                               extra=lambda u: -2.0 * p * math.log1p(u))
    log_eps = (-p * math.log(3.0) - 0.5 * p * lw_lo - 1.5 * p * lw_hi - p / d0 * math.log(d)
               - p * log_1pd + (2 * cfg.a + n) * (math.log(cfg.b) - math.log(cache.yty + cfg.b))
               + math.log(integral))
    return MinorizationResult("horseshoe", d, float(log_eps), HorseshoeH(),
                              {"log_omega_lower": lw_lo, "log_omega_upper": lw_hi,
                               "prior_expectation": integral})


def _regularized(d: float, cfg: PriorConfig, cache: DesignCache) -> MinorizationResult:
    if math.isinf(cfg.c):
        raise InvalidParameter("the regularized minorization needs a finite c")
    p, n = cache.p, cache.n
    c = abs(cfg.c)
    delta = cfg.delta
    e = cfg.a + 0.5 * n
    lw = max(math.log(cache.omega_bar + c**-2), 2.0 / delta * math.log(d))  # log omega_*
    log_eta = max(0.0, lw)
    k_star = max(math.sqrt(math.pi) / c, 2.0)
    log_alpha = -2.0 * np.logaddexp(0.0, 2.0 / delta * math.log(d)) - 0.5 * math.log(math.pi)
    xxy = float(cache.xty @ cache.xty)  # y'X X'y
    integral = _prior_integral(
        cfg.tau_prior, 0.0, cfg.T, np.inf,
        extra=lambda u: -p * (math.log1p(1.0 / u) + math.log1p(math.sqrt(u) / c**2)
                              + 0.5 * math.log1p(u)))
    log_eps = (2 * e * math.log(cfg.b) + p * log_alpha
               - p * (math.log(2.0) + 2.0 * log_eta + 0.5 * lw + math.log(k_star) + 3 * math.log(c))
               - e * math.log(cache.yty + cfg.b)
               - e * math.log(0.5 * (cache.yty + 2 * c * c * xxy) + cfg.b)
               + math.log(integral))
    eta = math.exp(log_eta)
    return MinorizationResult("regularized", d, float(log_eps), RegularizedH(eta),
                              {"log_omega_lower": lw, "eta": eta, "k_star": k_star,
                               "log_alpha": float(log_alpha), "prior_expectation": integral})


def minorization_constants(variant: str, d: float, cfg: PriorConfig,
                           cache: DesignCache) -> MinorizationResult:
    """eps* (as log_eps) and h for the sublevel set {V <= d} (horseshoe) or {V~ <= d} (regularized)."""
    if not d > 0:
        raise InvalidParameter("d must be positive")
    if variant == "horseshoe":
        return _horseshoe(d, cfg, cache)
    if variant == "regularized":
        return _regularized(d, cfg, cache)
    raise InvalidParameter(f"unknown variant {variant!r}")
