"""Sampling kernels and log-densities shared by the three samplers.

The Gaussian beta-conditional has precision A = X'X + diag(gamma) with
gamma_j = 1/(tau2 * lambda2_j) + r.  Two factorisation routes are kept:

* p-space: Householder QR of the stacked matrix [X; diag(sqrt(gamma))].  This
  never forms A, so it stays accurate when gamma spans hundreds of orders of
  magnitude (the drift checks push lambda2 to 1e+-85).
* n-space: Cholesky of M = I_n + X diag(1/gamma) X' (Woodbury form), used when
  p > 2n unless M is too ill-scaled, in which case p-space takes over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import InvalidParameter, NumericalFailure, OutOfSupport, SingularSystem
from .model import DesignCache, PriorConfig

N_SPACE_MAX_DIAG = 1e12


@dataclass(frozen=True)
class RidgeTerm:
    r: float = 0.0

    def __post_init__(self):
        if not (self.r >= 0.0 and math.isfinite(self.r)):
            raise InvalidParameter("ridge r must be finite and >= 0")

    @classmethod
    def from_c(cls, c: float) -> "RidgeTerm":
        return cls(0.0 if math.isinf(c) else c**-2)


def sample_inverse_gamma(shape, rate, rng: np.random.Generator, size=None):
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(~(shape > 0)) or np.any(~(rate > 0)):
        raise InvalidParameter("inverse-gamma shape and rate must be positive")
    out = rate / rng.gamma(shape, 1.0, size)
    return out if np.ndim(out) else float(out)


def precision_diagonal(tau2: float, lambda2: np.ndarray, ridge: RidgeTerm) -> np.ndarray:
    if not tau2 > 0 or np.any(~(lambda2 > 0)):
        raise InvalidParameter("tau2 and lambda2 must be positive")
    return 1.0 / (tau2 * lambda2) + ridge.r


@dataclass(frozen=True)
class BetaConditional:
    """N(A^-1 X'y, sigma2 A^-1) with the factor needed to draw from it.

    ``chol`` is the upper-triangular R with A = R'R (p-space route); on the
    n-space route it is the lower Cholesky factor of M and ``dtilde`` = 1/gamma.
    """

    mean: np.ndarray
    chol: np.ndarray
    gamma: np.ndarray
    logdet_A: float
    res: float  # y'(I - X A^-1 X')y
    route: str
    dtilde: Optional[np.ndarray] = None

    @property
    def logdet_ratio(self) -> float:
        """log|I_n + X diag(1/gamma) X'| = log|A| - sum log gamma."""
        return self.logdet_A - float(np.sum(np.log(self.gamma)))


def _p_space(X, y, gamma) -> BetaConditional:
    n, p = X.shape
    G = np.vstack([X, np.diag(np.sqrt(gamma))])
    try:
        Q, R = np.linalg.qr(G)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    rdiag = np.abs(np.diag(R))
    if not np.all(rdiag > 0) or not np.all(np.isfinite(R)):
        raise SingularSystem("QR produced a singular or non-finite factor")
    qty = Q[:n].T @ y
    mean = linalg.solve_triangular(R, qty, check_finite=False)
    fit = y - X @ mean
    res = float(fit @ fit + np.sum(gamma * mean * mean))
    return BetaConditional(
        mean=mean, chol=R, gamma=gamma, logdet_A=2.0 * float(np.sum(np.log(rdiag))),
        res=res, route="p",
    )


def _n_space(X, y, gamma) -> Optional[BetaConditional]:
    dt = 1.0 / gamma
    M = (X * dt) @ X.T
    M[np.diag_indices_from(M)] += 1.0
    if not np.all(np.isfinite(M)) or np.max(np.diag(M)) > N_SPACE_MAX_DIAG:
        return None
    try:
        L = linalg.cholesky(M, lower=True, check_finite=False)
    except linalg.LinAlgError:
        return None
    w = linalg.cho_solve((L, True), y, check_finite=False)
    mean = dt * (X.T @ w)
    logdet_M = 2.0 * float(np.sum(np.log(np.diag(L))))
    return BetaConditional(
        mean=mean, chol=L, gamma=gamma, logdet_A=logdet_M + float(np.sum(np.log(gamma))),
        res=float(y @ w), route="n", dtilde=dt,
    )


def beta_conditional(cache: DesignCache, y, tau2, lambda2, ridge: RidgeTerm,
                     route: str = "auto") -> BetaConditional:
    """Factorise the beta-conditional; ``route`` in {auto, p, n}."""
    gamma = precision_diagonal(tau2, np.asarray(lambda2, dtype=float), ridge)
    X = cache.X
    n, p = X.shape
    if route == "n" or (route == "auto" and p > 2 * n):
        out = _n_space(X, y, gamma)
        if out is not None:
            return out
        if route == "n":
            raise NumericalFailure("n-space factorisation is ill-scaled")
    return _p_space(X, y, gamma)


def draw_from(bc: BetaConditional, X: np.ndarray, y, sigma2: float,
              rng: np.random.Generator) -> np.ndarray:
    p = bc.mean.size
    if bc.route == "p":
        z = rng.standard_normal(p)
        return bc.mean + math.sqrt(sigma2) * linalg.solve_triangular(bc.chol, z, check_finite=False)
    # exact draw via the n-space identity, O(n^2 p)
    s = math.sqrt(sigma2)
    dt = bc.dtilde
    u = np.sqrt(dt) * rng.standard_normal(p)
    delta = rng.standard_normal(X.shape[0])
    v = X @ u + delta
    w = linalg.cho_solve((bc.chol, True), y / s - v, check_finite=False)
    return s * (u + dt * (X.T @ w))


def sample_beta_conditional(cache: DesignCache, y, sigma2, tau2, lambda2,
                            ridge: RidgeTerm, rng: np.random.Generator) -> np.ndarray:
    bc = beta_conditional(cache, y, tau2, lambda2, ridge)
    return draw_from(bc, cache.X, np.asarray(y, dtype=float), sigma2, rng)


def quad_form_residual(cache: DesignCache, y, tau2, lambda2, ridge: RidgeTerm,
                       route: str = "auto") -> float:
    """y'(I - X A^-1 X')y, equivalently y'(I + X M^-1 X')^-1 y with M = diag(gamma)."""
    return beta_conditional(cache, y, tau2, lambda2, ridge, route=route).res


def log_tau2_conditional(variant: str, tau2: float, lambda2, cache: DesignCache, y,
                         cfg: PriorConfig, log_c_fn=None,
                         bc: Optional[BetaConditional] = None) -> float:
    """Unnormalised log pi(tau2 | lambda, y) for the given variant.

    horseshoe and regularized share the form
        -(a+n/2) log(res/2+b) - 1/2 log|I_n + X Gamma^-1 X'| + log pi_tau
    (for the regularized chain Gamma carries the c^-2 shift, which absorbs the
    prod (c^-2 + 1/(tau2 lambda2))^(1/2) factor).  nishimura uses
        -1/2 (p log tau2 + log|A_c|) + p log c(tau2) - (a+n/2) log(res/2+b) + log pi_tau.
    ``log_c_fn`` supplies log c(tau2) for nishimura; ``bc`` may carry a
    precomputed factorisation at this tau2.
    """
    if not tau2 > cfg.T:
        raise OutOfSupport(f"tau2={tau2} outside (T={cfg.T}, inf)")
    if variant == "horseshoe":
        ridge = RidgeTerm(0.0)
    elif variant in ("regularized", "nishimura"):
        ridge = RidgeTerm.from_c(cfg.c)
    else:
        raise InvalidParameter(f"unknown variant {variant!r}")
    if bc is None:
        bc = beta_conditional(cache, y, tau2, lambda2, ridge)
    n = cache.n
    lik = -(cfg.a + 0.5 * n) * math.log(0.5 * bc.res + cfg.b)
    prior = float(cfg.tau_prior.logpdf(tau2))
    if variant == "nishimura":
        p = cache.p
        log_c = 0.0 if log_c_fn is None else float(log_c_fn(tau2))
        return lik - 0.5 * (p * math.log(tau2) + bc.logdet_A) + p * log_c + prior
    return lik - 0.5 * bc.logdet_ratio + prior
