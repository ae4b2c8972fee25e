"""Datasets, priors and chain state shared by every sampler.

Inverse-Gamma(a, b) is parameterised by shape a and RATE b throughout the
package: density proportional to x^(-a-1) exp(-b/x).
"""
from __future__ import annotations

import csv
import math
import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import integrate, special

from .errors import (
    DegenerateResponse,
    DimensionMismatch,
    InvalidParameter,
    NonFinite,
    NumericalFailure,
)

FAMILIES = ("half-cauchy", "truncated-half-cauchy", "inverse-gamma")


@dataclass(frozen=True)
class DesignCache:
    """Quantities of X (and X'y) reused by every conditional draw."""

    X: np.ndarray
    xtx: np.ndarray
    xty: np.ndarray
    yty: float
    omega_bar: float
    d: np.ndarray  # positive singular values, descending
    U: np.ndarray  # n x r
    Vt: np.ndarray  # r x p
    gram_n: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def rank(self) -> int:
        return self.d.size

    def with_response(self, y: np.ndarray) -> "DesignCache":
        """Same design, new response; no refactorisation."""
        y = np.asarray(y, dtype=float)
        return dataclasses.replace(self, xty=self.X.T @ y, yty=float(y @ y))


@dataclass(frozen=True, eq=False)
class Dataset:
    y: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @cached_property
    def design(self) -> DesignCache:
        return build_design_cache(self)

    def with_response(self, y: np.ndarray) -> "Dataset":
        """Dataset sharing X (and its cached decomposition) with a new y."""
        y = np.asarray(y, dtype=float)
        if y.shape != self.y.shape:
            raise DimensionMismatch(f"y has shape {y.shape}, expected {self.y.shape}")
        new = Dataset(y=y, X=self.X)
        if "design" in self.__dict__:
            new.__dict__["design"] = self.design.with_response(y)
        return new


def validate_dataset(y, X) -> Dataset:
    y = np.array(y, dtype=float)
    X = np.array(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if y.ndim != 1 or X.ndim != 2:
        raise DimensionMismatch("y must be a vector and X a matrix")
    n, p = X.shape
    if n < 1 or p < 1:
        raise DimensionMismatch("need n >= 1 and p >= 1")
    if y.size != n:
        raise DimensionMismatch(f"len(y)={y.size} but X has {n} rows")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
        raise NonFinite("y and X must be finite")
    if float(y @ y) <= 0.0:
        raise DegenerateResponse("y'y must be positive")
    y.setflags(write=False)
    X.setflags(write=False)
    return Dataset(y=y, X=X)


def build_design_cache(data: Dataset) -> DesignCache:
    X, y = data.X, data.y
    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    tol = s.max(initial=0.0) * max(X.shape) * np.finfo(float).eps
    keep = s > tol
    d = s[keep]
    omega_bar = float(d[0] ** 2) if d.size else 0.0
    return DesignCache(
        X=X,
        xtx=X.T @ X,
        xty=X.T @ y,
        yty=float(y @ y),
        omega_bar=omega_bar,
        d=d,
        U=U[:, keep],
        Vt=Vt[keep],
        gram_n=X @ X.T,
    )


def read_dataset_csv(path) -> Dataset:
    """First column y, remaining columns X; a header row is required."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DimensionMismatch("CSV needs a header and at least one data row")
    header = rows[0]
    try:
        float(header[0])
    except ValueError:
        pass
    else:
        raise DimensionMismatch("CSV header row is missing")
    body = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if body.shape[1] < 2:
        raise DimensionMismatch("CSV needs y plus at least one predictor column")
    return validate_dataset(body[:, 0], body[:, 1:])


def write_dataset_csv(path, data: Dataset) -> None:
    header = ["y"] + [f"x{j + 1}" for j in range(data.p)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for yi, xi in zip(data.y, data.X):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in xi])


@dataclass(frozen=True)
class GlobalPrior:
    """Prior on u = tau^2, optionally truncated to (T, inf).

    half-cauchy: tau ~ C+(0, scale).  inverse-gamma: u ~ IG(shape, rate).
    """

    family: str = "half-cauchy"
    T: float = 0.0
    scale: float = 1.0
    shape: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown global prior family {self.family!r}")
        if not (self.T >= 0.0 and math.isfinite(self.T)):
            raise InvalidParameter("truncation T must be finite and >= 0")
        if self.family == "truncated-half-cauchy" and self.T <= 0.0:
            raise InvalidParameter("truncated-half-cauchy needs T > 0")
        for name in ("scale", "shape", "rate"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise InvalidParameter(f"{name} must be positive and finite")

    @property
    def is_cauchy(self) -> bool:
        return self.family != "inverse-gamma"

    @cached_property
    def _log_mass(self) -> float:
        """log of the untruncated mass above T."""
        if self.T == 0.0:
            return 0.0
        if self.is_cauchy:
            return math.log1p(-2.0 / math.pi * math.atan(math.sqrt(self.T) / self.scale))
        return math.log(special.gammainc(self.shape, self.rate / self.T))

    def logpdf(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.is_cauchy:
                s = self.scale
                out = -np.log(np.pi * s) - 0.5 * np.log(u) - np.log1p(u / s**2)
            else:
                a, b = self.shape, self.rate
                out = a * math.log(b) - special.gammaln(a) - (a + 1) * np.log(u) - b / u
        out = np.where(u > self.T, out - self._log_mass, -np.inf)
        return out if out.ndim else float(out)

    def pdf(self, u):
        return np.exp(self.logpdf(u))

    def sample(self, rng: np.random.Generator, size=None):
        v = rng.random(size)
        if self.is_cauchy:
            lo = 2.0 / math.pi * math.atan(math.sqrt(self.T) / self.scale)
            t = self.scale * np.tan(0.5 * np.pi * (lo + (1.0 - lo) * v))
            u = t * t
        else:
            top = 1.0 if self.T == 0.0 else special.gammainc(self.shape, self.rate / self.T)
            g = special.gammaincinv(self.shape, v * top)
            u = self.rate / g
        u = np.maximum(u, np.nextafter(self.T, np.inf))
        return u if np.ndim(u) else float(u)

    def moment_finite(self, order: float) -> bool:
        """Whether E[u^order] is finite (order may be negative)."""
        if order == 0:
            return True
        if self.is_cauchy:
            if order > 0:
                return order < 0.5
            return self.T > 0.0 or -order < 0.5
        if order > 0:
            return order < self.shape
        return True

    def moment(self, order: float, upper: float = np.inf) -> float:
        """E[u^order 1{u < upper}] by quadrature in s = log u."""
        # +-700 on the log scale stand in for 0 and inf and keep exp() in range
        lo = math.log(self.T) if self.T > 0 else -700.0
        hi = min(math.log(upper), 700.0) if np.isfinite(upper) else 700.0

        def f(s):
            lg = float(self.logpdf(math.exp(s)))
            return 0.0 if lg == -np.inf else math.exp(order * s + s + lg)
        return _split_quad(f, lo, hi)

    def moment_flags(self, p: int, delta: float) -> dict:
        return {
            "delta_half": self.moment_finite(delta / 2),
            "neg_p_delta_half": self.moment_finite(-(p + delta) / 2),
            "p_delta_half": self.moment_finite((p + delta) / 2),
        }


def _split_quad(f, lo, hi) -> float:
    """Quadrature over an interval in log space, split around s=0 for stability."""
    pieces = []
    edges = [lo] + [e for e in (-40.0, -10.0, 0.0, 10.0, 40.0) if lo < e < hi] + [hi]
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, limit=400, epsabs=0.0, epsrel=1e-11)
        pieces.append(val)
    return math.fsum(pieces)


@dataclass(frozen=True)
class PriorConfig:
    a: float = 1.0
    b: float = 1.0
    c: float = math.inf  # inf selects the original horseshoe
    tau_prior: GlobalPrior = field(default_factory=GlobalPrior)
    delta0: float = 0.1
    delta1: float = 0.1
    delta: float = 0.1

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidParameter("a and b must be positive and finite")
        if not self.c > 0:
            raise InvalidParameter("c must be positive (or inf)")
        for name in ("delta0", "delta1", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise InvalidParameter(f"{name} must lie in (0, 1)")

    @property
    def ridge(self) -> float:
        return 0.0 if math.isinf(self.c) else self.c**-2

    @property
    def T(self) -> float:
        return self.tau_prior.T


@dataclass(frozen=True)
class ChainState:
    beta: np.ndarray
    sigma2: float
    tau2: float
    lambda2: np.ndarray
    nu: np.ndarray

    @property
    def p(self) -> int:
        return self.beta.size

    def check(self, T: float = 0.0) -> None:
        arrays = (self.beta, self.lambda2, self.nu)
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise NonFinite("state has non-finite entries")
        if not (math.isfinite(self.sigma2) and math.isfinite(self.tau2)):
            raise NonFinite("state has non-finite scalars")
        if self.sigma2 <= 0 or self.tau2 <= T:
            raise InvalidParameter("sigma2 must be > 0 and tau2 > T")
        if np.any(self.lambda2 <= 0) or np.any(self.nu <= 0):
            raise InvalidParameter("lambda2 and nu must be positive")


def sample_half_cauchy_lambda2(rng: np.random.Generator, size) -> np.ndarray:
    """lambda^2 with lambda ~ C+(0, 1), kept strictly positive and finite."""
    t = np.tan(0.5 * np.pi * rng.random(size))
    return np.clip(t * t, 1e-300, 1e300)


def init_chain_state(cfg: PriorConfig, p: int, rng: np.random.Generator) -> ChainState:
    if p < 1:
        raise InvalidParameter("p must be >= 1")
    lambda2 = sample_half_cauchy_lambda2(rng, p)
    nu = 1.0 / rng.gamma(1.0, 1.0 / (1.0 + 1.0 / lambda2))
    sigma2 = float(cfg.b / rng.gamma(cfg.a))
    tau2 = float(cfg.tau_prior.sample(rng))
    return ChainState(beta=np.zeros(p), sigma2=sigma2, tau2=tau2, lambda2=lambda2, nu=nu)
