"""Drift-function constants: gamma(delta), the admissible interval, b*, and the tau2 moment bounds."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special

from ..errors import InvalidParameter, RootNotBracketed, StressSearchDiverged
from ..model import DesignCache, GlobalPrior, PriorConfig

LOG_PI = math.log(math.pi)


# ------------------------------------------------------------------ V and V~

@dataclass(frozen=True)
class DriftSpec:
    """kind "V": sum (l^2)^(d0/2) + sum (l^2)^(-d1/2); kind "V_tilde": sum (l^2)^(-delta/2)."""

    kind: str = "V"
    delta0: float = 0.1
    delta1: float = 0.1
    delta: float = 0.1

    def __post_init__(self):
        if self.kind not in ("V", "V_tilde"):
            raise InvalidParameter(f"unknown drift kind {self.kind!r}")
        for name in ("delta0", "delta1", "delta"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidParameter(f"{name} must lie in (0, 1)")


def drift_value(spec: DriftSpec, lambda2) -> float:
    lam = np.asarray(lambda2, dtype=float)
    if lam.size == 0 or np.any(~(lam > 0)):
        raise InvalidParameter("lambda2 must be a nonempty positive vector")
    if spec.kind == "V":
        return float(np.sum(lam ** (spec.delta0 / 2)) + np.sum(lam ** (-spec.delta1 / 2)))
    return float(np.sum(lam ** (-spec.delta / 2)))


# ---------------------------------------------------------------- gamma(delta)

def log_gamma_d1(delta: float) -> float:
    """log of Gamma(1+d/2) (Gamma(1-d/2)^(-2/d) + pi^(1/d) Gamma((1-d)/2)^(-2/d))^(-d/2)."""
    a = -2.0 / delta * special.gammaln(1.0 - delta / 2)
    b = LOG_PI / delta - 2.0 / delta * special.gammaln((1.0 - delta) / 2)
    return float(special.gammaln(1.0 + delta / 2) - delta / 2 * np.logaddexp(a, b))


def gamma_of_delta(which: str, delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise InvalidParameter("delta must lie in (0, 1)")
    if which == "d0":
        return float(math.exp(special.gammaln(1 - delta / 2) + special.gammaln((1 + delta) / 2)
                              - 0.5 * LOG_PI))
    if which == "d1":
        return math.exp(log_gamma_d1(delta))
    raise InvalidParameter(f"which must be 'd0' or 'd1', got {which!r}")


def _bisect(f, lo, hi, tol=1e-10, maxit=200):
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RootNotBracketed(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def gamma_d1_roots(n_grid: int = 10_000, lo: float = 1e-8, hi: float = 0.99, tol: float = 1e-10):
    """All roots of gamma_d1(delta) = 1 on (lo, hi): sign changes on a log grid, then bisection."""
    grid = np.geomspace(lo, hi, n_grid)
    vals = np.array([log_gamma_d1(d) for d in grid])
    idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    return [float(_bisect(log_gamma_d1, grid[i], grid[i + 1], tol=tol)) for i in idx]


def admissible_interval(tol: float = 1e-10):
    """Maximal interval (delta_lo, delta_hi) near zero on which gamma_d1(delta) < 1.

    log gamma_d1(delta) ~ -delta log(5/4)/2 as delta -> 0+, so gamma_d1 < 1
    right down to 0 and the interval opens at 0 unless a root sits below the
    upper one.  See ``float64_breakdown`` for where 0.00162 comes from.
    """
    roots = gamma_d1_roots(tol=tol)
    if not roots:
        raise RootNotBracketed("gamma_d1 - 1 has no sign change on (0, 0.99)")
    if log_gamma_d1(1e-8) < 0:
        return 0.0, roots[0]
    if len(roots) < 2:
        raise RootNotBracketed("gamma_d1 - 1 has a single sign change and is positive near 0")
    return roots[0], roots[1]


def naive_gamma_d1(delta: float) -> float:
    """The displayed gamma_d1 formula evaluated literally in float64 (no logs)."""
    d = np.float64(delta)
    with np.errstate(all="ignore"):
        return float(special.gamma(1 + d / 2) * (special.gamma(1 - d / 2) ** (-2 / d)
                     + np.sqrt(np.pi) ** (2 / d) / special.gamma((1 - d) / 2) ** (2 / d)) ** (-d / 2))


def float64_breakdown(tol: float = 1e-12) -> float:
    """Where the literal float64 evaluation of gamma_d1 crosses 1 near zero.

    Below ~0.0016128 pi^(1/delta) overflows and the formula returns nan; up to
    ~0.0016172 Gamma((1-delta)/2)^(2/delta) overflows instead, the second term
    becomes 0 and the value sits just above 1.  The jump back below 1 is a
    sign change of gamma_d1 - 1 in float64 only; in exact arithmetic
    gamma_d1 < 1 on all of (0, 0.2217).
    """
    def edge(pred, lo, hi):
        # pred(lo) false, pred(hi) true
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if pred(mid) else (mid, hi)
        return hi

    finite_from = edge(lambda d: math.isfinite(naive_gamma_d1(d)), 1e-4, 0.01)
    if not naive_gamma_d1(finite_from) > 1.0:
        raise RootNotBracketed("naive formula does not exceed 1 at its finite edge")
    return edge(lambda d: naive_gamma_d1(d) < 1.0, finite_from, 0.01)


# ------------------------------------------------------------ moment bounds

def _prior_integral(prior: GlobalPrior, order: float, lo: float, hi: float,
                    extra=None) -> float:
    """int_lo^hi u^order * extra(u) * pi_tau(u) du, via s = log u."""
    lo = max(lo, prior.T)
    if not hi > lo:
        return 0.0
    # +-700 in log scale stands in for 0 and inf (every integrand used here is integrable)
    a = math.log(lo) if lo > 0 else -700.0
    b = math.log(hi) if np.isfinite(hi) else 700.0

    def f(s):
        u = math.exp(s)
        lg = float(prior.logpdf(u))
        if lg == -np.inf:
            return 0.0
        e = 0.0 if extra is None else extra(u)
        return math.exp((order + 1.0) * s + lg + e)

    edges = [a] + [e for e in (-30.0, -5.0, 0.0, 5.0, 30.0) if a < e < b] + [b]
    tot = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(f, x0, x1, limit=400, epsabs=0.0, epsrel=1e-10)
        tot += v
    return tot


def _data_factor(cfg: PriorConfig, cache: DesignCache) -> float:
    """log (1 + y'y/b)^(a + n/2)."""
    return (cfg.a + cache.n / 2) * math.log1p(cache.yty / cfg.b)


def moment_bound_C1(cfg: PriorConfig, cache: DesignCache, delta: float, eps: float = 1.0) -> float:
    """eps^(d/2) + (1+y'y/b)^(a+n/2) int_eps^inf u^(d/2) pi / int_0^eps pi."""
    den = _prior_integral(cfg.tau_prior, 0.0, 0.0, eps)
    if den <= 0:
        raise InvalidParameter("eps must exceed the truncation point T")
    num = _prior_integral(cfg.tau_prior, delta / 2, eps, np.inf)
    return eps ** (delta / 2) + math.exp(_data_factor(cfg, cache)) * num / den


def moment_bound_C2(cfg: PriorConfig, cache: DesignCache, delta: float, eps: float = 1.0) -> float:
    """Same as C1 but the numerator integral runs over (0, inf)."""
    den = _prior_integral(cfg.tau_prior, 0.0, 0.0, eps)
    if den <= 0:
        raise InvalidParameter("eps must exceed the truncation point T")
    num = _prior_integral(cfg.tau_prior, delta / 2, 0.0, np.inf)
    return eps ** (delta / 2) + math.exp(_data_factor(cfg, cache)) * num / den


def moment_bound_C1_negative(cfg: PriorConfig, cache: DesignCache, delta: float,
                             eps: float = 1.0) -> float:
    """Bound on E[(tau2)^(-d/2) | lambda0, y]; infinite without the -(p+d)/2 prior moment."""
    p = cache.p
    if not cfg.tau_prior.moment_finite(-(p + delta) / 2):
        return math.inf
    num = _prior_integral(cfg.tau_prior, -(p + delta) / 2, 0.0, eps)
    den = _prior_integral(cfg.tau_prior, -p / 2, eps, np.inf)
    return eps ** (-delta / 2) + math.exp(_data_factor(cfg, cache)) * num / den


def moment_bound_C3(cfg: PriorConfig, cache: DesignCache, delta: float, c_tilde: float,
                    eps: float = 1.0) -> float:
    """Bound for the tilted-prior chain.

    The chain's tau2 density carries c(tau2)^p <= C~^p (1+tau2)^(p/2), so the
    constant uses C~^p (C~^(p/2) would undercount by a square root).
    Infinite unless the prior has a finite (p+d)/2 moment.
    """
    p = cache.p
    if not cfg.tau_prior.moment_finite((p + delta) / 2):
        return math.inf
    den = _prior_integral(cfg.tau_prior, 0.0, cfg.T, eps)
    if den <= 0:
        raise InvalidParameter("eps must exceed the truncation point T")
    extra = lambda u: 0.5 * p * math.log1p(u)
    num = _prior_integral(cfg.tau_prior, delta / 2, cfg.T, np.inf, extra=extra)
    log_rest = p * math.log(c_tilde) + _data_factor(cfg, cache) + math.log(num) - math.log(den)
    return eps ** (delta / 2) + math.exp(log_rest)


# ------------------------------------------------------- uniform bound T*

def conditional_mean_sup(cache: DesignCache, draws: int = 100_000, rng=None,
                         batch: int = 2000, y=None) -> float:
    """Largest |entry| of (X'X + Delta)^-1 X'y seen over random diagonal Delta.

    Delta entries are log-uniform on [1e-8, 1e8]; every 10th batch instead uses
    binary patterns (each entry 1e-8 or 1e8), where the supremum tends to sit.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    xty = cache.xty if y is None else cache.X.T @ np.asarray(y, dtype=float)
    p = cache.p
    best = 0.0
    done = 0
    k = 0
    while done < draws:
        m = min(batch, draws - done)
        if k % 10 == 9:
            logd = np.where(rng.random((m, p)) < 0.5, -8.0, 8.0) * math.log(10)
        else:
            logd = rng.uniform(-8, 8, (m, p)) * math.log(10)
        mu = ridge_solve(cache.X, np.exp(logd), xty)
        best = max(best, float(np.max(np.abs(mu))))
        done += m
        k += 1
    if not math.isfinite(best):
        raise StressSearchDiverged("conditional mean blew up during the stress search")
    return best


def ridge_solve(X, dvecs, rhs):
    """Rows of (X'X + diag(d))^-1 rhs for a stack of d vectors.

    Goes through the QR of [X; diag(sqrt(d))], so R'R = X'X + diag(d) is never
    formed and huge or tiny d entries keep full relative accuracy.
    """
    dvecs = np.atleast_2d(dvecs)
    m, p = dvecs.shape
    G = np.concatenate([np.broadcast_to(X, (m,) + X.shape),
                        np.sqrt(dvecs)[:, :, None] * np.eye(p)], axis=1)
    R = np.linalg.qr(G, mode="r")
    z = np.linalg.solve(np.swapaxes(R, 1, 2), np.broadcast_to(rhs, (m, p))[..., None])
    return np.linalg.solve(R, z)[..., 0]


@dataclass
class ConstantsReport:
    kind: str
    gamma_d0: Optional[float]
    gamma_d1: float
    gamma_star: float
    b1: Optional[float]
    b2: Optional[float]
    b_star: float
    interval: tuple
    C0: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    T_star: Optional[float] = None
    c_tilde: Optional[float] = None
    eps: float = 1.0
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return d


def drift_constants(cfg: PriorConfig, cache: DesignCache, variant: str = "horseshoe",
                    eps: float = 1.0, stress_draws: int = 100_000, rng=None,
                    safety: float = 2.0) -> ConstantsReport:
    """gamma*, b* and their ingredients for the requested chain.

    horseshoe (drift V, exponents delta0/delta1):
        b1 = p C0 gamma_d1(delta1),  C0 = max{1, omega_bar^(delta1/2) C1(delta1)}
        b2 = p Gamma(1-d0/2) [Gamma(1+d0/2) + T*/(2b)^(d0/2) Gamma(a+(n+d0)/2)/Gamma(a+n/2)]
        T* = (safety * sup|mu|)^d0 / T^(d0/2)
    regularized (drift V~, exponent delta):
        b* = p max{1,|c|}/|c| C2 + p max{1, (omega_bar + c^-2)^(d/2) C2} gamma_d1(d)
    nishimura:
        b* = p max{1, (omega_bar + c^-2)^(d/2) C3} gamma_d1(d)
    """
    p, n = cache.p, cache.n
    interval = admissible_interval()
    prov = {"gamma_d0": "closed-form", "gamma_d1": "closed-form", "interval": "bisection"}
    if variant == "horseshoe":
        if cfg.T <= 0:
            raise InvalidParameter("the horseshoe drift bound needs a truncated global prior (T > 0)")
        d0, d1 = cfg.delta0, cfg.delta1
        g0, g1 = gamma_of_delta("d0", d0), gamma_of_delta("d1", d1)
        C1 = moment_bound_C1(cfg, cache, d1, eps)
        C0 = max(1.0, cache.omega_bar ** (d1 / 2) * C1)
        b1 = p * C0 * g1
        mu_sup = conditional_mean_sup(cache, stress_draws, rng)
        T_star = (safety * mu_sup) ** d0 / cfg.T ** (d0 / 2)
        ratio = math.exp(special.gammaln(cfg.a + (n + d0) / 2) - special.gammaln(cfg.a + n / 2))
        b2 = p * math.gamma(1 - d0 / 2) * (math.gamma(1 + d0 / 2)
                                          + T_star / (2 * cfg.b) ** (d0 / 2) * ratio)
        prov.update(C1="quadrature", C0="closed-form given C1", T_star="estimated",
                    b1="closed-form given C1", b2="estimated (via T*)", b_star="estimated (via T*)")
        return ConstantsReport("V", g0, g1, max(g0, g1), b1, b2, b1 + b2, interval,
                               C0=C0, C1=C1, T_star=T_star, eps=eps, provenance=prov)
    d = cfg.delta
    g1 = gamma_of_delta("d1", d)
    if math.isinf(cfg.c):
        raise InvalidParameter(f"{variant} constants need a finite c")
    c = abs(cfg.c)
    wbar = cache.omega_bar + c**-2
    if variant == "regularized":
        C2 = moment_bound_C2(cfg, cache, d, eps)
        b_star = p * max(1.0, c) / c * C2 + p * max(1.0, wbar ** (d / 2) * C2) * g1
        prov.update(C2="quadrature", b_star="closed-form given C2")
        return ConstantsReport("V_tilde", None, g1, g1, None, None, b_star, interval,
                               C2=C2, eps=eps, provenance=prov)
    if variant == "nishimura":
        from ..samplers.nishimura import build_normalizer

        ct = build_normalizer(cfg.c).c_tilde()
        C3 = moment_bound_C3(cfg, cache, d, ct, eps)
        b_star = p * max(1.0, wbar ** (d / 2) * C3) * g1
        prov.update(C3="quadrature", c_tilde="grid supremum", b_star="closed-form given C3")
        return ConstantsReport("V_tilde", None, g1, g1, None, None, b_star, interval,
                               C3=C3, c_tilde=ct, eps=eps, provenance=prov)
    raise InvalidParameter(f"unknown variant {variant!r}")


# ------------------------------------------- the first term of the V~ drift

def young_term_ratio(c: float, tau2: float, R: float, delta: float) -> float:
    """E[X^d] / E[sqrt(c^-2 + X^2)] with tau2 X^2 ~ Gamma(1/2, rate R).

    The regularized drift bound multiplies this by (tau2)^(d/2)/|c|.  It is
    at most max{1, |c|}: X^d <= (1-d) + d X <= max{1, E X} in expectation,
    while E sqrt(c^-2 + X^2) >= max{|c|^-1, E X}.
    """
    num = math.exp(special.gammaln(0.5 + delta / 2) - special.gammaln(0.5)
                   - (delta / 2) * math.log(R * tau2))
    ic2 = c**-2

    # W = tau2 X^2 ~ Gamma(1/2, R): integrate in s = log W
    def f(s):
        w = math.exp(s)
        logpdf = 0.5 * math.log(R) - special.gammaln(0.5) - 0.5 * s - R * w
        return math.sqrt(ic2 + w / tau2) * math.exp(logpdf + s)

    mid = math.log(1.0 / R)
    den = sum(integrate.quad(f, lo, hi, limit=300, epsrel=1e-11)[0]
              for lo, hi in ((-np.inf, mid - 20), (mid - 20, mid), (mid, mid + 10), (mid + 10, np.inf)))
    return num / den
