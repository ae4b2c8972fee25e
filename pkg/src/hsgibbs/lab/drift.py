"""Monte Carlo check of the one-step drift inequality E[V(lambda1) | lambda0] <= gamma* V(lambda0) + b*."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..distributions import RidgeTerm, beta_conditional, draw_from, log_tau2_conditional
from ..errors import InvalidParameter
from ..model import Dataset, PriorConfig
from ..samplers import get_sampler
from ..samplers.base import sample_nu
from .constants import ConstantsReport, DriftSpec, drift_value


class Tau2Conditional:
    """pi(tau2 | lambda, y) tabulated on an adaptive grid in s = log(tau2 - T).

    A coarse scan locates the mass, a fine grid covers every point within
    ``drop`` log-units of the mode, and draws use the inverse CDF of the
    piecewise-linear density in s.
    """

    def __init__(self, variant: str, lambda2, data: Dataset, cfg: PriorConfig, y=None,
                 n_fine: int = 1500, drop: float = 40.0):
        self.variant = variant
        self.lambda2 = np.asarray(lambda2, dtype=float)
        self.data, self.cfg = data, cfg
        self.y = data.y if y is None else np.asarray(y, dtype=float)
        self.T = cfg.T
        log_c_fn = None
        if variant == "nishimura":
            from ..samplers.nishimura import build_normalizer

            log_c_fn = build_normalizer(cfg.c)
        self._log_c_fn = log_c_fn

        coarse = np.linspace(-60.0, 60.0, 241)
        lc = self._log_s_density(coarse)
        keep = np.flatnonzero(lc > lc.max() - drop)
        lo = coarse[max(keep[0] - 1, 0)]
        hi = coarse[min(keep[-1] + 1, coarse.size - 1)]
        s = np.linspace(lo, hi, n_fine)
        ls = self._log_s_density(s)
        dens = np.exp(ls - ls.max())
        cell = 0.5 * (dens[1:] + dens[:-1]) * np.diff(s)
        self.s, self.dens = s, dens
        self.cdf = np.concatenate([[0.0], np.cumsum(cell)])
        self.cdf /= self.cdf[-1]

    def _log_s_density(self, s):
        out = np.empty(len(s))
        for i, si in enumerate(s):
            tau2 = self.T + math.exp(si)
            if not tau2 > self.T:
                out[i] = -np.inf
                continue
            out[i] = log_tau2_conditional(self.variant, tau2, self.lambda2, self.data.design,
                                          self.y, self.cfg, log_c_fn=self._log_c_fn) + si
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        k = np.clip(np.searchsorted(self.cdf, u, side="right") - 1, 0, self.s.size - 2)
        # invert the linear density on the chosen cell
        s0, h = self.s[k], self.s[k + 1] - self.s[k]
        f0, f1 = self.dens[k], self.dens[k + 1]
        mass = self.cdf[k + 1] - self.cdf[k]
        frac = np.where(mass > 0, (u - self.cdf[k]) / np.where(mass > 0, mass, 1.0), 0.5)
        slope = f1 - f0
        area = frac * 0.5 * (f0 + f1)  # target area under the normalized cell, in units of h
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(np.abs(slope) > 1e-12 * np.maximum(f0, f1),
                         (-f0 + np.sqrt(f0 * f0 + 2.0 * slope * area)) / slope,
                         area / np.maximum(f0, 1e-300))
        t = np.clip(np.nan_to_num(t, nan=0.5), 0.0, 1.0)
        return self.T + np.exp(s0 + t * h)

    def expect(self, fn) -> float:
        """E[fn(tau2)] by the trapezoid rule on the fine grid."""
        tau2 = self.T + np.exp(self.s)
        w = self.dens * fn(tau2)
        num = np.sum(0.5 * (w[1:] + w[:-1]) * np.diff(self.s))
        den = np.sum(0.5 * (self.dens[1:] + self.dens[:-1]) * np.diff(self.s))
        return float(num / den)


def one_step_lambda(sampler: str, lambda0, data: Dataset, cfg: PriorConfig,
                    rng: np.random.Generator, replicates: int,
                    tau_cond: Tau2Conditional | None = None) -> np.ndarray:
    """``replicates`` independent draws of lambda1 from the marginal lambda-chain kernel at lambda0."""
    lambda0 = np.asarray(lambda0, dtype=float)
    mod = get_sampler(sampler)
    kern = mod.kernel(cfg)
    tc = tau_cond or Tau2Conditional(sampler, lambda0, data, cfg)
    r_tau, r_rest = rng.spawn(2)
    tau2s = tc.sample(r_tau, replicates)
    X, y, n = data.X, data.y, data.n
    out = np.empty((replicates, lambda0.size))
    for i, (tau2, r) in enumerate(zip(tau2s, r_rest.spawn(replicates))):
        r_nu, r_sig, r_beta, r_lam = r.spawn(4)
        bc = beta_conditional(data.design, y, float(tau2), lambda0, kern.ridge)
        nu = sample_nu(lambda0, r_nu)
        sigma2 = (0.5 * bc.res + cfg.b) / r_sig.gamma(cfg.a + 0.5 * n)
        beta = draw_from(bc, X, y, sigma2, r_beta)
        out[i], _ = kern.lambda_step(nu, beta, sigma2, float(tau2), cfg, r_lam)
    return out


@dataclass
class DriftRecord:
    V0: float
    estimate: float
    se: float
    bound: float
    satisfied: bool


@dataclass
class DriftReport:
    sampler: str
    gamma_star: float
    b_star: float
    records: list = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.records)

    def to_dict(self) -> dict:
        return {"sampler": self.sampler, "gamma_star": self.gamma_star, "b_star": self.b_star,
                "all_satisfied": self.all_satisfied,
                "records": [asdict(r) for r in self.records]}


def empirical_drift_check(sampler: str, spec: DriftSpec, starts, replicates: int,
                          data: Dataset, cfg: PriorConfig, rng: np.random.Generator,
                          constants: ConstantsReport) -> DriftReport:
    """Per start: N one-step transitions, MC mean of V(lambda1), and the 3 s.e. comparison."""
    if sampler not in ("horseshoe", "regularized"):
        raise InvalidParameter("drift checks cover the horseshoe and regularized chains")
    if replicates < 100:
        raise InvalidParameter("need at least 100 replicates")
    starts = list(starts)
    if not starts:
        raise InvalidParameter("starts must be nonempty")
    report = DriftReport(sampler, constants.gamma_star, constants.b_star)
    for lam0, r in zip(starts, rng.spawn(len(starts))):
        lam1 = one_step_lambda(sampler, lam0, data, cfg, r, replicates)
        v1 = np.array([drift_value(spec, row) for row in lam1])
        est = float(v1.mean())
        se = float(v1.std(ddof=1) / math.sqrt(replicates))
        v0 = drift_value(spec, lam0)
        bound = constants.gamma_star * v0 + constants.b_star
        report.records.append(DriftRecord(v0, est, se, bound, est <= bound + 3 * se))
    return report


def spread_starts(spec: DriftSpec, p: int, count: int = 20, v_lo: float | None = None,
                  v_hi: float = 1e6) -> list:
    """``count`` lambda0 vectors whose V values run log-evenly from ~v_lo to ~v_hi.

    Each start sets a block of coordinates to 10^(+-k) and the rest to 1; k is
    solved so that V hits the requested value.
    """
    v_lo = 2 * p if v_lo is None else v_lo
    targets = np.geomspace(v_lo, v_hi, count)
    out = []
    for i, target in enumerate(targets):
        m = max(1, p // 4)
        sign = -1.0 if i % 2 == 0 else 1.0
        if spec.kind == "V_tilde":
            sign = -1.0  # only small lambda2 raises V~

        def v_of(k):
            lam = np.ones(p)
            lam[:m] = 10.0 ** (sign * k)
            return drift_value(spec, lam)

        lo, hi = 0.0, 280.0
        if v_of(hi) < target:
            m = p
        if v_of(lo) >= target:
            out.append(np.ones(p))
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if v_of(mid) < target:
                lo = mid
            else:
                hi = mid
        lam = np.ones(p)
        lam[:m] = 10.0 ** (sign * hi)
        out.append(lam)
    return out
