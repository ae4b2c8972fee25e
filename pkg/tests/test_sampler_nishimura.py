import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from hsgibbs.distributions import beta_conditional, RidgeTerm, log_tau2_conditional
from hsgibbs.errors import OutOfSupport
from hsgibbs.model import ChainState, GlobalPrior, PriorConfig, init_chain_state
from hsgibbs.samplers import horseshoe, nishimura
from hsgibbs.samplers.base import TauProposal, _lambda_step_ig
from hsgibbs.samplers.nishimura import (
    build_normalizer,
    hypothesis_warnings,
    normalizing_c,
    sample_tilted_lambda2,
)

from conftest import gaussian_data, ks_ok

# c(tau2) at k = tau2/c^2 from scripts/oracles.py (mpmath, 40 digits)
C_ORACLE = {0.1: 1.19306135355484, 1.0: math.pi / 2, 10.0: 2.59143674891299}


def test_c_at_zero_is_one():
    assert normalizing_c(0.0, 1.0) == 1.0
    assert normalizing_c(5.0, math.inf) == 1.0


@pytest.mark.parametrize("k", sorted(C_ORACLE))
def test_c_matches_oracles(k):
    assert normalizing_c(k, 1.0) == pytest.approx(C_ORACLE[k], rel=1e-9)
    # tau2 and c enter through tau2/c^2 only
    assert normalizing_c(4 * k, 2.0) == pytest.approx(C_ORACLE[k], rel=1e-9)
    # dense trapezoid on 1e6 points in t = atan(lambda)
    t = np.linspace(0.0, 0.5 * math.pi, 1_000_001)
    f = 1.0 / np.sqrt(1.0 + k * np.tan(t[:-1]) ** 2)
    f = np.append(f, 0.0)
    inv = 2 / math.pi * integrate.trapezoid(f, t)
    assert 1 / inv == pytest.approx(normalizing_c(k, 1.0), abs=1e-6)


def test_c_monotone_and_bounded():
    grid = np.geomspace(1e-4, 1e4, 50)
    vals = np.array([normalizing_c(t, 1.0) for t in grid])
    assert np.all(np.diff(vals) >= 0) and np.all(vals >= 1.0)
    ct = build_normalizer(1.0).c_tilde()
    assert np.all(vals <= ct * np.sqrt(1 + grid) * (1 + 1e-12))


def test_cache_interpolation_error():
    cache = build_normalizer(1.0)
    rng = np.random.default_rng(0)
    pts = np.exp(rng.uniform(-30, 30, 200))
    got = cache.log_c(pts)
    ref = np.log([normalizing_c(t, 1.0) for t in pts])
    assert np.max(np.abs(got - ref)) < 1e-6


def test_logdet_tau2_ac():
    d = gaussian_data(6, 4, seed=3)
    lam, tau2, c = np.array([0.3, 1.0, 2.0, 8.0]), 0.7, 1.5
    bc = beta_conditional(d.design, d.y, tau2, lam, RidgeTerm.from_c(c))
    A = d.X.T @ d.X + np.diag(c**-2 + 1 / (tau2 * lam))
    direct = np.linalg.slogdet(tau2 * A)[1]
    assert 4 * math.log(tau2) + bc.logdet_A == pytest.approx(direct, rel=1e-9)


def test_forced_unit_c_reduces_to_horseshoe():
    d = gaussian_data(6, 4, seed=4)
    lam = np.array([0.3, 1.0, 2.0, 8.0])
    cfg = PriorConfig(c=math.inf)
    zero = lambda t: 0.0
    for t1, t2 in [(0.1, 1.0), (0.5, 30.0), (3.0, 4.0)]:
        n = (log_tau2_conditional("nishimura", t1, lam, d.design, d.y, cfg, log_c_fn=zero)
             - log_tau2_conditional("nishimura", t2, lam, d.design, d.y, cfg, log_c_fn=zero))
        h = (log_tau2_conditional("horseshoe", t1, lam, d.design, d.y, cfg)
             - log_tau2_conditional("horseshoe", t2, lam, d.design, d.y, cfg))
        assert abs(n - h) < 1e-6


def test_lambda_step_shared_with_horseshoe(nish_cfg):
    assert nishimura.kernel(nish_cfg).lambda_step is _lambda_step_ig
    assert horseshoe.kernel(nish_cfg).lambda_step is _lambda_step_ig


def test_step_order_determinism_support(small_data, nish_cfg):
    s0 = ChainState(np.zeros(4), 1.0, 1.0, np.linspace(0.5, 2, 4), np.ones(4))
    trace = []
    a = nishimura.step(s0, small_data, nish_cfg, TauProposal(), np.random.default_rng(1),
                       trace=trace)
    b = nishimura.step(s0, small_data, nish_cfg, TauProposal(), np.random.default_rng(1))
    assert trace == ["tau2", "nu", "sigma2", "beta", "lambda2"]
    np.testing.assert_array_equal(a.beta, b.beta)
    assert a.tau2 > nish_cfg.T
    with pytest.raises(OutOfSupport):
        log_tau2_conditional("nishimura", 0.4, s0.lambda2, small_data.design, small_data.y,
                             nish_cfg, log_c_fn=build_normalizer(1.0))


def test_tilted_prior_draws():
    tau2, c = 3.0, 1.0
    k = tau2 / c**2
    lam2 = sample_tilted_lambda2(tau2, c, np.random.default_rng(0), 100_000)

    def dens(t):  # in t = atan(lambda)
        return 1.0 / math.sqrt(1 + k * math.tan(t) ** 2)

    tot = integrate.quad(dens, 0, 0.5 * math.pi)[0]
    grid = np.linspace(0, 0.5 * math.pi, 4001)
    cum = np.concatenate([[0.0], np.cumsum([integrate.quad(dens, a, b)[0]
                                            for a, b in zip(grid[:-1], grid[1:])])]) / tot
    cdf = lambda x: np.interp(np.arctan(np.sqrt(x)), grid, cum)
    assert ks_ok(lam2, cdf)


def test_hypothesis_warnings(small_data):
    assert len(hypothesis_warnings(PriorConfig(c=1.0), 4)) == 2
    ok = PriorConfig(c=1.0, tau_prior=GlobalPrior("inverse-gamma", T=0.1, shape=4.0, rate=1.0))
    assert hypothesis_warnings(ok, 4) == []
    init = init_chain_state(PriorConfig(c=1.0), 4, np.random.default_rng(0))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        out = nishimura.run_chain(init, 5, 1, small_data, PriorConfig(c=1.0),
                                  np.random.default_rng(1))
    assert len(out) == 5 and len(w) == 2
