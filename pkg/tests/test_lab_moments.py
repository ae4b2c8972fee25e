import math
import warnings

import numpy as np
import pytest

from hsgibbs.errors import InvalidParameter
from hsgibbs.lab.moments import extreme_starts, moment_bound, tau2_moment_bound_check
from hsgibbs.model import GlobalPrior, PriorConfig

from conftest import gaussian_data

HS = PriorConfig(tau_prior=GlobalPrior("truncated-half-cauchy", T=0.1))
IG_TRUNC = PriorConfig(c=1.0, tau_prior=GlobalPrior("inverse-gamma", T=0.1, shape=4.0, rate=1.0))


def test_extreme_starts_shape():
    s = extreme_starts(5, 10)
    assert len(s) == 10 and all(v.shape == (5,) for v in s)
    np.testing.assert_array_equal(s[0], np.ones(5))
    assert max(np.abs(np.log10(v)).max() for v in s) == pytest.approx(12.0)


def test_horseshoe_C1_extreme_starts():
    d = gaussian_data(8, 4, seed=0)
    rep = tau2_moment_bound_check("horseshoe", 0.1, 1.0, HS, d, extreme_starts(4, 6),
                                  np.random.default_rng(0), iters=1500, burnin=500)
    assert rep.warnings == [] and math.isfinite(rep.bound)
    assert rep.all_satisfied, rep.to_dict()
    for r in rep.records:
        # grid expectation and MH estimate agree
        assert abs(r.estimate - r.quadrature) < 6 * r.se + 1e-3


def test_negative_moment_warns_for_untruncated_prior():
    d = gaussian_data(8, 4, seed=0)
    with pytest.warns(UserWarning, match="negative"):
        rep = tau2_moment_bound_check("horseshoe", 0.1, 1.0, PriorConfig(), d, [np.ones(4)],
                                      np.random.default_rng(0), sign=-1, iters=300, burnin=100)
    assert rep.bound == math.inf and rep.all_satisfied


def test_C3_finite_only_with_moment():
    d = gaussian_data(8, 4, seed=1)
    nish_hc = PriorConfig(c=1.0, tau_prior=GlobalPrior("half-cauchy", T=0.1))
    assert moment_bound("nishimura", 1, 0.1, 1.0, nish_hc, d) == math.inf
    assert math.isfinite(moment_bound("nishimura", 1, 0.1, 1.0, IG_TRUNC, d))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = tau2_moment_bound_check("nishimura", 0.1, 1.0, IG_TRUNC, d, extreme_starts(4, 3),
                                      np.random.default_rng(1), iters=1000, burnin=300)
    assert rep.all_satisfied


def test_bad_inputs():
    d = gaussian_data(8, 4, seed=0)
    with pytest.raises(InvalidParameter):
        moment_bound("regularized", -1, 0.1, 1.0, PriorConfig(c=1.0), d)
    with pytest.raises(InvalidParameter):
        tau2_moment_bound_check("horseshoe", 0.1, 0.0, HS, d, [np.ones(4)],
                                np.random.default_rng(0))
    with pytest.raises(InvalidParameter):
        tau2_moment_bound_check("horseshoe", 0.1, 1.0, HS, d, [np.ones(4)],
                                np.random.default_rng(0), sign=2)
