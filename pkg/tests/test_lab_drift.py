import math

import numpy as np
import pytest

from hsgibbs.errors import InvalidParameter
from hsgibbs.lab.constants import DriftSpec, drift_constants, drift_value
from hsgibbs.lab.drift import Tau2Conditional, empirical_drift_check, one_step_lambda, spread_starts
from hsgibbs.model import GlobalPrior, PriorConfig

from conftest import gaussian_data

HS = PriorConfig(tau_prior=GlobalPrior("truncated-half-cauchy", T=0.1))
SPEC = DriftSpec("V", 0.1, 0.1)


@pytest.fixture(scope="module")
def setting():
    d = gaussian_data(8, 5, seed=3)
    consts = drift_constants(HS, d.design, "horseshoe", stress_draws=2000,
                             rng=np.random.default_rng(0))
    return d, consts


def test_extreme_and_unit_starts(setting):
    d, consts = setting
    starts = [np.array([1e6, 1e-6, 1e6, 1e-6, 1e6]), np.ones(5)]
    rep = empirical_drift_check("horseshoe", SPEC, starts, 500, d, HS,
                                np.random.default_rng(1), consts)
    assert len(rep.records) == 2 and rep.all_satisfied
    assert all(r.se > 0 for r in rep.records)
    assert rep.records[0].V0 == pytest.approx(drift_value(SPEC, starts[0]))


def test_standard_error_scaling(setting):
    d, consts = setting
    lam0 = np.ones(5)
    small = empirical_drift_check("horseshoe", SPEC, [lam0], 100, d, HS,
                                  np.random.default_rng(2), consts)
    big = empirical_drift_check("horseshoe", SPEC, [lam0], 10_000, d, HS,
                                np.random.default_rng(3), consts)
    ratio = small.records[0].se / big.records[0].se
    assert 5 < ratio < 20  # ~10x, allowing for the noisy se at N = 100


def test_input_checks(setting):
    d, consts = setting
    with pytest.raises(InvalidParameter):
        empirical_drift_check("nishimura", SPEC, [np.ones(5)], 100, d, HS,
                              np.random.default_rng(0), consts)
    with pytest.raises(InvalidParameter):
        empirical_drift_check("horseshoe", SPEC, [np.ones(5)], 99, d, HS,
                              np.random.default_rng(0), consts)
    with pytest.raises(InvalidParameter):
        empirical_drift_check("horseshoe", SPEC, [], 100, d, HS, np.random.default_rng(0), consts)


def test_tau2_grid_sampler_consistent():
    d = gaussian_data(8, 5, seed=4)
    lam = np.array([0.1, 1.0, 10.0, 2.0, 0.5])
    tc = Tau2Conditional("horseshoe", lam, d, HS)
    x = tc.sample(np.random.default_rng(0), 100_000)
    assert np.all(x > HS.T)
    ref = tc.expect(np.log)
    sd = math.sqrt(tc.expect(lambda t: np.log(t) ** 2) - ref**2)
    assert abs(np.mean(np.log(x)) - ref) < 4 * sd / math.sqrt(x.size)


def test_one_step_shapes_and_positivity():
    d = gaussian_data(8, 5, seed=5)
    out = one_step_lambda("regularized", np.ones(5), d, PriorConfig(c=1.0),
                          np.random.default_rng(0), 50)
    assert out.shape == (50, 5) and np.all(out > 0)


@pytest.mark.parametrize("kind", ["V", "V_tilde"])
def test_spread_starts_cover_range(kind):
    spec = DriftSpec(kind, 0.1, 0.1, 0.1)
    p = 60
    starts = spread_starts(spec, p, 20)
    v = np.array([drift_value(spec, s) for s in starts])
    target = np.geomspace(2 * p, 1e6, 20)
    np.testing.assert_allclose(v, target, rtol=1e-6)
