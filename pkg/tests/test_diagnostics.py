import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hsgibbs.diagnostics import (
    batch_means_mcse,
    cumulative_average,
    default_geweke_config,
    ess,
    geweke_joint_test,
    statistic_names,
)
from hsgibbs.errors import NonFinite, TooShort


def ar1(phi, m, seed):
    """Stationary AR(1) with unit marginal variance."""
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(m) * math.sqrt(1 - phi * phi)
    x = np.empty(m)
    x[0] = rng.standard_normal()
    for t in range(1, m):
        x[t] = phi * x[t - 1] + e[t]
    return x


def test_batch_means_constant():
    assert batch_means_mcse(np.full(500, 3.0)) == (3.0, 0.0)


def test_batch_means_iid():
    x = np.random.default_rng(0).standard_normal(10**6)
    _, se = batch_means_mcse(x)
    assert se == pytest.approx(1e-3, rel=0.2)


def test_batch_means_ar1():
    phi, m = 0.9, 10**6
    _, se = batch_means_mcse(ar1(phi, m, 1))
    assert se == pytest.approx(math.sqrt((1 + phi) / (1 - phi)) / math.sqrt(m), rel=0.25)


def test_short_and_nonfinite():
    with pytest.raises(TooShort):
        batch_means_mcse(np.ones(99))
    with pytest.raises(TooShort):
        ess(np.ones(50))
    with pytest.raises(NonFinite):
        batch_means_mcse(np.array([1.0, np.nan] * 100))


@given(arrays(np.float64, st.integers(100, 400), elements=st.floats(-1e6, 1e6)),
       st.integers(0, 2**32 - 1))
def test_batch_mean_is_arithmetic_mean(x, seed):
    mean, _ = batch_means_mcse(x)
    assert mean == float(np.mean(x))
    perm = np.random.default_rng(seed).permutation(x)
    assert batch_means_mcse(perm)[0] == pytest.approx(mean, rel=1e-12, abs=1e-9)


def test_cumulative_average():
    np.testing.assert_allclose(cumulative_average([1.0, 2.0, 3.0]), [1.0, 1.5, 2.0])
    np.testing.assert_allclose(cumulative_average(np.full(10, 2.5)), 2.5)
    x = np.random.default_rng(2).standard_normal(300)
    assert cumulative_average(x)[-1] == pytest.approx(batch_means_mcse(x)[0], rel=1e-12)


def test_ess_cases():
    m = 100_000
    x = np.random.default_rng(3).standard_normal(m)
    assert ess(x) / m == pytest.approx(1.0, rel=0.1)
    alt = np.tile([1.0, -1.0], 500)
    assert ess(alt) == 1000.0
    assert ess(ar1(0.5, m, 4)) / m == pytest.approx(1 / 3, rel=0.2)


@given(arrays(np.float64, st.integers(100, 300), elements=st.floats(-100, 100)))
def test_ess_in_range(x):
    e = ess(x)
    assert 0 < e <= x.size


def test_statistic_names():
    names = statistic_names(3)
    assert len(names) == 11 and names[6] == "1/sigma2" and names[7] == "log tau2"


def test_geweke_small_configs_are_proper():
    for s in ("horseshoe", "regularized", "nishimura"):
        g = default_geweke_config(s)
        assert g.n <= 6 and g.p <= 4
        # 1/sigma2 ~ Gamma(a, b): finite variance; log tau2 finite under every prior used
        assert g.prior.a > 0
    with pytest.raises(ValueError):
        default_geweke_config("job")


@pytest.mark.slow
def test_geweke_power_and_seed_stability():
    rng = np.random.default_rng(10)
    bad = geweke_joint_test("horseshoe", None, 10_000, rng, sigma2_rate_offset=1.0)
    assert np.max(np.abs(bad.z)) > 6
    a = geweke_joint_test("horseshoe", None, 20_000, np.random.default_rng(11))
    b = geweke_joint_test("horseshoe", None, 20_000, np.random.default_rng(12))
    assert not np.allclose(a.z, b.z)
    assert a.passed() and b.passed()
