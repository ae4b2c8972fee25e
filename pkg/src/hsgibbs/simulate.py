"""Synthetic regression data: 20 nonzero coefficients on a doubling scale."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameter
from .model import Dataset, validate_dataset

N_SIGNALS = 20
NOISE_SD = 0.1


def true_beta(p: int) -> np.ndarray:
    """beta_j = 2^{s_j}, s = 20 equally spaced points from -3.5 to 3 (both ends kept)."""
    if p < N_SIGNALS:
        raise InvalidParameter(f"p must be >= {N_SIGNALS}")
    beta = np.zeros(p)
    beta[:N_SIGNALS] = 2.0 ** np.linspace(-3.5, 3.0, N_SIGNALS)
    return beta


def simulate_data(n: int, p: int, seed: int) -> Dataset:
    if n < N_SIGNALS:
        raise InvalidParameter(f"n must be >= {N_SIGNALS}")
    beta0 = true_beta(p)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X @ beta0 + NOISE_SD * rng.standard_normal(n)
    return validate_dataset(y, X)
