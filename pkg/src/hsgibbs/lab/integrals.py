"""Quadrature oracles for the integral lower bounds used in the regularized minorization."""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate


def cauchy_schwarz_sides(f, g, lo: float, hi: float, points=None):
    """(int f/g, (int f)^2 / int f g) by quadrature; the first should dominate."""
    q = lambda h: integrate.quad(h, lo, hi, points=points, limit=400, epsabs=0.0, epsrel=1e-11)[0]
    i_f = q(f)
    i_fg = q(lambda x: f(x) * g(x))
    i_fog = q(lambda x: f(x) / g(x))
    return i_fog, i_f * i_f / i_fg


def nu_integral(K: float, s: float) -> float:
    """int_0^inf nu^-2 exp(-K/nu) / (sqrt(nu) + s) dnu, via nu = K/w."""
    f = lambda w: math.exp(-w) / (math.sqrt(K / w) + s) / K if w > 0 else 0.0
    return integrate.quad(f, 0.0, np.inf, limit=400, epsabs=0.0, epsrel=1e-11)[0]


def nu_integral_sides(d: float, delta: float, lambda2: float, s: float, corrected: bool = True):
    """(integral, claimed lower bound) for the nu-integral with s = sigma2 sqrt(tau2)/beta^2.

    Cauchy-Schwarz gives int >= 1/(K (sqrt(pi K) + s)) with K = 1 + d^(2/delta) + 1/lambda2,
    hence alpha = (1 + d^(2/delta))^-2 / sqrt(pi).  Without the 1/sqrt(pi)
    (``corrected=False``) the bound fails once K is below ~1.27.
    """
    D = d ** (2.0 / delta)
    K = 1.0 + D + 1.0 / lambda2
    alpha = (1.0 + D) ** -2 / (math.sqrt(math.pi) if corrected else 1.0)
    return nu_integral(K, s), alpha * (1.0 + 1.0 / lambda2) ** -2 / (1.0 + s)


def beta_integral_sides_1d(c: float, tau2: float, lambda2: float, sigma2: float, xty: float,
                           omega_star: float):
    """(integral, uncorrected lower bound) for the one-coordinate beta-integral.

    Omega = omega_*(1 + 1/tau2), M = Omega + 1/(tau2 lambda2); the integrand is
    the Gaussian kernel times beta^2/(beta^2 + sigma2 sqrt(tau2)).
    """
    Om = omega_star * (1.0 + 1.0 / tau2)
    M = Om + 1.0 / (tau2 * lambda2)
    m = xty / Om
    ctr, sd = Om * m / M, math.sqrt(sigma2 / M)
    st = math.sqrt(tau2)
    f = lambda b: mp.exp(-((b - m) ** 2 * Om + b * b / (tau2 * lambda2)) / (2 * sigma2)) \
        * b * b / (b * b + sigma2 * st)
    pts = sorted({ctr - 40 * sd, ctr - 5 * sd, ctr, ctr + 5 * sd, ctr + 40 * sd, 0.0})
    lhs = float(mp.quad(f, pts))
    rhs = (math.sqrt(2 * math.pi * sigma2) / c / M / (1 + st / c**2)
           * math.exp(-xty**2 * (c * c + 1 / Om - 2 / M) / (2 * sigma2)))
    return lhs, rhs
