"""Independent mpmath evaluations whose values are frozen into the test suite.

Nothing here imports hsgibbs; rerun to regenerate the constants quoted in tests/.
"""
import mpmath as mp

mp.mp.dps = 40


def gamma_d0(d):
    return mp.gamma(1 - d / 2) * mp.gamma((1 + d) / 2) / mp.sqrt(mp.pi)


def gamma_d1(d):
    t1 = mp.gamma(1 - d / 2) ** (-2 / d)
    t2 = mp.pi ** (1 / d) * mp.gamma((1 - d) / 2) ** (-2 / d)
    return mp.gamma(1 + d / 2) * (t1 + t2) ** (-d / 2)


def inv_c(k):
    """1/c(tau2) for k = tau2/c^2 with a half-Cauchy(0, 1) local prior."""
    f = lambda lam: 2 / (mp.pi * (1 + lam**2)) / mp.sqrt(1 + k * lam**2)
    return mp.quad(f, [0, 1, mp.inf])


def c1_half_cauchy(delta, eps, a, b, n, yty):
    """C1 with tau ~ C+(0, 1): the prior on u = tau^2 is 1/(pi sqrt(u) (1+u))."""
    pdf = lambda u: 1 / (mp.pi * mp.sqrt(u) * (1 + u))
    num = mp.quad(lambda u: u ** (delta / 2) * pdf(u), [eps, mp.inf])
    den = mp.quad(pdf, [0, eps])
    return eps ** (delta / 2) + (1 + yty / b) ** (a + mp.mpf(n) / 2) * num / den


def young_ratio(c, tau2, R, delta):
    """E[X^d] / E[sqrt(c^-2 + X^2)] with tau2 X^2 ~ Gamma(1/2, rate R)."""
    dens = lambda w: mp.sqrt(R) / mp.gamma(0.5) * w ** -0.5 * mp.exp(-R * w)
    num = mp.quad(lambda w: (w / tau2) ** (delta / 2) * dens(w), [0, 1 / R, mp.inf])
    den = mp.quad(lambda w: mp.sqrt(c**-2 + w / tau2) * dens(w), [0, 1 / R, mp.inf])
    return num / den


def nu_integral(K, s):
    return mp.quad(lambda v: v**-2 * mp.exp(-K / v) / (mp.sqrt(v) + s), [0, K, mp.inf])


if __name__ == "__main__":
    root = mp.findroot(lambda d: gamma_d1(d) - 1, 0.22)
    print("gamma_d1 root", mp.nstr(root, 15))
    print("log gamma_d1(0.0016)", mp.nstr(mp.log(gamma_d1(mp.mpf("0.0016"))), 15))
    print("log gamma_d1(1e-3)", mp.nstr(mp.log(gamma_d1(mp.mpf("1e-3"))), 15))
    print("gamma_d1(1e-7)", mp.nstr(gamma_d1(mp.mpf("1e-7")), 15))
    print("gamma_d1(0.1)", mp.nstr(gamma_d1(mp.mpf("0.1")), 15))
    print("gamma_d0(0.1)", mp.nstr(gamma_d0(mp.mpf("0.1")), 15))
    print("gamma_d0(1e-6)", mp.nstr(gamma_d0(mp.mpf("1e-6")), 20))
    for k in ("0.1", "1", "10"):
        print("c(k=%s)" % k, mp.nstr(1 / inv_c(mp.mpf(k)), 15))
    print("C1(delta=.1, eps=1, a=b=1, n=5, yty=2)",
          mp.nstr(c1_half_cauchy(mp.mpf("0.1"), 1, 1, 1, 5, 2), 15))
    print("young(c=1, tau2=1, R=0.5, d=0.1)", mp.nstr(young_ratio(1, 1, mp.mpf("0.5"), mp.mpf("0.1")), 15))
    print("nu_integral(K=1, s=0)", mp.nstr(nu_integral(1, 0), 15))
    print("M(c=1,tau2=1,R=1)", mp.nstr(2 * mp.sqrt(mp.pi) + 2, 15))
