"""Numeric oracles for the uniform matrix bounds behind the bounded conditional mean.

Each check runs over random diagonal Delta with log-uniform entries in
[1e-8, 1e8].  Products and inverses go through the QR of [X; diag(sqrt(Delta))]
so huge and tiny entries keep their relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameter
from ..model import DesignCache

LOG10_RANGE = (-8.0, 8.0)
SM_TOL = 1e-8
ESCALATE_ABOVE = 1e-9
ARB_PREC = 256


def random_deltas(rng: np.random.Generator, trials: int, p: int) -> np.ndarray:
    lo, hi = LOG10_RANGE
    return 10.0 ** rng.uniform(lo, hi, (trials, p))


def _stacked_R(X: np.ndarray, D: np.ndarray) -> np.ndarray:
    m, p = D.shape
    G = np.concatenate([np.broadcast_to(X, (m,) + X.shape), np.sqrt(D)[:, :, None] * np.eye(p)],
                       axis=1)
    return np.linalg.qr(G, mode="r")


def _solve_normal(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(R'R)^-1 B for stacked upper-triangular R."""
    z = np.linalg.solve(np.swapaxes(R, -1, -2), B)
    return np.linalg.solve(R, z)


# --------------------------------------------------- (i) quadratic-form bound

def quadratic_form_bound(cache: DesignCache, lam_min: float) -> float:
    """y'y - |P_{U-perp} y|^2 - sum lam u_i^2/(d_i^2 + lam), with u = U'y from the SVD.

    U'y = D^-1 V' X'y, so the cached X'y and y'y suffice.
    """
    u = (cache.Vt @ cache.xty) / cache.d
    perp = cache.yty - float(u @ u)
    return cache.yty - perp - float(np.sum(lam_min * u * u / (cache.d**2 + lam_min)))


# ------------------------------------------------ (ii) rank-one aggregation

def aggregation_terms(xtx: np.ndarray, lam: np.ndarray, sign: float = 1.0, ops=None):
    """Both sides of the telescoped Sherman-Morrison identity

        (X'X + L)^-1 = (X'X + l I)^-1 - sum_j (l_j - l) B_j^-1 e_j e_j' B_j^-1
                                              / (1 + sign (l_j - l) e_j' B_j^-1 e_j)

    with l = min(L), L sorted ascending and B_j = X'X + L_(j), L_(j) having its
    first j entries set to l.  The correct rank-one update has sign = +1.
    ``ops`` supplies (inv, zeros, eye) so the same code runs in float64 or arb.
    """
    inv, zeros, eye = ops or (np.linalg.inv, lambda p: np.zeros((p, p)), np.eye)
    order = np.argsort(lam, kind="stable")
    lam_s = [lam[k] for k in order]
    A = [[xtx[i][j] for j in order] for i in order]  # permute to match the sorted L
    p = len(lam_s)
    lmin = lam_s[0]

    def mat(diag):
        M = [[A[i][j] + (diag[i] if i == j else 0) for j in range(p)] for i in range(p)]
        return M

    lhs = inv(mat(lam_s))
    rhs = inv(mat([lmin] * p))
    for j in range(1, p + 1):
        diag = [lmin] * j + lam_s[j:]
        Bi = inv(mat(diag))
        w = lam_s[j - 1] - lmin
        col = [Bi[r][j - 1] for r in range(p)]
        den = 1 + sign * w * Bi[j - 1][j - 1]
        for r in range(p):
            for c in range(p):
                rhs[r][c] = rhs[r][c] - w * col[r] * col[c] / den
    return lhs, rhs


def _float_inv(M):
    return [list(r) for r in np.linalg.inv(np.array(M, dtype=float))]


def _rel_err(lhs, rhs) -> float:
    L = np.array([[float(v) for v in r] for r in lhs])
    Rm = np.array([[float(v) for v in r] for r in rhs])
    return float(np.max(np.abs(L - Rm)) / np.max(np.abs(L)))


def _qr_inv_factory(X: np.ndarray, xtx_sorted_order):
    """float64 inverse of X'X + diag(d) via the QR of [X; diag(sqrt(d))], columns pre-permuted."""
    Xs = X[:, xtx_sorted_order]
    p = Xs.shape[1]

    def inv(M):
        d = np.array([M[i][i] for i in range(p)]) - np.einsum("ij,ij->j", Xs, Xs)
        R = np.linalg.qr(np.vstack([Xs, np.diag(np.sqrt(np.maximum(d, 0.0)))]), mode="r")
        Ri = np.linalg.solve(R, np.eye(p))
        return [list(r) for r in Ri @ Ri.T]

    return inv


def aggregation_error(xtx: np.ndarray, lam: np.ndarray, sign: float = 1.0,
                      escalate: bool = True, X: np.ndarray | None = None):
    """(relative error, route): float64 first, arb at 256 bits when float64 is inconclusive.

    With ``X`` given the float64 inverses go through QR instead of forming X'X + L.
    """
    finv = _float_inv if X is None else _qr_inv_factory(X, np.argsort(lam, kind="stable"))
    lhs, rhs = aggregation_terms(xtx, lam, sign, ops=(finv, None, None))
    err = _rel_err(lhs, rhs)
    if err <= ESCALATE_ABOVE or not escalate:
        return err, "float64"
    import flint

    old = flint.ctx.prec
    flint.ctx.prec = ARB_PREC
    try:
        A = [[flint.arb(float(v)) for v in row] for row in xtx]
        L = [flint.arb(float(v)) for v in lam]

        def arb_inv(M):
            Mi = flint.arb_mat(M).inv()
            return [[Mi[i, j] for j in range(Mi.ncols())] for i in range(Mi.nrows())]

        lhs, rhs = aggregation_terms(A, L, sign, ops=(arb_inv, None, None))
        # rank the arb values via their midpoints; 256 bits leaves ~60 digits to spare
        Lm = np.array([[float(v.mid()) for v in r] for r in lhs])
        diff = np.array([[float((a - b).mid()) for a, b in zip(r1, r2)] for r1, r2 in zip(lhs, rhs)])
        return float(np.max(np.abs(diff)) / np.max(np.abs(Lm))), "arb256"
    finally:
        flint.ctx.prec = old


# --------------------------------------------------------------- the suite

@dataclass
class CheckResult:
    name: str
    passed: bool
    failures: int
    detail: dict = field(default_factory=dict)


@dataclass
class MatrixSuiteReport:
    n: int
    p: int
    trials: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "trials": self.trials, "passed": self.passed,
                "checks": [vars(c) for c in self.checks]}


def _running_max_increase(values: np.ndarray) -> float:
    run = np.maximum.accumulate(values)
    k = int(0.9 * run.size) - 1
    return float((run[-1] - run[k]) / run[k]) if run[k] > 0 else 0.0


def matrix_bound_suite(cache: DesignCache, trials: int, rng: np.random.Generator,
                       batch: int = 2000) -> MatrixSuiteReport:
    """Run the four checks over ``trials`` random Delta; failures are counted, never raised."""
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    X = cache.X
    n, p = X.shape
    xty, yty = cache.xty, cache.yty
    D = random_deltas(rng, trials, p)

    qf_fail, qf_worst = 0, -np.inf
    diag_fail, diag_lo, diag_hi = 0, np.inf, -np.inf
    max_ent = np.empty(trials)
    max_mu = np.empty(trials)
    for s in range(0, trials, batch):
        Db = D[s:s + batch]
        R = _stacked_R(X, Db)
        mu = _solve_normal(R, np.broadcast_to(xty, Db.shape)[..., None])[..., 0]
        quad = mu @ xty
        bound = np.array([quadratic_form_bound(cache, float(d.min())) for d in Db])
        slack = (quad - bound) / yty
        qf_fail += int(np.sum(slack > 1e-10))
        qf_worst = max(qf_worst, float(slack.max()))
        # (X'X + D)^-1 D
        M = _solve_normal(R, Db[:, None, :] * np.eye(p))
        dg = np.diagonal(M, axis1=1, axis2=2)
        diag_fail += int(np.sum((dg < -1e-9) | (dg > 1 + 1e-9)))
        diag_lo, diag_hi = min(diag_lo, float(dg.min())), max(diag_hi, float(dg.max()))
        max_ent[s:s + len(Db)] = np.max(np.abs(M), axis=(1, 2))
        max_mu[s:s + len(Db)] = np.max(np.abs(mu), axis=1)

    sm_worst, sm_fail, escalated = 0.0, 0, 0
    for d in D:
        err, route = aggregation_error(cache.xtx, d, X=X)
        escalated += route != "float64"
        sm_fail += err >= SM_TOL
        sm_worst = max(sm_worst, err)

    inc_ent = _running_max_increase(max_ent)
    inc_mu = _running_max_increase(max_mu)
    report = MatrixSuiteReport(n, p, trials)
    report.checks = [
        CheckResult("quadratic_form_bound", qf_fail == 0, qf_fail, {"max_relative_slack": qf_worst}),
        CheckResult("rank_one_aggregation", sm_fail == 0, sm_fail,
                    {"max_relative_error": sm_worst, "escalated_to_arb": escalated}),
        CheckResult("diagonal_in_unit_interval", diag_fail == 0, diag_fail,
                    {"min": diag_lo, "max": diag_hi}),
        CheckResult("running_max_stabilizes", inc_ent < 0.01 and inc_mu < 0.01,
                    int(inc_ent >= 0.01) + int(inc_mu >= 0.01),
                    {"entries_last_decile_increase": inc_ent, "mean_last_decile_increase": inc_mu,
                     "entries_max": float(max_ent.max()), "mean_max": float(max_mu.max())}),
    ]
    return report


def two_by_two_offdiagonal(A: np.ndarray, d1: float, d2: float):
    """(|e1'(A + Delta)^-1 Delta e2|, |a21|/a11) for a 2x2 Gram matrix A."""
    A = np.asarray(A, dtype=float)
    M = np.linalg.solve(A + np.diag([d1, d2]), np.diag([d1, d2]))
    bound = abs(A[1, 0]) / A[0, 0] if A[0, 0] > 0 else 0.0
    return float(abs(M[0, 1])), float(bound)
