"""Independent numerical oracles for the test suite.

Nothing here reuses the package's numeric kernels: the t-density uses the
stdlib ``math.lgamma``, integration is adaptive Simpson, and the posterior
oracle is a dense 2-D grid over (effect, noise variance) with the intercept
integrated out analytically through the rank-one covariance identity -- a
different route than the package's precision-matrix solve.
"""

from __future__ import annotations

import math

import numpy as np


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Adaptive Simpson quadrature with interval bisection."""

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flmid = f(lmid)
        frmid = f(rmid)
        left = simpson(lo, mid, flo, flmid, fmid)
        right = simpson(mid, hi, fmid, frmid, fhi)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, mid, flo, flmid, fmid, left, eps / 2.0, depth - 1) + recurse(
            mid, hi, fmid, frmid, fhi, right, eps / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fmid = f(mid)
    whole = simpson(a, b, fa, fmid, fb)
    return recurse(a, b, fa, fmid, fb, whole, tol, 60)


def t_density(x: float, dof: float) -> float:
    ln = (
        math.lgamma(0.5 * (dof + 1.0))
        - math.lgamma(0.5 * dof)
        - 0.5 * math.log(dof * math.pi)
        - 0.5 * (dof + 1.0) * math.log1p(x * x / dof)
    )
    return math.exp(ln)


def t_cdf_quadrature(x: float, dof: float) -> float:
    """Student-t CDF by integrating the density from 0 to |x|."""
    if x == 0.0:
        return 0.5
    half = adaptive_simpson(lambda u: t_density(u, dof), 0.0, abs(x), tol=1e-13)
    return 0.5 + half if x > 0 else 0.5 - half


def t_ppf_bisection(p: float, dof: float) -> float:
    """Invert the quadrature CDF by bisection.

    Bracket limited to |x| <= 100, which covers p in [1e-4, 1 - 1e-4] for
    dof >= 2 (quadrature over huge intervals is prohibitively slow).
    """
    if p == 0.5:
        return 0.0
    lo, hi = -100.0, 100.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if t_cdf_quadrature(mid, dof) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


class GridPosterior:
    """Dense-grid posterior for y = b0 + b1*x + noise with prior
    b ~ N(0, v*I) and noise variance ~ InverseGamma(a0, b0_rate).

    The intercept is integrated out analytically: given (b1, s2) the
    residual z = y - b1*x is N(0, s2*I + v*J) with J the all-ones matrix,
    whose determinant и quadratic form follow from the rank-one update
    identity. The remaining 2-D density over (b1, s2) is evaluated on a
    dense grid (log-spaced in s2).
    """

    def __init__(
        self,
        x: np.ndarray,
        y: np.ndarray,
        v: float = 10.0,
        a0: float = 2.0,
        b0_rate: float = 1.0,
        b1_range: tuple[float, float] = (-20.0, 20.0),
        n_b1: int = 4001,
        s2_range: tuple[float, float] = (1e-3, 1e3),
        n_s2: int = 1201,
    ) -> None:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n = len(y)
        b1 = np.linspace(b1_range[0], b1_range[1], n_b1)
        log_s2 = np.linspace(math.log(s2_range[0]), math.log(s2_range[1]), n_s2)
        s2 = np.exp(log_s2)

        # z depends on b1: z = y - b1*x; sums reduce to quadratics in b1.
        zz = (y @ y) - 2.0 * b1 * (x @ y) + b1 * b1 * (x @ x)  # (n_b1,)
        zsum = y.sum() - b1 * x.sum()  # (n_b1,)

        s2_col = s2[None, :]
        quad = (zz[:, None] - v * zsum[:, None] ** 2 / (s2_col + n * v)) / s2_col
        log_lik = -0.5 * (
            n * math.log(2.0 * math.pi)
            + (n - 1) * np.log(s2_col)
            + np.log(s2_col + n * v)
            + quad
        )
        log_prior_b1 = -0.5 * (math.log(2.0 * math.pi * v) + b1 * b1 / v)
        log_prior_s2 = (
            a0 * math.log(b0_rate)
            - math.lgamma(a0)
            - (a0 + 1.0) * np.log(s2)
            - b0_rate / s2
        )
        log_post = log_lik + log_prior_b1[:, None] + log_prior_s2[None, :]
        # Integrate over log(s2): weight by s2 (ds2 = s2 d log s2).
        log_post += np.log(s2_col)
        log_post -= log_post.max()
        weights = np.exp(log_post)
        self.b1 = b1
        self.marginal = weights.sum(axis=1)
        self.total = self.marginal.sum()

    def mean(self) -> float:
        return float((self.b1 * self.marginal).sum() / self.total)

    def sd(self) -> float:
        m = self.mean()
        var = float(((self.b1 - m) ** 2 * self.marginal).sum() / self.total)
        return math.sqrt(var)

    def cdf(self, q: float) -> float:
        return float(self.marginal[self.b1 <= q].sum() / self.total)


def ols_group_diff(present: list[float], absent: list[float]) -> float:
    """Two-group OLS effect estimate (difference of means)."""
    return sum(present) / len(present) - sum(absent) / len(absent)
