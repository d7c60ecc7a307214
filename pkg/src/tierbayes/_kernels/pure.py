"""Pure-Python numeric kernels: special functions, Welch statistics, and the
per-day pairwise posterior scan.

This module is the reference implementation. ``_speedups.pyx`` mirrors it
statement-for-statement (same operation order, same libm calls, no
fast-math), so both backends produce identical doubles; the test suite
asserts exact agreement. Keep the two files in sync when editing either.

Special functions are implemented in-repo:

* ``log_gamma``      -- 9-term Lanczos approximation (g = 7).
* ``betainc``        -- regularized incomplete beta via the modified Lentz
                        continued fraction, with the usual symmetry switch at
                        x = (a + 1) / (a + b + 2).
* ``betainc_inv``    -- bracketed Newton iteration on ``betainc``.
* ``student_t_cdf``  -- through ``betainc`` on nu / (nu + x^2).
* ``kolmogorov_sf``  -- complementary Kolmogorov distribution (two series,
                        crossover at 1.18 per Marsaglia et al.).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_MASK64 = (1 << 64) - 1

# Lanczos coefficients, g = 7, n = 9 (relative error ~ 1e-13 on the reals).
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LN_SQRT_TWO_PI = 0.9189385332046727  # log(sqrt(2*pi))
_CF_MAX_ITER = 400
_CF_EPS = 3e-16
_CF_TINY = 1e-300


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # Reflection keeps the Lanczos sum in its accurate range.
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (x + i)
    t = x + 7.5
    return _LN_SQRT_TWO_PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        log_gamma(a + b)
        - log_gamma(a)
        - log_gamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def betainc_inv(a: float, b: float, p: float) -> float:
    """Inverse of ``betainc`` in x, solved by bracketed Newton iteration."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("betainc_inv requires a > 0 and b > 0")
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    lo = 0.0
    hi = 1.0
    x = 0.5
    ln_beta = log_gamma(a) + log_gamma(b) - log_gamma(a + b)
    for _ in range(200):
        f = betainc(a, b, x) - p
        if f > 0.0:
            hi = x
        else:
            lo = x
        if abs(f) < 1e-15 or hi - lo < 1e-16:
            break
        # Newton step, clipped back into the live bracket when it escapes.
        ln_pdf = (a - 1.0) * math.log(x) + (b - 1.0) * math.log(1.0 - x) - ln_beta
        step_ok = ln_pdf > -700.0
        if step_ok:
            x_new = x - f / math.exp(ln_pdf)
            if x_new <= lo or x_new >= hi:
                step_ok = False
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        x = x_new
    return x


def student_t_cdf(x: float, dof: float) -> float:
    """CDF of the Student-t distribution with ``dof`` degrees of freedom."""
    if dof <= 0.0:
        raise ValueError(f"student_t_cdf requires dof > 0, got {dof}")
    if x == 0.0:
        return 0.5
    z = dof / (dof + x * x)
    tail = 0.5 * betainc(0.5 * dof, 0.5, z)
    if x > 0.0:
        return 1.0 - tail
    return tail


def student_t_ppf(p: float, dof: float) -> float:
    """Quantile function of the Student-t distribution."""
    if dof <= 0.0:
        raise ValueError(f"student_t_ppf requires dof > 0, got {dof}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"student_t_ppf requires p in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    tail = p if p < 0.5 else 1.0 - p
    z = betainc_inv(0.5 * dof, 0.5, 2.0 * tail)
    if z <= 0.0:
        return -math.inf if p < 0.5 else math.inf
    x = math.sqrt(dof * (1.0 - z) / z)
    return -x if p < 0.5 else x


def kolmogorov_sf(x: float) -> float:
    """Complementary CDF of the Kolmogorov distribution, Q(x) = P(K > x)."""
    if x <= 0.0:
        return 1.0
    if x < 1.18:
        # Jacobi theta form converges fast for small x.
        t = math.pi * math.pi / (8.0 * x * x)
        total = 0.0
        for k in range(1, 21):
            term = math.exp(-((2 * k - 1) ** 2) * t)
            total += term
            if term < 1e-18 * total:
                break
        return 1.0 - math.sqrt(2.0 * math.pi) / x * total
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = sign * math.exp(-2.0 * k * k * x * x)
        total += term
        if abs(term) < 1e-18:
            break
        sign = -sign
    return max(0.0, 2.0 * total)


def welch_from_suffstats(
    n1: int,
    s1: float,
    ss1: float,
    n0: int,
    s0: float,
    ss0: float,
) -> tuple[float, float, float, float, int]:
    """Welch two-sample test from per-group (count, sum, sum-of-squares).

    Returns ``(t, dof, p_two_sided, mean_diff, degenerate)``. Degenerate
    inputs (a group below two samples, or zero variance in both groups)
    report ``p = 1.0`` with the flag raised rather than erroring.
    """
    mean_diff = 0.0
    if n1 >= 1 and n0 >= 1:
        mean_diff = s1 / n1 - s0 / n0
    if n1 < 2 or n0 < 2:
        return 0.0, 0.0, 1.0, mean_diff, 1
    m1 = s1 / n1
    m0 = s0 / n0
    v1 = (ss1 - n1 * m1 * m1) / (n1 - 1)
    v0 = (ss0 - n0 * m0 * m0) / (n0 - 1)
    if v1 < 0.0:
        v1 = 0.0
    if v0 < 0.0:
        v0 = 0.0
    se2 = v1 / n1 + v0 / n0
    if se2 <= 0.0:
        return 0.0, 0.0, 1.0, mean_diff, 1
    t = mean_diff / math.sqrt(se2)
    dof = se2 * se2 / (
        (v1 / n1) * (v1 / n1) / (n1 - 1) + (v0 / n0) * (v0 / n0) / (n0 - 1)
    )
    p = 2.0 * student_t_cdf(-abs(t), dof)
    return t, dof, p, mean_diff, 0


def pair_scan(
    factor: np.ndarray,
    outcome: np.ndarray,
    coef_variance: float,
    ig_shape: float,
    ig_rate: float,
    ci_level: float,
) -> dict[str, np.ndarray]:
    """Day-by-day posterior and Welch statistics for one factor/outcome pair.

    ``factor`` is int8 per day (1 present, 0 absent, -1 missing) and
    ``outcome`` float64 per day (NaN missing). A day contributes only when
    both are observed. For each day t the returned arrays hold the conjugate
    posterior of the model ``y = b0 + b1 * factor + noise`` fitted to days
    <= t (intercept-and-effect design, normal-inverse-gamma prior with
    coefficient variance ``coef_variance`` and inverse-gamma
    (``ig_shape``, ``ig_rate``)), plus the Welch test on the same two groups.
    """
    span = len(factor)
    keys = (
        "n1",
        "n0",
        "location",
        "scale",
        "dof",
        "prob_positive",
        "ci_lo",
        "ci_hi",
        "intercept",
        "h00",
        "h01",
        "h11",
        "shape",
        "rate",
        "welch_t",
        "welch_dof",
        "welch_p",
        "welch_degenerate",
    )
    out = {k: np.empty(span, dtype=np.float64) for k in keys}
    prior_prec = 1.0 / coef_variance

    n = 0
    n1 = 0
    sy = 0.0
    sy1 = 0.0
    syy = 0.0
    syy1 = 0.0
    for d in range(span):
        f = int(factor[d])
        y = float(outcome[d])
        if f >= 0 and not math.isnan(y):
            n += 1
            sy += y
            syy += y * y
            if f == 1:
                n1 += 1
                sy1 += y
                syy1 += y * y
        lam00 = n + prior_prec
        lam01 = float(n1)
        lam11 = n1 + prior_prec
        det = lam00 * lam11 - lam01 * lam01
        h00 = lam11 / det
        h01 = -lam01 / det
        h11 = lam00 / det
        mu0 = h00 * sy + h01 * sy1
        mu1 = h01 * sy + h11 * sy1
        shape = ig_shape + 0.5 * n
        rate = ig_rate + 0.5 * (syy - (mu0 * sy + mu1 * sy1))
        if rate < 1e-12:
            rate = 1e-12
        dof = 2.0 * shape
        scale = math.sqrt((rate / shape) * h11)
        ppos = 1.0 - student_t_cdf(-mu1 / scale, dof)
        hw = student_t_ppf(0.5 + 0.5 * ci_level, dof) * scale
        n0 = n - n1
        wt, wdof, wp, _, wdeg = welch_from_suffstats(
            n1, sy1, syy1, n0, sy - sy1, syy - syy1
        )

        out["n1"][d] = n1
        out["n0"][d] = n0
        out["location"][d] = mu1
        out["scale"][d] = scale
        out["dof"][d] = dof
        out["prob_positive"][d] = ppos
        out["ci_lo"][d] = mu1 - hw
        out["ci_hi"][d] = mu1 + hw
        out["intercept"][d] = mu0
        out["h00"][d] = h00
        out["h01"][d] = h01
        out["h11"][d] = h11
        out["shape"][d] = shape
        out["rate"][d] = rate
        out["welch_t"][d] = wt
        out["welch_dof"][d] = wdof
        out["welch_p"][d] = wp
        out["welch_degenerate"][d] = wdeg
    return out


def count_uniforms_below(key: int, n: int, cutoff: float) -> int:
    """Count SplitMix64 uniforms from stream ``key`` that fall below ``cutoff``.

    Duplicates the SplitMix64 step from :mod:`tierbayes.rng` so the hot loop
    stays self-contained; the test suite pins the two implementations to each
    other.
    """
    state = key & _MASK64
    count = 0
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        if (z >> 11) * 2.0**-53 < cutoff:
            count += 1
    return count
