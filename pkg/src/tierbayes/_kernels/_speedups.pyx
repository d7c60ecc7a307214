# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``pure.py``.

Statement-for-statement mirror of the pure-Python kernels, compiled without
fast-math so both backends evaluate the same IEEE double sequence. Any edit
here must be applied to ``pure.py`` as well (and vice versa); the test suite
asserts exact agreement between the two.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, fabs, isnan, log, pi, sin, sqrt

cnp.import_array()

BACKEND = "compiled"

cdef double _LN_SQRT_TWO_PI = 0.9189385332046727
cdef int _CF_MAX_ITER = 400
cdef double _CF_EPS = 3e-16
cdef double _CF_TINY = 1e-300

cdef double[9] _LANCZOS
_LANCZOS[0] = 0.99999999999980993
_LANCZOS[1] = 676.5203681218851
_LANCZOS[2] = -1259.1392167224028
_LANCZOS[3] = 771.32342877765313
_LANCZOS[4] = -176.61502916214059
_LANCZOS[5] = 12.507343278686905
_LANCZOS[6] = -0.13857109526572012
_LANCZOS[7] = 9.9843695780195716e-6
_LANCZOS[8] = 1.5056327351493116e-7


cdef double _log_gamma(double x) except? -1e308:
    cdef double acc, t
    cdef int i
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        return log(pi / sin(pi * x)) - _log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (x + i)
    t = x + 7.5
    return _LN_SQRT_TWO_PI + (x + 0.5) * log(t) - t + log(acc)


cdef double _betacf(double a, double b, double x):
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _CF_EPS:
            break
    return h


cdef double _betainc(double a, double b, double x) except? -1e308:
    cdef double ln_front, front
    if a <= 0.0 or b <= 0.0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        _log_gamma(a + b)
        - _log_gamma(a)
        - _log_gamma(b)
        + a * log(x)
        + b * log(1.0 - x)
    )
    front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


cdef double _betainc_inv(double a, double b, double p) except? -1e308:
    cdef double lo, hi, x, x_new, ln_beta, f, ln_pdf
    cdef bint step_ok
    cdef int i
    if a <= 0.0 or b <= 0.0:
        raise ValueError("betainc_inv requires a > 0 and b > 0")
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    lo = 0.0
    hi = 1.0
    x = 0.5
    ln_beta = _log_gamma(a) + _log_gamma(b) - _log_gamma(a + b)
    for i in range(200):
        f = _betainc(a, b, x) - p
        if f > 0.0:
            hi = x
        else:
            lo = x
        if fabs(f) < 1e-15 or hi - lo < 1e-16:
            break
        ln_pdf = (a - 1.0) * log(x) + (b - 1.0) * log(1.0 - x) - ln_beta
        step_ok = ln_pdf > -700.0
        if step_ok:
            x_new = x - f / exp(ln_pdf)
            if x_new <= lo or x_new >= hi:
                step_ok = False
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        x = x_new
    return x


cdef double _student_t_cdf(double x, double dof) except? -1e308:
    cdef double z, tail
    if dof <= 0.0:
        raise ValueError(f"student_t_cdf requires dof > 0, got {dof}")
    if x == 0.0:
        return 0.5
    z = dof / (dof + x * x)
    tail = 0.5 * _betainc(0.5 * dof, 0.5, z)
    if x > 0.0:
        return 1.0 - tail
    return tail


cdef double _student_t_ppf(double p, double dof) except? -1e308:
    cdef double tail, z, x
    if dof <= 0.0:
        raise ValueError(f"student_t_ppf requires dof > 0, got {dof}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"student_t_ppf requires p in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    tail = p if p < 0.5 else 1.0 - p
    z = _betainc_inv(0.5 * dof, 0.5, 2.0 * tail)
    if z <= 0.0:
        return -float("inf") if p < 0.5 else float("inf")
    x = sqrt(dof * (1.0 - z) / z)
    return -x if p < 0.5 else x


cdef double _kolmogorov_sf(double x):
    cdef double t, total, term, sign, result
    cdef int k
    if x <= 0.0:
        return 1.0
    if x < 1.18:
        t = pi * pi / (8.0 * x * x)
        total = 0.0
        for k in range(1, 21):
            term = exp(-((2 * k - 1) * (2 * k - 1)) * t)
            total += term
            if term < 1e-18 * total:
                break
        return 1.0 - sqrt(2.0 * pi) / x * total
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = sign * exp(-2.0 * k * k * x * x)
        total += term
        if fabs(term) < 1e-18:
            break
        sign = -sign
    result = 2.0 * total
    if result < 0.0:
        result = 0.0
    return result


def log_gamma(double x):
    """Natural log of the gamma function for x > 0."""
    return _log_gamma(x)


def betainc(double a, double b, double x):
    """Regularized incomplete beta function I_x(a, b)."""
    return _betainc(a, b, x)


def betainc_inv(double a, double b, double p):
    """Inverse of ``betainc`` in x."""
    return _betainc_inv(a, b, p)


def student_t_cdf(double x, double dof):
    """CDF of the Student-t distribution."""
    return _student_t_cdf(x, dof)


def student_t_ppf(double p, double dof):
    """Quantile function of the Student-t distribution."""
    return _student_t_ppf(p, dof)


def kolmogorov_sf(double x):
    """Complementary CDF of the Kolmogorov distribution."""
    return _kolmogorov_sf(x)


def welch_from_suffstats(
    long n1, double s1, double ss1, long n0, double s0, double ss0
):
    """Welch two-sample test from per-group (count, sum, sum-of-squares)."""
    cdef double mean_diff = 0.0
    cdef double m1, m0, v1, v0, se2, t, dof, p
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
    t = mean_diff / sqrt(se2)
    dof = se2 * se2 / (
        (v1 / n1) * (v1 / n1) / (n1 - 1) + (v0 / n0) * (v0 / n0) / (n0 - 1)
    )
    p = 2.0 * _student_t_cdf(-fabs(t), dof)
    return t, dof, p, mean_diff, 0


def pair_scan(
    cnp.ndarray[cnp.int8_t, ndim=1] factor,
    cnp.ndarray[cnp.float64_t, ndim=1] outcome,
    double coef_variance,
    double ig_shape,
    double ig_rate,
    double ci_level,
):
    """Day-by-day posterior and Welch statistics for one factor/outcome pair.

    Same contract as ``pure.pair_scan``.
    """
    cdef Py_ssize_t span = factor.shape[0]
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
    cdef double[:] o_n1 = out["n1"]
    cdef double[:] o_n0 = out["n0"]
    cdef double[:] o_location = out["location"]
    cdef double[:] o_scale = out["scale"]
    cdef double[:] o_dof = out["dof"]
    cdef double[:] o_ppos = out["prob_positive"]
    cdef double[:] o_ci_lo = out["ci_lo"]
    cdef double[:] o_ci_hi = out["ci_hi"]
    cdef double[:] o_intercept = out["intercept"]
    cdef double[:] o_h00 = out["h00"]
    cdef double[:] o_h01 = out["h01"]
    cdef double[:] o_h11 = out["h11"]
    cdef double[:] o_shape = out["shape"]
    cdef double[:] o_rate = out["rate"]
    cdef double[:] o_wt = out["welch_t"]
    cdef double[:] o_wdof = out["welch_dof"]
    cdef double[:] o_wp = out["welch_p"]
    cdef double[:] o_wdeg = out["welch_degenerate"]

    cdef double prior_prec = 1.0 / coef_variance
    cdef long n = 0, n1 = 0, n0
    cdef double sy = 0.0, sy1 = 0.0, syy = 0.0, syy1 = 0.0
    cdef double lam00, lam01, lam11, det, h00, h01, h11
    cdef double mu0, mu1, shape, rate, dof, scale, ppos, hw
    cdef double y, wt, wdof, wp, wdiff
    cdef double m1, m0w, v1, v0, se2
    cdef int f, wdeg
    cdef Py_ssize_t d

    for d in range(span):
        f = factor[d]
        y = outcome[d]
        if f >= 0 and not isnan(y):
            n += 1
            sy += y
            syy += y * y
            if f == 1:
                n1 += 1
                sy1 += y
                syy1 += y * y
        lam00 = n + prior_prec
        lam01 = <double> n1
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
        scale = sqrt((rate / shape) * h11)
        ppos = 1.0 - _student_t_cdf(-mu1 / scale, dof)
        hw = _student_t_ppf(0.5 + 0.5 * ci_level, dof) * scale
        n0 = n - n1

        # Inline of welch_from_suffstats (same operation order).
        wdiff = 0.0
        if n1 >= 1 and n0 >= 1:
            wdiff = sy1 / n1 - (sy - sy1) / n0
        if n1 < 2 or n0 < 2:
            wt = 0.0
            wdof = 0.0
            wp = 1.0
            wdeg = 1
        else:
            m1 = sy1 / n1
            m0w = (sy - sy1) / n0
            v1 = (syy1 - n1 * m1 * m1) / (n1 - 1)
            v0 = ((syy - syy1) - n0 * m0w * m0w) / (n0 - 1)
            if v1 < 0.0:
                v1 = 0.0
            if v0 < 0.0:
                v0 = 0.0
            se2 = v1 / n1 + v0 / n0
            if se2 <= 0.0:
                wt = 0.0
                wdof = 0.0
                wp = 1.0
                wdeg = 1
            else:
                wt = wdiff / sqrt(se2)
                wdof = se2 * se2 / (
                    (v1 / n1) * (v1 / n1) / (n1 - 1)
                    + (v0 / n0) * (v0 / n0) / (n0 - 1)
                )
                wp = 2.0 * _student_t_cdf(-fabs(wt), wdof)
                wdeg = 0

        o_n1[d] = n1
        o_n0[d] = n0
        o_location[d] = mu1
        o_scale[d] = scale
        o_dof[d] = dof
        o_ppos[d] = ppos
        o_ci_lo[d] = mu1 - hw
        o_ci_hi[d] = mu1 + hw
        o_intercept[d] = mu0
        o_h00[d] = h00
        o_h01[d] = h01
        o_h11[d] = h11
        o_shape[d] = shape
        o_rate[d] = rate
        o_wt[d] = wt
        o_wdof[d] = wdof
        o_wp[d] = wp
        o_wdeg[d] = wdeg
    return out


def count_uniforms_below(object key, long n, double cutoff):
    """Count SplitMix64 uniforms from stream ``key`` below ``cutoff``."""
    cdef unsigned long long state = <unsigned long long> key
    cdef unsigned long long z
    cdef long count = 0
    cdef long i
    for i in range(n):
        state = state + 0x9E3779B97F4A7C15ULL
        z = state
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        z = z ^ (z >> 31)
        if (z >> 11) * (2.0 ** -53) < cutoff:
            count += 1
    return count
