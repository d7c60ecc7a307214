"""Kernel accuracy against independent quadrature oracles, plus exact
agreement between the pure and compiled backends."""

import math

import numpy as np
import pytest

from oracles import t_cdf_quadrature, t_ppf_bisection
from tierbayes._kernels import pure
from tierbayes.rng import Stream

try:
    from tierbayes._kernels import _speedups

    BACKENDS = [pure, _speedups]
except ImportError:  # compiled extension not built
    _speedups = None
    BACKENDS = [pure]

backend = pytest.fixture(params=BACKENDS, ids=lambda b: b.BACKEND)(lambda request: request.param)

CDF_POINTS = [
    (x, dof)
    for dof in (1.0, 4.0, 30.0, 1000.0)
    for x in (-8.0, -4.0, -2.0, -1.0, -0.5, -0.1, 0.25, 0.7, 1.3, 2.0, 3.5, 6.0)
]


def test_t_cdf_against_quadrature(backend):
    for x, dof in CDF_POINTS:
        assert backend.student_t_cdf(x, dof) == pytest.approx(
            t_cdf_quadrature(x, dof), abs=1e-9
        )


def test_t_cdf_basic_identities(backend):
    assert backend.student_t_cdf(0.0, 3.0) == 0.5
    for dof in (1.0, 4.0, 30.0):
        for x in (0.2, 1.1, 3.0):
            assert backend.student_t_cdf(-x, dof) == pytest.approx(
                1.0 - backend.student_t_cdf(x, dof), abs=1e-14
            )
    values = [backend.student_t_cdf(x, 5.0) for x in np.linspace(-10, 10, 101)]
    assert values == sorted(values)


def test_t_cdf_normal_limit(backend):
    assert backend.student_t_cdf(1.0, 1e6) == pytest.approx(0.84134, abs=1e-4)


def test_t_cdf_rejects_bad_dof(backend):
    with pytest.raises(ValueError):
        backend.student_t_cdf(1.0, 0.0)
    with pytest.raises(ValueError):
        backend.student_t_cdf(1.0, -3.0)


def test_t_ppf_roundtrip_and_references(backend):
    for dof in (1.0, 4.0, 30.0, 1000.0):
        for p in (0.01, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999):
            x = backend.student_t_ppf(p, dof)
            assert backend.student_t_cdf(x, dof) == pytest.approx(p, abs=1e-10)
    assert backend.student_t_ppf(0.975, 4.0) == pytest.approx(2.7764451, abs=1e-5)
    assert backend.student_t_ppf(0.975, 1e6) == pytest.approx(1.95996, abs=1e-3)
    assert backend.student_t_ppf(0.005, 5.0) == pytest.approx(
        t_ppf_bisection(0.005, 5.0), abs=1e-6
    )
    with pytest.raises(ValueError):
        backend.student_t_ppf(0.0, 4.0)
    with pytest.raises(ValueError):
        backend.student_t_ppf(0.5, -1.0)


def test_betainc_inverse_roundtrip(backend):
    for a in (0.5, 2.0, 15.0, 500.0):
        for b in (0.5, 2.0, 40.0):
            for p in (1e-6, 0.02, 0.4, 0.97, 1 - 1e-6):
                x = backend.betainc_inv(a, b, p)
                assert backend.betainc(a, b, x) == pytest.approx(p, abs=1e-10)


def test_log_gamma_recurrence(backend):
    # Gamma(x+1) = x * Gamma(x), checked in log space across the range.
    for x in (0.1, 0.7, 1.5, 4.2, 37.0, 512.5):
        assert backend.log_gamma(x + 1.0) == pytest.approx(
            backend.log_gamma(x) + math.log(x), rel=1e-12, abs=1e-12
        )
    assert backend.log_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
    assert backend.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-13)


def test_kolmogorov_reference_values(backend):
    # Reference values from the standard Kolmogorov distribution table.
    refs = {
        0.5: 0.9639452436648751,
        1.0: 0.2699996716773238,
        1.36: 0.049055382487399954,
        2.0: 0.0006709252558050855,
    }
    for x, q in refs.items():
        assert backend.kolmogorov_sf(x) == pytest.approx(q, abs=1e-9)
    assert backend.kolmogorov_sf(0.0) == 1.0
    assert backend.kolmogorov_sf(-1.0) == 1.0


def test_welch_known_example(backend):
    g1 = [5.0, 6.0, 7.0]
    g0 = [1.0, 2.0, 3.0]
    t, dof, p, diff, degenerate = backend.welch_from_suffstats(
        3, sum(g1), sum(v * v for v in g1), 3, sum(g0), sum(v * v for v in g0)
    )
    assert not degenerate
    assert t == pytest.approx(4.898979, abs=1e-5)
    assert dof == pytest.approx(4.0, abs=1e-9)
    assert p == pytest.approx(0.0081, abs=1e-3)
    assert diff == pytest.approx(4.0, abs=1e-12)


def test_welch_degenerate_inputs(backend):
    # Below two samples per group.
    assert backend.welch_from_suffstats(1, 5.0, 25.0, 3, 6.0, 14.0)[2:] == (1.0, -3.0 + 5.0, 1)
    # Zero variance in both groups.
    t, dof, p, diff, degenerate = backend.welch_from_suffstats(
        2, 10.0, 50.0, 2, 10.0, 50.0
    )
    assert (p, degenerate) == (1.0, 1)


def _random_pair_arrays(seed: int, span: int = 60):
    stream = Stream(seed)
    factor = np.empty(span, dtype=np.int8)
    outcome = np.empty(span, dtype=np.float64)
    for d in range(span):
        u = stream.uniform()
        factor[d] = -1 if u < 0.15 else (1 if u < 0.6 else 0)
        v = stream.uniform()
        outcome[d] = np.nan if v < 0.1 else 1.0 + 9.0 * stream.uniform()
    return factor, outcome


@pytest.mark.skipif(_speedups is None, reason="compiled backend unavailable")
def test_backends_agree_exactly():
    for x, dof in CDF_POINTS:
        assert pure.student_t_cdf(x, dof) == _speedups.student_t_cdf(x, dof)
    for p in (0.01, 0.3, 0.5, 0.7, 0.995):
        for dof in (1.0, 4.0, 200.0):
            assert pure.student_t_ppf(p, dof) == _speedups.student_t_ppf(p, dof)
    for x in (0.3, 0.9, 1.18, 2.5):
        assert pure.kolmogorov_sf(x) == _speedups.kolmogorov_sf(x)
    assert pure.welch_from_suffstats(5, 25.0, 130.0, 4, 12.0, 40.0) == (
        _speedups.welch_from_suffstats(5, 25.0, 130.0, 4, 12.0, 40.0)
    )
    for seed in (11, 22, 33):
        factor, outcome = _random_pair_arrays(seed)
        a = pure.pair_scan(factor, outcome, 10.0, 2.0, 1.0, 0.95)
        b = _speedups.pair_scan(factor, outcome, 10.0, 2.0, 1.0, 0.95)
        assert set(a) == set(b)
        for key in a:
            np.testing.assert_array_equal(a[key], b[key], err_msg=key)
    for key in (0, 123456789, 2**63):
        for cutoff in (0.0, 0.25, 0.999):
            assert pure.count_uniforms_below(key, 500, cutoff) == (
                _speedups.count_uniforms_below(key, 500, cutoff)
            )


def test_count_uniforms_matches_stream(backend):
    key = 424242
    cutoff = 0.37
    stream = Stream(key)
    expected = sum(1 for _ in range(2000) if stream.uniform() < cutoff)
    assert backend.count_uniforms_below(key, 2000, cutoff) == expected
