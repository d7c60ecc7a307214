"""Numeric kernel backend selection.

The compiled Cython extension is preferred when importable; the pure-Python
twin is the fallback. Set ``TIERBAYES_PURE=1`` to force the fallback (useful
for debugging and for the backend-comparison benchmark). Both backends
expose the same functions and produce identical results.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("TIERBAYES_PURE", "") not in ("", "0"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND

log_gamma = _impl.log_gamma
betainc = _impl.betainc
betainc_inv = _impl.betainc_inv
student_t_cdf = _impl.student_t_cdf
student_t_ppf = _impl.student_t_ppf
kolmogorov_sf = _impl.kolmogorov_sf
welch_from_suffstats = _impl.welch_from_suffstats
pair_scan = _impl.pair_scan
count_uniforms_below = _impl.count_uniforms_below


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'pure')."""
    return BACKEND
