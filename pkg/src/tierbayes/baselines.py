"""Welch two-sample t-test and the two comparison detectors.

The fixed-threshold detector mimics conventional practice (wait for a
minimum sample size, then test at p < 0.05); the naive detector reports any
p < 0.20 regardless of sample size. Both consume the same pairwise-complete
groups as the progressive engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .dataset import Dataset, PairKey, pair_samples


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    dof: float
    p_value: float
    mean_diff: float
    degenerate: bool = False


def welch_t_test(group1: Sequence[float], group0: Sequence[float]) -> TTestResult:
    """Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.

    Degenerate inputs (fewer than two values in either group, or zero
    variance in both) return ``p = 1.0`` with the degenerate flag set
    instead of raising.
    """
    n1 = len(group1)
    n0 = len(group0)
    s1 = ss1 = 0.0
    for v in group1:
        s1 += v
        ss1 += v * v
    s0 = ss0 = 0.0
    for v in group0:
        s0 += v
        ss0 += v * v
    t, dof, p, mean_diff, degenerate = _kernels.welch_from_suffstats(
        n1, s1, ss1, n0, s0, ss0
    )
    return TTestResult(t, dof, p, mean_diff, bool(degenerate))


def fixed_threshold_detector(
    dataset: Dataset,
    pairs: Sequence[PairKey],
    day: int,
    *,
    min_n: int = 30,
    alpha: float = 0.05,
) -> list[PairKey]:
    """Pairs detected by the conventional rule at ``day``.

    Requires at least ``min_n`` pairwise-complete days in total (across both
    groups) and a Welch p-value below ``alpha``.
    """
    detected = []
    for pair in pairs:
        present, absent = pair_samples(dataset, pair, day)
        if len(present) + len(absent) < min_n:
            continue
        if welch_t_test(present, absent).p_value < alpha:
            detected.append(pair)
    return detected


def naive_detector(
    dataset: Dataset,
    pairs: Sequence[PairKey],
    day: int,
    *,
    alpha: float = 0.20,
) -> list[PairKey]:
    """Pairs detected by the ad-hoc early rule: Welch p < ``alpha`` with any
    group sizes of at least two (the degenerate rule supplies p = 1.0 below
    that)."""
    detected = []
    for pair in pairs:
        present, absent = pair_samples(dataset, pair, day)
        result = welch_t_test(present, absent)
        if not result.degenerate and result.p_value < alpha:
            detected.append(pair)
    return detected
