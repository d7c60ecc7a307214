"""Daily confidence-tier classification for factor/outcome pairs.

Each analyzed day, every pair is assigned one of four ordered tiers:

* ``correlation`` -- the credible interval excludes zero and the Welch
  p-value beats the day's adaptive threshold;
* ``pattern``     -- directional posterior mass exceeds the pattern
  threshold and the posterior has been stable (small Gaussian KL against
  the marginal from ``kl_window_days`` earlier);
* ``clue``        -- directional posterior mass exceeds the clue threshold;
* ``null``        -- none of the above.

Branches are evaluated top-down; tiers may regress on later days. An
optional posterior predictive gate can additionally demote correlation
candidates whose predictive coverage falls short.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Mapping, Sequence

from . import _kernels
from .conjugate import (
    CoefficientMarginal,
    PriorConfig,
    credible_interval,
    kl_stability,
    prob_positive,
    student_t_ppf,
)
from .dataset import Dataset, PairKey, pair_arrays


class Tier(IntEnum):
    NULL = 0
    CLUE = 1
    PATTERN = 2
    CORRELATION = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Tier":
        return cls[label.upper()]


DEFAULT_ADAPTIVE_SCHEDULE: tuple[tuple[int, float], ...] = (
    (1, 0.30),
    (8, 0.20),
    (14, 0.15),
    (30, 0.10),
)


@dataclass(frozen=True)
class EngineConfig:
    clue_mass: float = 0.70
    pattern_mass: float = 0.85
    ci_level: float = 0.95
    kl_window_days: int = 7
    kl_threshold: float = 0.1
    adaptive_schedule: tuple[tuple[int, float], ...] = DEFAULT_ADAPTIVE_SCHEDULE
    ppc_gate_enabled: bool = False
    ppc_min_coverage: float = 0.90

    def __post_init__(self) -> None:
        if not 0.5 < self.clue_mass < self.pattern_mass < 1.0:
            raise ValueError("need 0.5 < clue_mass < pattern_mass < 1")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must be in (0, 1)")
        if self.kl_threshold <= 0:
            raise ValueError("kl_threshold must be > 0")
        if self.kl_window_days < 1:
            raise ValueError("kl_window_days must be >= 1")
        if not self.adaptive_schedule:
            raise ValueError("adaptive_schedule must be non-empty")
        days = [d for d, _ in self.adaptive_schedule]
        thresholds = [t for _, t in self.adaptive_schedule]
        if days != sorted(days) or len(set(days)) != len(days):
            raise ValueError("adaptive_schedule days must be strictly increasing")
        if any(a < b for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("adaptive_schedule thresholds must be non-increasing")


@dataclass(frozen=True)
class TimelineEntry:
    day: int
    tier: Tier
    location: float
    ci_lo: float
    ci_hi: float
    prob_directional: float
    p_value: float
    kl_vs_lag: float | None


@dataclass(frozen=True)
class TierTimeline:
    pair: PairKey
    entries: tuple[TimelineEntry, ...]


def adaptive_threshold(
    day: int, schedule: Sequence[tuple[int, float]] = DEFAULT_ADAPTIVE_SCHEDULE
) -> float:
    """Piecewise-constant p-value threshold for the given (1-based) day."""
    if day < 1:
        raise ValueError(f"day must be >= 1, got {day}")
    if not schedule:
        raise ValueError("empty adaptive schedule")
    threshold = schedule[0][1]
    for lower_bound, value in schedule:
        if day >= lower_bound:
            threshold = value
        else:
            break
    return threshold


def _decide(
    ci_excludes_zero: bool,
    p_value: float,
    p_threshold: float,
    mass: float,
    stable: bool | None,
    config: EngineConfig,
    ppc_coverage: float | None,
) -> Tier:
    """Shared top-down branch logic. ``stable`` is None when no lagged
    marginal exists (disables the pattern branch)."""
    if ci_excludes_zero and p_value < p_threshold:
        gate_ok = True
        if config.ppc_gate_enabled:
            gate_ok = ppc_coverage is not None and ppc_coverage >= config.ppc_min_coverage
        if gate_ok:
            return Tier.CORRELATION
    if mass > config.pattern_mass and stable is not None and stable:
        return Tier.PATTERN
    if mass > config.clue_mass:
        return Tier.CLUE
    return Tier.NULL


def classify_tier(
    marginal: CoefficientMarginal,
    lagged: CoefficientMarginal | None,
    day: int,
    p_value: float,
    config: EngineConfig,
    *,
    ppc_coverage: float | None = None,
) -> Tier:
    """Assign the confidence tier for one pair on one day.

    ``ppc_coverage`` is only consulted when the config enables the
    posterior predictive gate; ``None`` then counts as failing the gate.
    """
    if not 0.0 <= p_value <= 1.0:
        raise ValueError(f"p_value must be in [0, 1], got {p_value}")
    p_pos = prob_positive(marginal)
    mass = max(p_pos, 1.0 - p_pos)
    lo, hi = credible_interval(marginal, config.ci_level)
    stable: bool | None = None
    if lagged is not None:
        if marginal.dof > 2 and lagged.dof > 2:
            stable = kl_stability(marginal, lagged) < config.kl_threshold
        else:
            stable = False  # undefined stability counts as unstable
    return _decide(
        lo > 0.0 or hi < 0.0,
        p_value,
        adaptive_threshold(day, config.adaptive_schedule),
        mass,
        stable,
        config,
        ppc_coverage,
    )


def run_engine(
    dataset: Dataset,
    pairs: Sequence[PairKey],
    prior: PriorConfig,
    config: EngineConfig,
) -> dict[PairKey, TierTimeline]:
    """Replay the daily classification over the whole dataset.

    For each day t and pair, the pairwise posterior is the exact conjugate
    fit to all pairwise-complete days <= t; the p-value is the Welch test on
    the same two groups; the stability comparison uses the stored marginal
    from calendar day t - kl_window_days regardless of whether that day
    added data. Deterministic given its inputs.
    """
    if not pairs:
        raise ValueError("pairs must be non-empty")
    span = dataset.span
    w = config.kl_window_days
    timelines: dict[PairKey, TierTimeline] = {}
    for pair in pairs:
        factor, outcome = pair_arrays(dataset, pair)
        scan = _kernels.pair_scan(
            factor,
            outcome,
            prior.coefficient_variance,
            prior.ig_shape,
            prior.ig_rate,
            config.ci_level,
        )
        coverage_cache: dict[int, float] = {}
        entries = []
        for day in range(1, span + 1):
            i = day - 1
            mass = max(scan["prob_positive"][i], 1.0 - scan["prob_positive"][i])
            p_value = float(scan["welch_p"][i])
            lag = day - w
            kl: float | None = None
            stable: bool | None = None
            if lag >= 1:
                j = lag - 1
                if scan["dof"][i] > 2 and scan["dof"][j] > 2:
                    cur = CoefficientMarginal(
                        float(scan["location"][i]),
                        float(scan["scale"][i]),
                        float(scan["dof"][i]),
                    )
                    prev = CoefficientMarginal(
                        float(scan["location"][j]),
                        float(scan["scale"][j]),
                        float(scan["dof"][j]),
                    )
                    kl = kl_stability(cur, prev)
                    stable = kl < config.kl_threshold
                else:
                    stable = False
            ppc_coverage: float | None = None
            ci_excludes = scan["ci_lo"][i] > 0.0 or scan["ci_hi"][i] < 0.0
            if (
                config.ppc_gate_enabled
                and ci_excludes
                and p_value < adaptive_threshold(day, config.adaptive_schedule)
            ):
                if day not in coverage_cache:
                    coverage_cache[day] = _scan_coverage(
                        scan, i, factor, outcome, day, config.ci_level
                    )
                ppc_coverage = coverage_cache[day]
            tier = _decide(
                bool(ci_excludes),
                p_value,
                adaptive_threshold(day, config.adaptive_schedule),
                float(mass),
                stable,
                config,
                ppc_coverage,
            )
            entries.append(
                TimelineEntry(
                    day=day,
                    tier=tier,
                    location=float(scan["location"][i]),
                    ci_lo=float(scan["ci_lo"][i]),
                    ci_hi=float(scan["ci_hi"][i]),
                    prob_directional=float(mass),
                    p_value=p_value,
                    kl_vs_lag=kl,
                )
            )
        timelines[pair] = TierTimeline(pair, tuple(entries))
    return timelines


def _scan_coverage(
    scan: Mapping[str, object],
    i: int,
    factor,
    outcome,
    day: int,
    level: float,
) -> float:
    """In-sample predictive coverage at day ``day`` from scan state.

    The pairwise design has only two distinct rows ([1, 0] and [1, 1]), so
    the two predictive intervals are computed once each.
    """
    import math

    shape = float(scan["shape"][i])
    rate = float(scan["rate"][i])
    dof = 2.0 * shape
    mu0 = float(scan["intercept"][i])
    mu1_total = mu0 + float(scan["location"][i])
    h00 = float(scan["h00"][i])
    h01 = float(scan["h01"][i])
    h11 = float(scan["h11"][i])
    tq = student_t_ppf(0.5 + 0.5 * level, dof)
    # x^T H x for x = [1, 0] and [1, 1]
    quad0 = h00
    quad1 = h00 + 2.0 * h01 + h11
    hw0 = tq * math.sqrt((rate / shape) * (1.0 + quad0))
    hw1 = tq * math.sqrt((rate / shape) * (1.0 + quad1))
    inside = 0
    total = 0
    for d in range(day):
        f = int(factor[d])
        y = float(outcome[d])
        if f < 0 or math.isnan(y):
            continue
        total += 1
        center, hw = (mu1_total, hw1) if f == 1 else (mu0, hw0)
        if center - hw <= y <= center + hw:
            inside += 1
    return inside / total if total else 0.0


def first_attainment(timeline: TierTimeline, tier: Tier) -> int | None:
    """Smallest day whose assigned tier is at least ``tier``; None if never."""
    for entry in timeline.entries:
        if entry.tier >= tier:
            return entry.day
    return None


TIMELINE_CSV_HEADER = ("day", "tier", "location", "ci_lo", "ci_hi", "prob_dir", "p_value", "kl")


def write_timeline_csv(timeline: TierTimeline, path: str | Path) -> None:
    """Serialize a timeline (also the plot-data export for contraction traces)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMELINE_CSV_HEADER)
        for e in timeline.entries:
            writer.writerow(
                [
                    e.day,
                    e.tier.label,
                    repr(e.location),
                    repr(e.ci_lo),
                    repr(e.ci_hi),
                    repr(e.prob_directional),
                    repr(e.p_value),
                    "" if e.kl_vs_lag is None else repr(e.kl_vs_lag),
                ]
            )
