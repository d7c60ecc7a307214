"""Plausibility scoring, confounder detection, and insight assembly.

A discovered association earns a plausibility score in [0.1, 0.95]: the
product of a statistical term (1 - p), a valence-consistency multiplier
(does the sign match domain expectation?), and an effect-size bonus,
penalized once if a co-occurring stronger factor looks like a confounder.
Scores below 0.60 raise a human-review flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .dataset import Dataset, PairKey
from .tiers import Tier, TierTimeline

SIGN_POSITIVE = "positive"
SIGN_NEGATIVE = "negative"
SIGN_UNKNOWN = "unknown"
_VALID_SIGNS = (SIGN_POSITIVE, SIGN_NEGATIVE, SIGN_UNKNOWN)

PSI_FLOOR = 0.1
PSI_CEILING = 0.95
REVIEW_THRESHOLD = 0.60
CONFOUNDER_PENALTY = 0.75
CONFOUNDER_CO_OCCURRENCE = 0.60
CONFOUNDER_STRENGTH_RATIO = 1.2


@dataclass(frozen=True)
class ValenceMap:
    """Expected association signs per pair; unseen pairs count as unknown."""

    entries: Mapping[PairKey, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for pair, sign in self.entries.items():
            if sign not in _VALID_SIGNS:
                raise ValueError(f"bad expected sign {sign!r} for {pair}")

    def expected_sign(self, pair: PairKey) -> str:
        return self.entries.get(pair, SIGN_UNKNOWN)

    def to_json_list(self) -> list[dict]:
        return [
            {"factor": p.factor, "outcome": p.outcome, "expected_sign": s}
            for p, s in sorted(
                self.entries.items(), key=lambda kv: (kv[0].outcome, kv[0].factor)
            )
        ]

    @classmethod
    def from_json_list(cls, data: Sequence[Mapping]) -> "ValenceMap":
        return cls(
            {
                PairKey(item["factor"], item["outcome"]): item["expected_sign"]
                for item in data
            }
        )


def load_valence_map(path: str | Path) -> ValenceMap:
    with Path(path).open() as fh:
        return ValenceMap.from_json_list(json.load(fh))


def save_valence_map(valences: ValenceMap, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        json.dump(valences.to_json_list(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class PlausibilityBreakdown:
    psi_stat: float
    psi_val: float
    psi_eff: float
    confounder_penalty: float
    psi_final: float
    review_flag: bool

    def to_json_dict(self) -> dict:
        return {
            "psi_stat": self.psi_stat,
            "psi_val": self.psi_val,
            "psi_eff": self.psi_eff,
            "confounder_penalty": self.confounder_penalty,
            "psi_final": self.psi_final,
            "review_flag": self.review_flag,
        }


@dataclass(frozen=True)
class Insight:
    pair: PairKey
    day: int
    tier: Tier
    effect_location: float
    ci: tuple[float, float]
    p_value: float
    plausibility: PlausibilityBreakdown
    confounders: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "factor": self.pair.factor,
            "outcome": self.pair.outcome,
            "day": self.day,
            "tier": self.tier.label,
            "effect_location": self.effect_location,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
            "p_value": self.p_value,
            "plausibility": self.plausibility.to_json_dict(),
            "confounders": list(self.confounders),
        }


def plausibility(
    p_value: float,
    effect_location: float,
    expected_sign: str,
    observed_sign: str,
    confounded: bool,
) -> PlausibilityBreakdown:
    """Compute the plausibility breakdown for one association.

    psi_stat = 1 - p; psi_val is 1.1 on a sign match, 0.5 on a mismatch,
    1.0 when no expectation exists; psi_eff rewards |effect| > 1.5 with 1.2
    and |effect| > 1.0 with 1.1; a detected confounder multiplies by 0.75
    (applied once, before clamping to [0.1, 0.95]).
    """
    if not 0.0 <= p_value <= 1.0:
        raise ValueError(f"p_value must be in [0, 1], got {p_value}")
    if expected_sign not in _VALID_SIGNS:
        raise ValueError(f"bad expected sign {expected_sign!r}")
    psi_stat = 1.0 - p_value
    if expected_sign == SIGN_UNKNOWN:
        psi_val = 1.0
    elif expected_sign == observed_sign:
        psi_val = 1.1
    else:
        psi_val = 0.5
    magnitude = abs(effect_location)
    if magnitude > 1.5:
        psi_eff = 1.2
    elif magnitude > 1.0:
        psi_eff = 1.1
    else:
        psi_eff = 1.0
    penalty = CONFOUNDER_PENALTY if confounded else 1.0
    raw = psi_stat * psi_val * psi_eff * penalty
    psi_final = min(PSI_CEILING, max(PSI_FLOOR, raw))
    return PlausibilityBreakdown(
        psi_stat=psi_stat,
        psi_val=psi_val,
        psi_eff=psi_eff,
        confounder_penalty=penalty,
        psi_final=psi_final,
        review_flag=psi_final < REVIEW_THRESHOLD,
    )


def detect_confounders(
    pair: PairKey,
    dataset: Dataset,
    effects: Mapping[PairKey, float],
    up_to_day: int,
) -> list[str]:
    """Other factors that co-occur with ``pair.factor`` and hit the same
    outcome more strongly.

    Flags factor F' when P(F'=1 | F=1) > 0.60 over days <= ``up_to_day``
    where both factors are observed, and |effect(F')| > 1.2 * |effect(F)|
    (effect locations taken from ``effects``, keyed by pair).
    """
    if pair not in effects:
        raise ValueError(f"pair {pair} absent from effects map")
    own_strength = abs(effects[pair])
    flagged = []
    for candidate, effect in effects.items():
        if candidate.outcome != pair.outcome or candidate.factor == pair.factor:
            continue
        both = 0
        co = 0
        for obs in dataset.observations:
            if obs.day > up_to_day:
                break
            f = obs.factors.get(pair.factor)
            f_prime = obs.factors.get(candidate.factor)
            if f is None or f_prime is None or not f:
                continue
            both += 1
            if f_prime:
                co += 1
        if both == 0:
            continue
        if co / both > CONFOUNDER_CO_OCCURRENCE and abs(effect) > (
            CONFOUNDER_STRENGTH_RATIO * own_strength
        ):
            flagged.append(candidate.factor)
    return sorted(flagged)


def build_insights(
    timelines: Mapping[PairKey, TierTimeline],
    dataset: Dataset,
    valences: ValenceMap,
    day: int,
) -> list[Insight]:
    """One insight per pair whose tier on ``day`` exceeds null.

    Confounder detection runs against the posterior effect locations of all
    tracked pairs at the same day; ordering is deterministic by
    (outcome, factor).
    """
    effects: dict[PairKey, float] = {}
    for pair, timeline in timelines.items():
        entry = _entry_at(timeline, day)
        effects[pair] = entry.location

    insights = []
    for pair in sorted(timelines, key=lambda p: (p.outcome, p.factor)):
        entry = _entry_at(timelines[pair], day)
        if entry.tier == Tier.NULL:
            continue
        confounders = detect_confounders(pair, dataset, effects, day)
        observed = SIGN_POSITIVE if entry.location > 0 else SIGN_NEGATIVE
        breakdown = plausibility(
            entry.p_value,
            entry.location,
            valences.expected_sign(pair),
            observed,
            confounded=bool(confounders),
        )
        insights.append(
            Insight(
                pair=pair,
                day=day,
                tier=entry.tier,
                effect_location=entry.location,
                ci=(entry.ci_lo, entry.ci_hi),
                p_value=entry.p_value,
                plausibility=breakdown,
                confounders=tuple(confounders),
            )
        )
    return insights


def _entry_at(timeline: TierTimeline, day: int):
    for entry in timeline.entries:
        if entry.day == day:
            return entry
    raise ValueError(f"day {day} beyond timeline span for {timeline.pair}")
