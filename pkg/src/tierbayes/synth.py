"""Seeded synthetic daily-log generator with a known ground truth.

Simulates a single subject over ``span_days`` days: binary factors drawn
from per-factor occurrence processes, vitals built as baseline plus the sum
of injected factor effects plus Gaussian noise (clamped to the 1-10 scale),
then independent per-cell missingness. The injected effects and the declared
null pairs form the ground-truth manifest that evaluation metrics score
against.

Occurrence processes:

* ``bernoulli``          -- i.i.d. daily rate ``p``.
* ``weekday_bernoulli``  -- rate ``weekday_p`` Monday-Friday and
                            ``weekend_p`` otherwise (day 1 is a Monday).
* ``markov``             -- two-state chain with ``persist_p`` = P(1 | prev 1)
                            and ``onset_p`` = P(1 | prev 0); day 1 draws from
                            the stationary occupancy.
* ``weekly_blocks``      -- each 7-day block is independently designated a
                            high-rate block with probability ``block_p``;
                            days use ``in_block_p`` inside such blocks and
                            ``out_block_p`` elsewhere.

Every random draw comes from a counter-based stream keyed by
(seed, purpose, column name, day or week), so streams never interfere:
adding a factor or extending the span leaves all other cells untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .dataset import Dataset, DatasetMeta, Observation, PairKey, build_dataset
from .jsonutil import fingerprint_sha256, read_json, write_json
from .rng import (
    PURPOSE_MISSING,
    PURPOSE_NOISE,
    PURPOSE_OCCURRENCE,
    PURPOSE_WEEK,
    Stream,
    cell_stream,
    fnv1a64,
    mix64,
)
from .scoring import SIGN_NEGATIVE, SIGN_POSITIVE, ValenceMap

DEFAULT_SEED = 6

PROCESS_KINDS = ("bernoulli", "weekday_bernoulli", "markov", "weekly_blocks")


@dataclass(frozen=True)
class VitalSpec:
    name: str
    baseline: float


@dataclass(frozen=True)
class FactorSpec:
    name: str
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"unknown occurrence process kind {self.kind!r}")


@dataclass(frozen=True)
class EffectSpec:
    factor: str
    outcome: str
    beta: float

    @property
    def pair(self) -> PairKey:
        return PairKey(self.factor, self.outcome)


@dataclass(frozen=True)
class GeneratorConfig:
    span_days: int = 90
    vitals: tuple[VitalSpec, ...] = (
        VitalSpec("mood", 6.0),
        VitalSpec("anxiety", 4.0),
        VitalSpec("energy", 6.0),
    )
    factors: tuple[FactorSpec, ...] = (
        FactorSpec("coffee", "weekday_bernoulli", {"weekday_p": 0.70, "weekend_p": 0.35}),
        FactorSpec("exercise", "markov", {"persist_p": 0.58, "onset_p": 0.28}),
        FactorSpec("poor_sleep", "bernoulli", {"p": 0.30}),
        FactorSpec(
            "stress",
            "weekly_blocks",
            {"block_p": 0.25, "in_block_p": 0.75, "out_block_p": 1.0 / 12.0},
        ),
    )
    effects: tuple[EffectSpec, ...] = (
        EffectSpec("coffee", "anxiety", 2.1),
        EffectSpec("poor_sleep", "energy", -2.5),
        EffectSpec("exercise", "mood", 1.8),
    )
    # Zero-effect pairs tracked alongside the true ones for false-discovery
    # evaluation. Not part of the generative model.
    null_pairs: tuple[PairKey, ...] = (
        PairKey("stress", "mood"),
        PairKey("coffee", "energy"),
        PairKey("exercise", "anxiety"),
    )
    noise_sd: float = 1.2
    missing_rate: float = 0.10
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.span_days < 1:
            raise ValueError("span_days must be >= 1")
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be > 0")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ValueError("missing_rate must be in [0, 1)")
        vital_names = {v.name for v in self.vitals}
        factor_names = {f.name for f in self.factors}
        true_pairs = set()
        for effect in self.effects:
            if effect.factor not in factor_names or effect.outcome not in vital_names:
                raise ValueError(f"effect {effect.factor}->{effect.outcome} off schema")
            true_pairs.add(effect.pair)
        for pair in self.null_pairs:
            if pair.factor not in factor_names or pair.outcome not in vital_names:
                raise ValueError(f"null pair {pair} off schema")
            if pair in true_pairs:
                raise ValueError(f"null pair {pair} duplicates a true effect")

    def to_json_dict(self) -> dict:
        return {
            "span_days": self.span_days,
            "vitals": [{"name": v.name, "baseline": v.baseline} for v in self.vitals],
            "factors": [
                {"name": f.name, "kind": f.kind, "params": dict(f.params)}
                for f in self.factors
            ],
            "effects": [
                {"factor": e.factor, "outcome": e.outcome, "beta": e.beta}
                for e in self.effects
            ],
            "null_pairs": [
                {"factor": p.factor, "outcome": p.outcome} for p in self.null_pairs
            ],
            "noise_sd": self.noise_sd,
            "missing_rate": self.missing_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GeneratorConfig":
        known = {
            "span_days",
            "vitals",
            "factors",
            "effects",
            "null_pairs",
            "noise_sd",
            "missing_rate",
            "seed",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator config keys: {sorted(unknown)}")
        kwargs: dict = {}
        if "span_days" in data:
            kwargs["span_days"] = int(data["span_days"])
        if "vitals" in data:
            kwargs["vitals"] = tuple(
                VitalSpec(v["name"], float(v["baseline"])) for v in data["vitals"]
            )
        if "factors" in data:
            kwargs["factors"] = tuple(
                FactorSpec(f["name"], f["kind"], dict(f.get("params", {})))
                for f in data["factors"]
            )
        if "effects" in data:
            kwargs["effects"] = tuple(
                EffectSpec(e["factor"], e["outcome"], float(e["beta"]))
                for e in data["effects"]
            )
        if "null_pairs" in data:
            kwargs["null_pairs"] = tuple(
                PairKey(p["factor"], p["outcome"]) for p in data["null_pairs"]
            )
        if "noise_sd" in data:
            kwargs["noise_sd"] = float(data["noise_sd"])
        if "missing_rate" in data:
            kwargs["missing_rate"] = float(data["missing_rate"])
        if "seed" in data:
            kwargs["seed"] = int(data["seed"])
        return cls(**kwargs)


@dataclass(frozen=True)
class GroundTruthSpec:
    true_effects: Mapping[PairKey, float]
    null_pairs: tuple[PairKey, ...]

    def __post_init__(self) -> None:
        overlap = set(self.true_effects) & set(self.null_pairs)
        if overlap:
            raise ValueError(f"pairs cannot be both true and null: {overlap}")

    @property
    def all_pairs(self) -> tuple[PairKey, ...]:
        """Evaluation roster: true then null pairs, each sorted by
        (outcome, factor)."""
        key = lambda p: (p.outcome, p.factor)
        return tuple(sorted(self.true_effects, key=key)) + tuple(
            sorted(self.null_pairs, key=key)
        )


def default_generator_config(seed: int = DEFAULT_SEED) -> GeneratorConfig:
    return GeneratorConfig(seed=seed)


def default_valence_map() -> ValenceMap:
    """Domain expectations for the default scenario's true pairs."""
    return ValenceMap(
        {
            PairKey("coffee", "anxiety"): SIGN_POSITIVE,
            PairKey("poor_sleep", "energy"): SIGN_NEGATIVE,
            PairKey("exercise", "mood"): SIGN_POSITIVE,
        }
    )


class DayStreams:
    """Random sources for one (factor, day) cell of the occurrence draw.

    ``week_uniform`` is keyed by the day's 7-day block, so every day of a
    week sees the same block-designation draw.
    """

    def __init__(self, seed: int, name: str, day: int) -> None:
        self._seed = seed
        self._name = name
        self._day = day
        self._stream = cell_stream(seed, PURPOSE_OCCURRENCE, name, day)

    def day_uniform(self) -> float:
        return self._stream.uniform()

    def week_uniform(self) -> float:
        week = (self._day - 1) // 7
        return Stream(
            mix64(self._seed, PURPOSE_WEEK, fnv1a64(self._name), week)
        ).uniform()


def is_weekday(day: int) -> bool:
    """Day 1 is a Monday; weekdays are the first five days of each week."""
    return (day - 1) % 7 < 5


def factor_process_step(
    spec: FactorSpec, day: int, prev_value: bool | None, streams: DayStreams
) -> bool:
    """Draw one day's occurrence for a factor.

    ``prev_value`` is the previous day's value (None on day 1); only the
    markov process consults it.
    """
    if day < 1:
        raise ValueError("day must be >= 1")
    p = spec.params
    if spec.kind == "bernoulli":
        return streams.day_uniform() < p["p"]
    if spec.kind == "weekday_bernoulli":
        rate = p["weekday_p"] if is_weekday(day) else p["weekend_p"]
        return streams.day_uniform() < rate
    if spec.kind == "markov":
        persist = p["persist_p"]
        onset = p["onset_p"]
        if prev_value is None:
            stationary = onset / (onset + 1.0 - persist)
            return streams.day_uniform() < stationary
        return streams.day_uniform() < (persist if prev_value else onset)
    if spec.kind == "weekly_blocks":
        in_block = streams.week_uniform() < p["block_p"]
        rate = p["in_block_p"] if in_block else p["out_block_p"]
        return streams.day_uniform() < rate
    raise ValueError(f"unknown occurrence process kind {spec.kind!r}")


def simulate_factor(spec: FactorSpec, n_days: int, seed: int) -> list[bool]:
    """Standalone occurrence simulation (used by generate and calibration
    tests)."""
    values: list[bool] = []
    prev: bool | None = None
    for day in range(1, n_days + 1):
        value = factor_process_step(spec, day, prev, DayStreams(seed, spec.name, day))
        values.append(value)
        prev = value
    return values


def generate(config: GeneratorConfig) -> tuple[Dataset, GroundTruthSpec]:
    """Generate a dataset and its ground-truth manifest. Deterministic for a
    fixed (config, seed)."""
    seed = config.seed
    factor_values = {
        spec.name: simulate_factor(spec, config.span_days, seed)
        for spec in config.factors
    }
    effects_by_outcome: dict[str, list[EffectSpec]] = {}
    for effect in config.effects:
        effects_by_outcome.setdefault(effect.outcome, []).append(effect)

    observations = []
    for day in range(1, config.span_days + 1):
        vitals: dict[str, float] = {}
        for vital in config.vitals:
            value = vital.baseline
            for effect in effects_by_outcome.get(vital.name, []):
                if factor_values[effect.factor][day - 1]:
                    value += effect.beta
            noise = cell_stream(seed, PURPOSE_NOISE, vital.name, day).normal()
            value += config.noise_sd * noise
            vitals[vital.name] = min(10.0, max(1.0, value))
        factors = {
            spec.name: factor_values[spec.name][day - 1] for spec in config.factors
        }
        # Independent per-cell missingness, applied after generation so the
        # hidden truth still drives the vitals.
        if config.missing_rate > 0.0:
            for name in list(vitals):
                if cell_stream(seed, PURPOSE_MISSING, name, day).uniform() < config.missing_rate:
                    del vitals[name]
            for name in list(factors):
                if cell_stream(seed, PURPOSE_MISSING, name, day).uniform() < config.missing_rate:
                    del factors[name]
        observations.append(Observation(day, vitals, factors))

    meta = DatasetMeta(
        seed=seed, config_fingerprint=fingerprint_sha256(config.to_json_dict())
    )
    dataset = build_dataset(
        [v.name for v in config.vitals],
        [f.name for f in config.factors],
        observations,
        meta,
    )
    truth = GroundTruthSpec(
        true_effects={e.pair: e.beta for e in config.effects},
        null_pairs=config.null_pairs,
    )
    return dataset, truth


def save_ground_truth(spec: GroundTruthSpec, path: str | Path) -> None:
    key = lambda p: (p.outcome, p.factor)
    write_json(
        path,
        {
            "true_effects": [
                {"factor": p.factor, "outcome": p.outcome, "beta": beta}
                for p, beta in sorted(spec.true_effects.items(), key=lambda kv: key(kv[0]))
            ],
            "null_pairs": [
                {"factor": p.factor, "outcome": p.outcome}
                for p in sorted(spec.null_pairs, key=key)
            ],
        },
    )


def load_ground_truth(path: str | Path) -> GroundTruthSpec:
    data = read_json(path)
    return GroundTruthSpec(
        true_effects={
            PairKey(e["factor"], e["outcome"]): float(e["beta"])
            for e in data["true_effects"]
        },
        null_pairs=tuple(PairKey(p["factor"], p["outcome"]) for p in data["null_pairs"]),
    )


def vary_for_monte_carlo(
    base: GeneratorConfig, master_seed: int, index: int
) -> GeneratorConfig:
    """Per-dataset variation draw for Monte Carlo replication.

    Effect magnitudes are redrawn uniformly from [1.5, 3.0] (keeping each
    effect's sign) and the noise level uniformly from [1.0, 1.8]; the
    dataset seed comes from the same stream. Dataset ``index`` streams are
    independent, so growing the replication count never re-randomizes
    earlier datasets.
    """
    from .rng import PURPOSE_MC_DRAWS  # local import keeps module top tidy

    stream = Stream(mix64(master_seed, PURPOSE_MC_DRAWS, index))
    key = lambda e: (e.outcome, e.factor)
    new_effects = []
    for effect in sorted(base.effects, key=key):
        magnitude = 1.5 + 1.5 * stream.uniform()
        sign = -1.0 if effect.beta < 0 else 1.0
        new_effects.append(EffectSpec(effect.factor, effect.outcome, sign * magnitude))
    noise_sd = 1.0 + 0.8 * stream.uniform()
    return replace(
        base,
        effects=tuple(new_effects),
        noise_sd=noise_sd,
        seed=stream.next_uint64(),
    )
