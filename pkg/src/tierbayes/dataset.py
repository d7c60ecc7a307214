"""Daily-log dataset model: schema, observations, file IO, pair extraction.

A dataset is a single subject's daily log: continuous vitals on a 1-10 scale
and binary factors, one row per day, with explicitly absent entries for
missed logs (never sentinel values).

File formats
------------
CSV: header ``day,<vital...>,<factor...>``; vitals as decimals (always
carrying a decimal point or exponent), factors as bare ``0``/``1``, missing
as empty cells. Columns are classified by representation: a column whose
present tokens are all bare ``0``/``1`` is a factor.

JSONL: a leading schema line ``{"vitals": [...], "factors": [...], "seed":
..., "config_fingerprint": ...}`` followed by one observation object per
line with explicit nulls for missing entries. JSONL round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

VITAL_MIN = 1.0
VITAL_MAX = 10.0


class DatasetError(ValueError):
    """Base class for dataset loading problems."""


class ParseError(DatasetError):
    """Raised when a file cannot be decoded in the declared format."""


class ValidationError(DatasetError):
    """Raised when decoded content violates the dataset invariants."""


@dataclass(frozen=True)
class PairKey:
    """One factor -> outcome association under study."""

    factor: str
    outcome: str

    def __str__(self) -> str:
        return f"{self.factor}->{self.outcome}"


@dataclass(frozen=True)
class DatasetMeta:
    seed: int | None = None
    config_fingerprint: str | None = None


@dataclass(frozen=True)
class Observation:
    """One day's log. Missing entries are simply absent from the mappings."""

    day: int
    vitals: Mapping[str, float] = field(default_factory=dict)
    factors: Mapping[str, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Dataset:
    vitals: tuple[str, ...]
    factors: tuple[str, ...]
    observations: tuple[Observation, ...]
    meta: DatasetMeta | None = None

    @property
    def span(self) -> int:
        """Total span in days (the last day index; days are 1-based)."""
        return self.observations[-1].day if self.observations else 0

    def validate(self) -> None:
        seen_names: set[str] = set()
        for name in (*self.vitals, *self.factors):
            if not name:
                raise ValidationError("schema names must be non-empty")
            if name in seen_names:
                raise ValidationError(f"duplicate schema name {name!r}")
            seen_names.add(name)
        prev_day = 0
        for obs in self.observations:
            if obs.day <= prev_day:
                raise ValidationError(
                    f"days must be strictly increasing; saw {obs.day} after {prev_day}"
                )
            prev_day = obs.day
            for name, value in obs.vitals.items():
                if name not in self.vitals:
                    raise ValidationError(f"unknown vital {name!r} on day {obs.day}")
                if not (VITAL_MIN <= value <= VITAL_MAX):
                    raise ValidationError(
                        f"vital {name!r} = {value} outside [{VITAL_MIN}, {VITAL_MAX}]"
                        f" on day {obs.day}"
                    )
            for name in obs.factors:
                if name not in self.factors:
                    raise ValidationError(f"unknown factor {name!r} on day {obs.day}")


def build_dataset(
    vitals: Iterable[str],
    factors: Iterable[str],
    observations: Iterable[Observation],
    meta: DatasetMeta | None = None,
) -> Dataset:
    """Construct and validate a Dataset."""
    ds = Dataset(tuple(vitals), tuple(factors), tuple(observations), meta)
    ds.validate()
    return ds


def pair_samples(
    dataset: Dataset, pair: PairKey, up_to_day: int
) -> tuple[list[float], list[float]]:
    """Outcome values on days <= ``up_to_day``, split by factor presence.

    Only days where *both* the factor and the outcome are observed
    contribute (pairwise-complete-case policy); a day missing either entry
    is excluded from both groups.
    """
    if pair.factor not in dataset.factors or pair.outcome not in dataset.vitals:
        raise ValidationError(f"unknown pair {pair}")
    present: list[float] = []
    absent: list[float] = []
    for obs in dataset.observations:
        if obs.day > up_to_day:
            break
        value = obs.vitals.get(pair.outcome)
        flag = obs.factors.get(pair.factor)
        if value is None or flag is None:
            continue
        (present if flag else absent).append(value)
    return present, absent


def pair_arrays(dataset: Dataset, pair: PairKey) -> tuple[np.ndarray, np.ndarray]:
    """Day-indexed arrays for the kernel scan.

    Returns ``(factor, outcome)`` of length ``span``: factor int8 with
    1/0 observed and -1 missing, outcome float64 with NaN missing. Days
    absent from the observation list count as missing.
    """
    if pair.factor not in dataset.factors or pair.outcome not in dataset.vitals:
        raise ValidationError(f"unknown pair {pair}")
    span = dataset.span
    factor = np.full(span, -1, dtype=np.int8)
    outcome = np.full(span, np.nan, dtype=np.float64)
    for obs in dataset.observations:
        flag = obs.factors.get(pair.factor)
        if flag is not None:
            factor[obs.day - 1] = 1 if flag else 0
        value = obs.vitals.get(pair.outcome)
        if value is not None:
            outcome[obs.day - 1] = value
    return factor, outcome


# -- file IO ------------------------------------------------------------


def _format_vital(value: float) -> str:
    # repr() round-trips doubles exactly and always keeps a '.' or 'e',
    # which the CSV reader uses to tell vitals from 0/1 factors.
    return repr(float(value))


def save_dataset(dataset: Dataset, path: str | Path, format: str = "jsonl") -> None:
    """Write a dataset as CSV or JSONL (see module docstring for layouts)."""
    path = Path(path)
    if format == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["day", *dataset.vitals, *dataset.factors])
            for obs in dataset.observations:
                row: list[str] = [str(obs.day)]
                for name in dataset.vitals:
                    value = obs.vitals.get(name)
                    row.append("" if value is None else _format_vital(value))
                for name in dataset.factors:
                    flag = obs.factors.get(name)
                    row.append("" if flag is None else ("1" if flag else "0"))
                writer.writerow(row)
    elif format == "jsonl":
        with path.open("w") as fh:
            header = {
                "vitals": list(dataset.vitals),
                "factors": list(dataset.factors),
                "seed": dataset.meta.seed if dataset.meta else None,
                "config_fingerprint": (
                    dataset.meta.config_fingerprint if dataset.meta else None
                ),
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for obs in dataset.observations:
                record = {
                    "day": obs.day,
                    "vitals": {
                        name: obs.vitals.get(name) for name in dataset.vitals
                    },
                    "factors": {
                        name: obs.factors.get(name) for name in dataset.factors
                    },
                }
                fh.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {format!r} (expected 'csv' or 'jsonl')")


def load_dataset(path: str | Path, format: str = "jsonl") -> Dataset:
    """Read and validate a dataset written by :func:`save_dataset`."""
    path = Path(path)
    if format == "csv":
        return _load_csv(path)
    if format == "jsonl":
        return _load_jsonl(path)
    raise ValueError(f"unknown format {format!r} (expected 'csv' or 'jsonl')")


def _load_csv(path: Path) -> Dataset:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty CSV") from None
        if not header or header[0] != "day":
            raise ParseError(f"{path}: first CSV column must be 'day'")
        names = header[1:]
        rows = list(reader)

    # Column kind by representation: all-0/1 bare tokens means factor.
    is_factor: dict[str, bool] = {}
    columns: dict[str, list[str]] = {name: [] for name in names}
    for row in rows:
        if len(row) != len(header):
            raise ParseError(f"{path}: row with {len(row)} cells, expected {len(header)}")
        for name, token in zip(names, row[1:]):
            if token != "":
                columns[name].append(token)
    for name in names:
        tokens = columns[name]
        is_factor[name] = bool(tokens) and all(t in ("0", "1") for t in tokens)

    vitals = tuple(n for n in names if not is_factor[n])
    factors = tuple(n for n in names if is_factor[n])

    observations = []
    seen_days: set[int] = set()
    for row in rows:
        try:
            day = int(row[0])
        except ValueError:
            raise ParseError(f"{path}: malformed day {row[0]!r}") from None
        if day in seen_days:
            raise ValidationError(f"{path}: duplicate day {day}")
        seen_days.add(day)
        vit: dict[str, float] = {}
        fac: dict[str, bool] = {}
        for name, token in zip(names, row[1:]):
            if token == "":
                continue
            if is_factor[name]:
                fac[name] = token == "1"
            else:
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(
                        f"{path}: malformed value {token!r} for {name!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ValidationError(f"{path}: non-finite value for {name!r}")
                vit[name] = value
        observations.append(Observation(day, vit, fac))
    observations.sort(key=lambda o: o.day)
    return build_dataset(vitals, factors, observations)


def _load_jsonl(path: Path) -> Dataset:
    with path.open() as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty JSONL")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: bad schema line: {exc}") from None
    if not isinstance(header, dict) or "vitals" not in header or "factors" not in header:
        raise ParseError(f"{path}: schema line must carry 'vitals' and 'factors'")
    meta = DatasetMeta(
        seed=header.get("seed"), config_fingerprint=header.get("config_fingerprint")
    )
    observations = []
    seen_days: set[int] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        try:
            day = int(record["day"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{path}:{lineno}: missing or malformed 'day'") from None
        if day in seen_days:
            raise ValidationError(f"{path}:{lineno}: duplicate day {day}")
        seen_days.add(day)
        vit = {
            name: float(value)
            for name, value in record.get("vitals", {}).items()
            if value is not None
        }
        fac = {
            name: bool(value)
            for name, value in record.get("factors", {}).items()
            if value is not None
        }
        observations.append(Observation(day, vit, fac))
    observations.sort(key=lambda o: o.day)
    return build_dataset(header["vitals"], header["factors"], observations, meta)
