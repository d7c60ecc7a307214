"""Strict config-file schemas and run manifests for the CLI.

Config files are versioned JSON; unknown keys are hard errors so a typo in a
threshold name can never silently fall back to a default.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Mapping

from .conjugate import PriorConfig
from .jsonutil import fingerprint_sha256, read_json, write_json
from .synth import GeneratorConfig
from .tiers import EngineConfig

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Raised for malformed or mis-keyed config files."""


def _check_version(data: Mapping, path: Path) -> None:
    if "schema_version" not in data:
        raise ConfigError(f"{path}: missing schema_version")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: unsupported schema_version {data['schema_version']!r}"
        )


def load_generator_config(path: str | Path) -> GeneratorConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    data = dict(read_json(path))
    _check_version(data, path)
    data.pop("schema_version")
    try:
        return GeneratorConfig.from_json_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_generator_config(config: GeneratorConfig, path: str | Path) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **config.to_json_dict()}
    write_json(path, payload)


_ENGINE_KEYS = {
    "clue_mass",
    "pattern_mass",
    "ci_level",
    "kl_window_days",
    "kl_threshold",
    "adaptive_schedule",
    "ppc_gate_enabled",
    "ppc_min_coverage",
}
_PRIOR_KEYS = {"coefficient_variance", "ig_shape", "ig_rate"}


def engine_config_from_json_dict(data: Mapping) -> EngineConfig:
    unknown = set(data) - _ENGINE_KEYS
    if unknown:
        raise ConfigError(f"unknown engine config keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "adaptive_schedule" in kwargs:
        kwargs["adaptive_schedule"] = tuple(
            (int(day), float(threshold)) for day, threshold in kwargs["adaptive_schedule"]
        )
    try:
        return EngineConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def engine_config_to_json_dict(config: EngineConfig) -> dict:
    return {
        "clue_mass": config.clue_mass,
        "pattern_mass": config.pattern_mass,
        "ci_level": config.ci_level,
        "kl_window_days": config.kl_window_days,
        "kl_threshold": config.kl_threshold,
        "adaptive_schedule": [[d, t] for d, t in config.adaptive_schedule],
        "ppc_gate_enabled": config.ppc_gate_enabled,
        "ppc_min_coverage": config.ppc_min_coverage,
    }


def load_engine_bundle(path: str | Path) -> tuple[EngineConfig, PriorConfig]:
    """Engine + prior settings from one file:
    ``{"schema_version": 1, "engine": {...}, "prior": {...}}``."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    data = dict(read_json(path))
    _check_version(data, path)
    unknown = set(data) - {"schema_version", "engine", "prior"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    engine = engine_config_from_json_dict(data.get("engine", {}))
    prior_data = dict(data.get("prior", {}))
    unknown = set(prior_data) - _PRIOR_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown prior keys {sorted(unknown)}")
    try:
        prior = PriorConfig(**prior_data)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return engine, prior


def save_engine_bundle(
    engine: EngineConfig, prior: PriorConfig, path: str | Path
) -> None:
    write_json(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "engine": engine_config_to_json_dict(engine),
            "prior": {
                "coefficient_variance": prior.coefficient_variance,
                "ig_shape": prior.ig_shape,
                "ig_rate": prior.ig_rate,
            },
        },
    )


def config_fingerprint(payload: Mapping) -> str:
    return fingerprint_sha256(payload)


def write_run_manifest(
    out_dir: str | Path,
    command: str,
    config_payload: Mapping,
    master_seed: int,
    artifact_version: str,
    outputs: list[str],
    started_at: float,
) -> Path:
    """One manifest per output directory, recording how to reproduce it.

    ``wall_clock_seconds`` is the only non-deterministic field; byte-level
    reproducibility comparisons exclude this file.
    """
    path = Path(out_dir) / "run_manifest.json"
    write_json(
        path,
        {
            "command": command,
            "config_fingerprint": config_fingerprint(config_payload),
            "master_seed": master_seed,
            "artifact_version": artifact_version,
            "outputs": sorted(outputs),
            "wall_clock_seconds": round(time.time() - started_at, 3),
        },
    )
    return path
