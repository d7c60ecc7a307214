"""Experiment harness: single-dataset evaluation, Monte Carlo replication,
sensitivity sweeps, and report emission.

Metrics follow the evaluation protocol used throughout the package:

* time to detection -- first day each method reports a pair (progressive
  tiers use first attainment at-or-above the tier; baselines use their
  detection rules);
* FDR at day 30     -- insights on ground-truth-null pairs over all insights,
  counting each pair once at its maximum tier attained by day 30
  ("max_tier"; the per-tier-event alternative is selectable);
* CI coverage       -- fraction of true pairs whose day-90 credible interval
  contains the injected effect;
* directional accuracy -- among the per-day insights reported on true pairs
  before day 14, the fraction whose effect sign matched the injected sign;
* KS calibration    -- posterior predictive PIT uniformity per true pair at
  day 90.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .conjugate import PosteriorState, PriorConfig, ks_calibration, posterior_update
from .dataset import Dataset, PairKey, pair_arrays, pair_samples
from .synth import GeneratorConfig, GroundTruthSpec, generate, vary_for_monte_carlo
from .tiers import EngineConfig, Tier, TierTimeline, first_attainment, run_engine

METHOD_PROGRESSIVE_CLUE = "progressive_clue"
METHOD_PROGRESSIVE_PATTERN = "progressive_pattern"
METHOD_PROGRESSIVE_CORRELATION = "progressive_correlation"
METHOD_FIXED = "fixed"
METHOD_NAIVE = "naive"

METRIC_KEYS = (
    "time_to_clue_days",
    "time_to_pattern_days",
    "time_to_correlation_days",
    "fdr_at_day30",
    "ci_coverage_day90",
    "directional_accuracy_pre14",
)

FDR_COUNTING_MODES = ("max_tier", "tier_events")

FIXED_MIN_N = 30
FIXED_ALPHA = 0.05
NAIVE_ALPHA = 0.20


@dataclass(frozen=True)
class DetectionRecord:
    pair: PairKey
    method: str
    day: int | None


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    sd: float
    ci_lo: float
    ci_hi: float
    n: int


@dataclass(frozen=True)
class ExperimentReport:
    detections: tuple[DetectionRecord, ...]
    fdr_at_day30: float
    fdr_denominator_empty: bool
    ci_coverage_day90: float | None
    directional_accuracy_pre14: float | None
    ks_results: Mapping[PairKey, tuple[float, float]]
    mc_summary: Mapping[str, MetricSummary] | None = None
    mc_rows: tuple[Mapping, ...] | None = None

    def to_json_dict(self) -> dict:
        out: dict = {
            "detections": [
                {
                    "factor": r.pair.factor,
                    "outcome": r.pair.outcome,
                    "method": r.method,
                    "day": r.day,
                }
                for r in self.detections
            ],
            "fdr_at_day30": self.fdr_at_day30,
            "fdr_denominator_empty": self.fdr_denominator_empty,
            "ci_coverage_day90": self.ci_coverage_day90,
            "directional_accuracy_pre14": self.directional_accuracy_pre14,
            "ks_results": {
                str(pair): {"ks_stat": stat, "p_value": p}
                for pair, (stat, p) in self.ks_results.items()
            },
        }
        if self.mc_summary is not None:
            out["mc_summary"] = {
                key: {
                    "mean": s.mean,
                    "sd": s.sd,
                    "ci_lo": s.ci_lo,
                    "ci_hi": s.ci_hi,
                    "n": s.n,
                }
                for key, s in self.mc_summary.items()
            }
        return out


def _detection_days_from_scan(
    dataset: Dataset, pair: PairKey, prior: PriorConfig, config: EngineConfig
) -> tuple[int | None, int | None]:
    """(fixed_day, naive_day): first detection day of each baseline.

    Uses the same per-day Welch statistics as the engine scan; equivalent to
    calling the detector functions day by day (asserted in tests).
    """
    factor, outcome = pair_arrays(dataset, pair)
    scan = _kernels.pair_scan(
        factor,
        outcome,
        prior.coefficient_variance,
        prior.ig_shape,
        prior.ig_rate,
        config.ci_level,
    )
    fixed_day = None
    naive_day = None
    for i in range(len(factor)):
        n_total = scan["n1"][i] + scan["n0"][i]
        p = scan["welch_p"][i]
        degenerate = scan["welch_degenerate"][i] > 0
        if fixed_day is None and n_total >= FIXED_MIN_N and p < FIXED_ALPHA:
            fixed_day = i + 1
        if naive_day is None and not degenerate and p < NAIVE_ALPHA:
            naive_day = i + 1
        if fixed_day is not None and naive_day is not None:
            break
    return fixed_day, naive_day


def _max_tier_through(timeline: TierTimeline, day: int) -> Tier:
    best = Tier.NULL
    for entry in timeline.entries:
        if entry.day > day:
            break
        if entry.tier > best:
            best = entry.tier
    return best


def _fdr(
    timelines: Mapping[PairKey, TierTimeline],
    truth: GroundTruthSpec,
    day: int,
    counting: str,
) -> tuple[float, bool]:
    if counting not in FDR_COUNTING_MODES:
        raise ValueError(f"unknown FDR counting mode {counting!r}")
    null_set = set(truth.null_pairs)
    numerator = 0
    denominator = 0
    for pair, timeline in timelines.items():
        if counting == "max_tier":
            count = 1 if _max_tier_through(timeline, day) > Tier.NULL else 0
        else:
            count = 0
            for tier in (Tier.CLUE, Tier.PATTERN, Tier.CORRELATION):
                attained = first_attainment(timeline, tier)
                if attained is not None and attained <= day:
                    count += 1
        denominator += count
        if pair in null_set:
            numerator += count
    if denominator == 0:
        return 0.0, True
    return numerator / denominator, False


def evaluate_single(
    dataset: Dataset,
    truth: GroundTruthSpec,
    engine_config: EngineConfig,
    prior: PriorConfig,
    *,
    fdr_day: int = 30,
    fdr_counting: str = "max_tier",
    coverage_day: int = 90,
    directional_cutoff_day: int = 14,
    with_ks: bool = True,
    ks_samples: int = 1000,
) -> ExperimentReport:
    """Run the progressive engine plus both baselines and score everything
    against the ground truth."""
    roster = truth.all_pairs
    for pair in roster:
        if pair.factor not in dataset.factors or pair.outcome not in dataset.vitals:
            raise ValueError(f"truth pair {pair} not representable in dataset")
    timelines = run_engine(dataset, roster, prior, engine_config)
    span = dataset.span

    detections: list[DetectionRecord] = []
    for pair in roster:
        timeline = timelines[pair]
        detections.append(
            DetectionRecord(pair, METHOD_PROGRESSIVE_CLUE, first_attainment(timeline, Tier.CLUE))
        )
        detections.append(
            DetectionRecord(
                pair, METHOD_PROGRESSIVE_PATTERN, first_attainment(timeline, Tier.PATTERN)
            )
        )
        detections.append(
            DetectionRecord(
                pair,
                METHOD_PROGRESSIVE_CORRELATION,
                first_attainment(timeline, Tier.CORRELATION),
            )
        )
        fixed_day, naive_day = _detection_days_from_scan(dataset, pair, prior, engine_config)
        detections.append(DetectionRecord(pair, METHOD_FIXED, fixed_day))
        detections.append(DetectionRecord(pair, METHOD_NAIVE, naive_day))

    fdr, fdr_empty = _fdr(timelines, truth, min(fdr_day, span), fdr_counting)

    true_pairs = [p for p in roster if p in truth.true_effects]
    coverage: float | None = None
    if true_pairs:
        eval_day = min(coverage_day, span)
        covered = 0
        for pair in true_pairs:
            entry = timelines[pair].entries[eval_day - 1]
            beta = truth.true_effects[pair]
            if entry.ci_lo <= beta <= entry.ci_hi:
                covered += 1
        coverage = covered / len(true_pairs)

    # Each (pair, day) with a non-null tier before the cutoff is one reported
    # insight; accuracy is judged against the injected effect's sign.
    directional: float | None = None
    events = 0
    matches = 0
    for pair in true_pairs:
        truth_sign = 1.0 if truth.true_effects[pair] > 0 else -1.0
        for entry in timelines[pair].entries:
            if entry.day >= directional_cutoff_day:
                break
            if entry.tier > Tier.NULL:
                events += 1
                if entry.location * truth_sign > 0:
                    matches += 1
    if events:
        directional = matches / events

    ks_results: dict[PairKey, tuple[float, float]] = {}
    if with_ks:
        eval_day = min(coverage_day, span)
        for pair in true_pairs:
            present, absent = pair_samples(dataset, pair, eval_day)
            rows = [[1.0, 1.0]] * len(present) + [[1.0, 0.0]] * len(absent)
            outcomes = list(present) + list(absent)
            state = posterior_update(prior, rows, outcomes)
            ks_results[pair] = ks_calibration(state, rows, outcomes, ks_samples)

    return ExperimentReport(
        detections=tuple(detections),
        fdr_at_day30=fdr,
        fdr_denominator_empty=fdr_empty,
        ci_coverage_day90=coverage,
        directional_accuracy_pre14=directional,
        ks_results=ks_results,
    )


def _single_metrics(
    report: ExperimentReport, truth: GroundTruthSpec
) -> dict[str, float | None]:
    """Per-dataset metric values for Monte Carlo aggregation."""
    true_set = set(truth.true_effects)
    days: dict[str, list[int]] = {
        METHOD_PROGRESSIVE_CLUE: [],
        METHOD_PROGRESSIVE_PATTERN: [],
        METHOD_PROGRESSIVE_CORRELATION: [],
    }
    for record in report.detections:
        if record.pair in true_set and record.method in days and record.day is not None:
            days[record.method].append(record.day)
    metrics: dict[str, float | None] = {
        "time_to_clue_days": (
            sum(days[METHOD_PROGRESSIVE_CLUE]) / len(days[METHOD_PROGRESSIVE_CLUE])
            if days[METHOD_PROGRESSIVE_CLUE]
            else None
        ),
        "time_to_pattern_days": (
            sum(days[METHOD_PROGRESSIVE_PATTERN]) / len(days[METHOD_PROGRESSIVE_PATTERN])
            if days[METHOD_PROGRESSIVE_PATTERN]
            else None
        ),
        "time_to_correlation_days": (
            sum(days[METHOD_PROGRESSIVE_CORRELATION])
            / len(days[METHOD_PROGRESSIVE_CORRELATION])
            if days[METHOD_PROGRESSIVE_CORRELATION]
            else None
        ),
        "fdr_at_day30": report.fdr_at_day30,
        "ci_coverage_day90": report.ci_coverage_day90,
        "directional_accuracy_pre14": report.directional_accuracy_pre14,
    }
    return metrics


def _mc_row(
    master_seed: int,
    index: int,
    base_config: GeneratorConfig,
    engine_config: EngineConfig,
    prior: PriorConfig,
    fdr_counting: str,
) -> dict:
    """Generate + evaluate one Monte Carlo dataset (worker function)."""
    config = vary_for_monte_carlo(base_config, master_seed, index)
    dataset, truth = generate(config)
    report = evaluate_single(
        dataset, truth, engine_config, prior, fdr_counting=fdr_counting, with_ks=False
    )
    row: dict = {"dataset_index": index, "noise_sd": config.noise_sd}
    row.update(_single_metrics(report, truth))
    pair_days: dict[str, dict[str, int | None]] = {}
    for record in report.detections:
        pair_days.setdefault(str(record.pair), {})[record.method] = record.day
    row["pair_days"] = pair_days
    row["true_pairs"] = [str(p) for p in truth.all_pairs if p in truth.true_effects]
    return row


def _summarize(values: Sequence[float]) -> MetricSummary:
    arr = np.asarray(values, dtype=float)
    if len(arr) == 0:
        return MetricSummary(math.nan, math.nan, math.nan, math.nan, 0)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return MetricSummary(
        mean=float(arr.mean()),
        sd=sd,
        ci_lo=float(np.percentile(arr, 2.5)),
        ci_hi=float(np.percentile(arr, 97.5)),
        n=len(arr),
    )


def monte_carlo(
    n_datasets: int = 100,
    base_config: GeneratorConfig | None = None,
    engine_config: EngineConfig | None = None,
    prior: PriorConfig | None = None,
    seed: int = 42,
    *,
    fdr_counting: str = "max_tier",
    jobs: int = 1,
) -> ExperimentReport:
    """Replicate the evaluation across ``n_datasets`` datasets with varied
    effect sizes and noise levels; aggregate mean/SD and percentile 95% CIs
    per metric. Bit-reproducible for a fixed master seed, independent of
    ``jobs``."""
    if n_datasets < 2:
        raise ValueError("n_datasets must be >= 2")
    base_config = base_config or GeneratorConfig()
    engine_config = engine_config or EngineConfig()
    prior = prior or PriorConfig()

    args = [
        (seed, i, base_config, engine_config, prior, fdr_counting)
        for i in range(n_datasets)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_mc_row_star, args, chunksize=4))
    else:
        rows = [_mc_row_star(a) for a in args]
    rows.sort(key=lambda r: r["dataset_index"])

    summary = {
        key: _summarize([row[key] for row in rows if row[key] is not None])
        for key in METRIC_KEYS
    }
    return ExperimentReport(
        detections=(),
        fdr_at_day30=summary["fdr_at_day30"].mean,
        fdr_denominator_empty=False,
        ci_coverage_day90=summary["ci_coverage_day90"].mean,
        directional_accuracy_pre14=summary["directional_accuracy_pre14"].mean,
        ks_results={},
        mc_summary=summary,
        mc_rows=tuple(rows),
    )


def _mc_row_star(args) -> dict:
    return _mc_row(*args)


SWEEP_PARAMETERS = ("coefficient_variance", "clue_mass", "pattern_mass", "kl_threshold")


@dataclass(frozen=True)
class SweepRow:
    parameter: str
    value: float
    metric: str
    mean: float


def sensitivity_sweep(
    grid: Mapping[str, Sequence[float]],
    base_config: GeneratorConfig | None = None,
    engine_config: EngineConfig | None = None,
    prior: PriorConfig | None = None,
    seed: int = 42,
    *,
    n_datasets: int = 20,
    jobs: int = 1,
) -> list[SweepRow]:
    """Small Monte Carlo per grid point over the tunable thresholds; long-
    format rows (parameter, value, metric, mean)."""
    base_config = base_config or GeneratorConfig()
    engine_config = engine_config or EngineConfig()
    prior = prior or PriorConfig()
    rows: list[SweepRow] = []
    for parameter, values in grid.items():
        if parameter not in SWEEP_PARAMETERS:
            raise ValueError(
                f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}"
            )
        for value in values:
            point_prior = prior
            point_engine = engine_config
            if parameter == "coefficient_variance":
                point_prior = replace(prior, coefficient_variance=value)
            else:
                point_engine = replace(engine_config, **{parameter: value})
            report = monte_carlo(
                n_datasets,
                base_config,
                point_engine,
                point_prior,
                seed,
                jobs=jobs,
            )
            assert report.mc_summary is not None
            for metric in METRIC_KEYS:
                rows.append(
                    SweepRow(parameter, float(value), metric, report.mc_summary[metric].mean)
                )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["parameter", "value", "metric", "mean"])
        for row in rows:
            writer.writerow([row.parameter, repr(row.value), row.metric, repr(row.mean)])


def contraction_trace(timeline: TierTimeline) -> list[dict]:
    """Per-day posterior location, interval bounds, and tier -- the plot data
    for posterior-contraction figures."""
    if not timeline.entries:
        raise ValueError("empty timeline")
    return [
        {
            "day": e.day,
            "location": e.location,
            "ci_lo": e.ci_lo,
            "ci_hi": e.ci_hi,
            "tier": e.tier.label,
        }
        for e in timeline.entries
    ]


def write_contraction_csv(timeline: TierTimeline, path: str | Path) -> None:
    rows = contraction_trace(timeline)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "location", "ci_lo", "ci_hi", "tier"])
        for row in rows:
            writer.writerow(
                [row["day"], repr(row["location"]), repr(row["ci_lo"]), repr(row["ci_hi"]), row["tier"]]
            )


def write_mc_rows_csv(report: ExperimentReport, path: str | Path) -> None:
    """Per-dataset raw metrics (long Monte Carlo runs only)."""
    if report.mc_rows is None:
        raise ValueError("report carries no Monte Carlo rows")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dataset_index", "noise_sd", *METRIC_KEYS])
        for row in report.mc_rows:
            writer.writerow(
                [row["dataset_index"], repr(row["noise_sd"])]
                + ["" if row[k] is None else repr(float(row[k])) for k in METRIC_KEYS]
            )


def report_markdown(report: ExperimentReport, title: str = "Experiment report") -> str:
    """Human-readable Markdown rendering of a report."""
    lines = [f"# {title}", ""]
    if report.detections:
        lines += ["## Detection days", ""]
        methods = (
            METHOD_PROGRESSIVE_CLUE,
            METHOD_PROGRESSIVE_PATTERN,
            METHOD_PROGRESSIVE_CORRELATION,
            METHOD_FIXED,
            METHOD_NAIVE,
        )
        by_pair: dict[PairKey, dict[str, int | None]] = {}
        for record in report.detections:
            by_pair.setdefault(record.pair, {})[record.method] = record.day
        lines.append("| pair | clue | pattern | correlation | fixed | naive |")
        lines.append("|---|---|---|---|---|---|")
        for pair in sorted(by_pair, key=lambda p: (p.outcome, p.factor)):
            cells = [
                "-" if by_pair[pair].get(m) is None else str(by_pair[pair][m])
                for m in methods
            ]
            lines.append(f"| {pair} | " + " | ".join(cells) + " |")
        lines.append("")
    lines += ["## Metrics", ""]
    lines.append("| metric | value |")
    lines.append("|---|---|")
    lines.append(f"| fdr_at_day30 | {report.fdr_at_day30:.4f} |")
    if report.fdr_denominator_empty:
        lines.append("| fdr_denominator_empty | true |")
    if report.ci_coverage_day90 is not None:
        lines.append(f"| ci_coverage_day90 | {report.ci_coverage_day90:.4f} |")
    if report.directional_accuracy_pre14 is not None:
        lines.append(
            f"| directional_accuracy_pre14 | {report.directional_accuracy_pre14:.4f} |"
        )
    lines.append("")
    if report.ks_results:
        lines += ["## Posterior predictive calibration", ""]
        lines.append("| pair | KS statistic | p-value |")
        lines.append("|---|---|---|")
        for pair in sorted(report.ks_results, key=lambda p: (p.outcome, p.factor)):
            stat, p = report.ks_results[pair]
            lines.append(f"| {pair} | {stat:.4f} | {p:.4f} |")
        lines.append("")
    if report.mc_summary is not None:
        n = next(iter(report.mc_summary.values())).n
        lines += [f"## Monte Carlo summary (n = {n})", ""]
        lines.append("| metric | mean | sd | 95% CI |")
        lines.append("|---|---|---|---|")
        for key in METRIC_KEYS:
            s = report.mc_summary[key]
            lines.append(
                f"| {key} | {s.mean:.3f} | {s.sd:.3f} | [{s.ci_lo:.3f}, {s.ci_hi:.3f}] |"
            )
        lines.append("")
    return "\n".join(lines)
