"""Command-line front end.

Subcommands:

* ``generate``    -- synthesize a dataset plus its ground-truth manifest;
* ``replay``      -- run the daily tier engine over a dataset and emit
                     per-pair timelines, contraction traces, and insight
                     lists at milestone days;
* ``experiment``  -- ``single`` / ``montecarlo`` / ``sweep`` evaluations with
                     JSON + Markdown reports;
* ``report``      -- re-render a saved report JSON as Markdown.

All randomness flows from ``--seed``; rerunning any command with identical
inputs produces byte-identical outputs (the run manifest's wall-clock field
aside).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .configio import (
    ConfigError,
    engine_config_to_json_dict,
    load_engine_bundle,
    load_generator_config,
    write_run_manifest,
)
from .conjugate import PriorConfig
from .dataset import DatasetError, PairKey, load_dataset, save_dataset
from .harness import (
    ExperimentReport,
    MetricSummary,
    evaluate_single,
    monte_carlo,
    report_markdown,
    sensitivity_sweep,
    write_contraction_csv,
    write_mc_rows_csv,
    write_sweep_csv,
)
from .jsonutil import read_json, write_json
from .scoring import build_insights, load_valence_map
from .synth import (
    DEFAULT_SEED,
    default_generator_config,
    default_valence_map,
    generate,
    load_ground_truth,
    save_ground_truth,
)
from .tiers import EngineConfig, run_engine, write_timeline_csv


def _pair_slug(pair: PairKey) -> str:
    return f"{pair.factor}__{pair.outcome}"


def _ensure_out(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _engine_bundle(args) -> tuple[EngineConfig, PriorConfig]:
    if getattr(args, "engine_config", None):
        return load_engine_bundle(args.engine_config)
    return EngineConfig(), PriorConfig()


def cmd_generate(args) -> int:
    started = time.time()
    if args.config:
        config = load_generator_config(args.config)
    else:
        config = default_generator_config()
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    out = _ensure_out(args.out)
    dataset, truth = generate(config)
    dataset_name = f"dataset.{args.format}"
    save_dataset(dataset, out / dataset_name, args.format)
    save_ground_truth(truth, out / "ground_truth.json")
    write_run_manifest(
        out,
        "generate",
        config.to_json_dict(),
        config.seed,
        __version__,
        [dataset_name, "ground_truth.json"],
        started,
    )
    print(f"wrote {out / dataset_name} (span {dataset.span} days)")
    return 0


def _replay_roster(args, dataset) -> list[PairKey]:
    truth_path = None
    if args.truth:
        truth_path = Path(args.truth)
    else:
        sibling = Path(args.dataset).parent / "ground_truth.json"
        if sibling.exists():
            truth_path = sibling
    if truth_path is not None:
        truth = load_ground_truth(truth_path)
        return list(truth.all_pairs)
    return [
        PairKey(factor, outcome)
        for outcome in dataset.vitals
        for factor in dataset.factors
    ]


def cmd_replay(args) -> int:
    started = time.time()
    fmt = args.format or ("csv" if args.dataset.endswith(".csv") else "jsonl")
    dataset = load_dataset(args.dataset, fmt)
    engine, prior = _engine_bundle(args)
    valences = load_valence_map(args.valences) if args.valences else default_valence_map()
    roster = _replay_roster(args, dataset)
    missing = [
        p
        for p in roster
        if p.factor not in dataset.factors or p.outcome not in dataset.vitals
    ]
    if missing:
        raise DatasetError(f"pairs not present in dataset schema: {missing}")
    out = _ensure_out(args.out)
    timelines = run_engine(dataset, roster, prior, engine)
    outputs = []
    for pair, timeline in timelines.items():
        name = f"timeline_{_pair_slug(pair)}.csv"
        write_timeline_csv(timeline, out / name)
        outputs.append(name)
        trace_name = f"trace_{_pair_slug(pair)}.csv"
        write_contraction_csv(timeline, out / trace_name)
        outputs.append(trace_name)
    milestones = sorted(
        {min(m, dataset.span) for m in args.milestones if m >= 1}
    )
    for day in milestones:
        insights = build_insights(timelines, dataset, valences, day)
        name = f"insights_day{day}.json"
        write_json(out / name, [i.to_json_dict() for i in insights])
        outputs.append(name)
    write_run_manifest(
        out,
        "replay",
        {
            "engine": engine_config_to_json_dict(engine),
            "prior": {
                "coefficient_variance": prior.coefficient_variance,
                "ig_shape": prior.ig_shape,
                "ig_rate": prior.ig_rate,
            },
            "dataset": str(args.dataset),
            "milestones": milestones,
        },
        0,
        __version__,
        outputs,
        started,
    )
    print(f"wrote {len(outputs)} files to {out}")
    return 0


def cmd_experiment(args) -> int:
    started = time.time()
    gen_config = (
        load_generator_config(args.gen_config)
        if args.gen_config
        else default_generator_config()
    )
    if args.seed is not None:
        from dataclasses import replace

        gen_config = replace(gen_config, seed=args.seed)
    engine, prior = _engine_bundle(args)
    out = _ensure_out(args.out)
    seed = args.seed if args.seed is not None else gen_config.seed
    outputs = []

    if args.mode == "single":
        dataset, truth = generate(gen_config)
        report = evaluate_single(
            dataset, truth, engine, prior, fdr_counting=args.fdr_counting
        )
        write_json(out / "report.json", report.to_json_dict())
        (out / "report.md").write_text(
            report_markdown(report, "Single-dataset experiment report")
        )
        outputs += ["report.json", "report.md"]
    elif args.mode == "montecarlo":
        report = monte_carlo(
            args.n_datasets,
            gen_config,
            engine,
            prior,
            seed,
            fdr_counting=args.fdr_counting,
            jobs=args.jobs,
        )
        write_json(out / "report.json", report.to_json_dict())
        (out / "report.md").write_text(
            report_markdown(report, f"Monte Carlo report (n = {args.n_datasets})")
        )
        write_mc_rows_csv(report, out / "mc_datasets.csv")
        outputs += ["report.json", "report.md", "mc_datasets.csv"]
    elif args.mode == "sweep":
        if not args.grid:
            raise ConfigError("sweep mode requires --grid")
        grid = read_json(args.grid)
        rows = sensitivity_sweep(
            grid,
            gen_config,
            engine,
            prior,
            seed,
            n_datasets=args.n_datasets,
            jobs=args.jobs,
        )
        write_sweep_csv(rows, out / "sweep.csv")
        outputs.append("sweep.csv")
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown experiment mode {args.mode!r}")

    write_run_manifest(
        out,
        f"experiment {args.mode}",
        {
            "generator": gen_config.to_json_dict(),
            "engine": engine_config_to_json_dict(engine),
            "prior": {
                "coefficient_variance": prior.coefficient_variance,
                "ig_shape": prior.ig_shape,
                "ig_rate": prior.ig_rate,
            },
            "mode": args.mode,
            "n_datasets": args.n_datasets,
        },
        seed,
        __version__,
        outputs,
        started,
    )
    print(f"wrote {len(outputs)} files to {out}")
    return 0


def _report_from_json_dict(data: dict) -> ExperimentReport:
    from .harness import DetectionRecord

    detections = tuple(
        DetectionRecord(PairKey(d["factor"], d["outcome"]), d["method"], d["day"])
        for d in data.get("detections", [])
    )
    ks_results = {}
    for key, value in data.get("ks_results", {}).items():
        factor, outcome = key.split("->", 1)
        ks_results[PairKey(factor, outcome)] = (value["ks_stat"], value["p_value"])
    mc_summary = None
    if "mc_summary" in data:
        mc_summary = {
            key: MetricSummary(s["mean"], s["sd"], s["ci_lo"], s["ci_hi"], s["n"])
            for key, s in data["mc_summary"].items()
        }
    return ExperimentReport(
        detections=detections,
        fdr_at_day30=data["fdr_at_day30"],
        fdr_denominator_empty=data.get("fdr_denominator_empty", False),
        ci_coverage_day90=data.get("ci_coverage_day90"),
        directional_accuracy_pre14=data.get("directional_accuracy_pre14"),
        ks_results=ks_results,
        mc_summary=mc_summary,
    )


def cmd_report(args) -> int:
    started = time.time()
    data = read_json(args.config)
    report = _report_from_json_dict(data)
    out = _ensure_out(args.out)
    (out / "report.md").write_text(report_markdown(report))
    write_run_manifest(
        out, "report", {"source": str(args.config)}, 0, __version__, ["report.md"], started
    )
    print(f"wrote {out / 'report.md'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tierbayes",
        description="Progressive Bayesian confidence tiers for N-of-1 daily logs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="synthesize a dataset with ground truth")
    p_gen.add_argument("--config", help="generator config JSON")
    p_gen.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p_gen.set_defaults(func=cmd_generate)

    p_rep = sub.add_parser("replay", help="run the tier engine over a dataset")
    p_rep.add_argument("--dataset", required=True, help="dataset file (csv or jsonl)")
    p_rep.add_argument("--format", choices=("csv", "jsonl"), default=None)
    p_rep.add_argument("--config", dest="engine_config", help="engine config JSON")
    p_rep.add_argument("--truth", help="ground-truth manifest for the pair roster")
    p_rep.add_argument("--valences", help="valence map JSON")
    p_rep.add_argument(
        "--milestones",
        type=lambda s: [int(x) for x in s.split(",")],
        default=[7, 14, 30, 90],
        help="comma-separated insight milestone days",
    )
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=cmd_replay)

    p_exp = sub.add_parser("experiment", help="run evaluations against ground truth")
    p_exp.add_argument("mode", choices=("single", "montecarlo", "sweep"))
    p_exp.add_argument("--gen-config", help="generator config JSON")
    p_exp.add_argument("--engine-config", help="engine config JSON")
    p_exp.add_argument("--grid", help="sweep grid JSON (parameter -> values)")
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--n-datasets", type=int, default=100)
    p_exp.add_argument("--jobs", type=int, default=1)
    p_exp.add_argument(
        "--fdr-counting", choices=("max_tier", "tier_events"), default="max_tier"
    )
    p_exp.add_argument("--out", required=True)
    p_exp.set_defaults(func=cmd_experiment)

    p_rpt = sub.add_parser("report", help="re-render a report JSON as Markdown")
    p_rpt.add_argument("--config", required=True, help="report.json path")
    p_rpt.add_argument("--out", required=True)
    p_rpt.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
