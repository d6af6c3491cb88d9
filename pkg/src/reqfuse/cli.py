"""Command-line entry points: fit-report, evaluate, export-features, report, synth."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import load_pairs, stratified_kfold
from .evaluation import cross_validate, write_metric_report
from .pipeline import (
    ExperimentPlan,
    PipelineConfig,
    ReportRow,
    ReportTable,
    _cell_result_to_row,
    emit_report,
    export_features,
    run_experiment,
)
from .synthetic import write_benchmark


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _pipeline_config(args) -> PipelineConfig:
    cfg = _load_json(args.config)
    if args.dataset:
        cfg["dataset"] = args.dataset
    if getattr(args, "store", None):
        cfg["store"] = args.store
    if args.seed is not None:
        cfg["seed"] = args.seed
    return PipelineConfig.from_dict(cfg)


def _cmd_fit_report(args) -> int:
    plan = ExperimentPlan.from_dict(
        _load_json(args.config),
        out_dir=args.out,
        master_seed=args.seed,
        workers=args.workers,
    )
    table, stats = run_experiment(plan)
    print(f"cells: {stats.computed} computed, {stats.cached} cached, {stats.failed} failed")
    print(f"report: {os.path.join(plan.out_dir, 'report.csv')}")
    return 1 if stats.failed and not (stats.computed or stats.cached) else 0


def _cmd_evaluate(args) -> int:
    cfg = _pipeline_config(args)
    ds = load_pairs(cfg.dataset, name=os.path.basename(cfg.dataset))
    cv = cross_validate(cfg, ds, k=args.folds, seed=cfg.seed)
    for name in ("precision", "recall", "f1", "macro_f1"):
        mean, std = cv.aggregate[name]
        print(f"{name}: {mean:.4f} +/- {std:.4f}")
    if args.out:
        write_metric_report(cv, args.out)
        print(f"metric report: {args.out}")
    return 0


def _cmd_export_features(args) -> int:
    cfg = _pipeline_config(args)
    ds = load_pairs(cfg.dataset, name=os.path.basename(cfg.dataset))
    plan = stratified_kfold(ds, k=args.folds, seed=cfg.seed)
    written = export_features(cfg, ds, plan, args.out)
    for path in written:
        print(path)
    return 0


def _cmd_report(args) -> int:
    cells_dir = os.path.join(args.from_dir, "cells")
    if not os.path.isdir(cells_dir):
        print(f"no cells directory under {args.from_dir}", file=sys.stderr)
        return 1
    rows = []
    for name in sorted(os.listdir(cells_dir)):
        if not name.endswith(".json"):
            continue
        payload = _load_json(os.path.join(cells_dir, name))
        rows.append(_cell_result_to_row(payload.get("cell", {}), payload))
    table = ReportTable(rows=sorted(rows, key=ReportRow.sort_key), metric=args.metric)
    table.mark_best()
    text = emit_report(table, args.format, path=args.out)
    if args.out:
        print(f"report: {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_synth(args) -> int:
    csv_path, store_path = write_benchmark(args.out, n_pairs=args.pairs, seed=args.seed or 7)
    print(csv_path)
    print(store_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reqfuse",
        description="Similarity-knowledge pipelines for duplicate/conflicting requirement pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-report", help="run an experiment plan and write the report")
    p.add_argument("--config", required=True, help="experiment plan JSON")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=_cmd_fit_report)

    p = sub.add_parser("evaluate", help="cross-validate one pipeline config on one dataset")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--dataset", default=None, help="pairs CSV")
    p.add_argument("--store", default=None, help="knowledge store JSONL")
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="metric report CSV path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("export-features", help="write per-fold train/test feature matrices")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_export_features)

    p = sub.add_parser("report", help="assemble a report from cached cell artifacts")
    p.add_argument("--from", dest="from_dir", required=True)
    p.add_argument("--format", choices=["md", "csv"], default="md")
    p.add_argument("--metric", default="f1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("synth", help="write the synthetic benchmark dataset + store")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pairs", type=int, default=400)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
