"""Config-driven pipeline assembly, experiment grids with caching, and reports.

A pipeline family is either SIMILARITY (fused similarity blocks -> classifier)
or HYBRID (PCA-reduced CLS embedding prefixed to the similarity blocks). Grid
cells are cached by a content hash of (resolved config, dataset bytes, store
bytes), so reruns recompute nothing and interrupted runs resume.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import learn
from .corpus import FoldPlan, PairDataset, RequirementPair, load_pairs
from .errors import BadConfig, MissingStore
from .evaluation import CvResult, MetricReport, cross_validate
from .llmknow import (
    CLS_MODELS,
    EmbeddingStore,
    FusionStrategy,
    LlmModelId,
    fit_pca,
    fuse,
    llm_sim_vector,
    load_store,
    reduce as pca_reduce,
)
from .simtrad import LatentConfig, Rep, TraditionalScorer

FAMILIES = ("SIMILARITY", "HYBRID")


@dataclass(frozen=True)
class PipelineConfig:
    family: str
    fusion: FusionStrategy
    classifier: learn.ClassifierSpec | None = None
    search: dict | None = None
    cls_model: LlmModelId | None = None
    cls_dim: int | None = None
    dataset: str | None = None
    store: str | None = None
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BadConfig(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "HYBRID" and (self.cls_model is None or self.cls_dim is None):
            raise BadConfig("HYBRID pipelines require cls_model and cls_dim")
        if self.family == "SIMILARITY" and (self.cls_model is not None or self.cls_dim is not None):
            raise BadConfig("SIMILARITY pipelines must not configure a CLS source")
        if self.classifier is None and self.search is None:
            raise BadConfig("need a classifier spec or a search block")
        if self.family == "HYBRID" and self.cls_model not in CLS_MODELS:
            raise BadConfig(f"cls_model must be one of the CLS subset, got {self.cls_model}")

    @classmethod
    def from_dict(cls, d: dict, params: dict | None = None) -> "PipelineConfig":
        merged_params = dict(params or {})
        merged_params.update(d.get("params", {}))
        classifier = None
        if "classifier" in d:
            c = d["classifier"]
            classifier = learn.ClassifierSpec(
                algo=c["algo"],
                hyperparams=dict(c.get("hyperparams", {})),
                seed=c.get("seed", d.get("seed", 0)),
            )
        cls_model = d.get("cls_model")
        if cls_model is not None:
            cls_model = LlmModelId(cls_model.lower())
        try:
            fusion = FusionStrategy(d["fusion"].lower())
        except (KeyError, ValueError):
            raise BadConfig(f"bad or missing fusion strategy: {d.get('fusion')!r}") from None
        return cls(
            family=d.get("family", "SIMILARITY").upper(),
            fusion=fusion,
            classifier=classifier,
            search=d.get("search"),
            cls_model=cls_model,
            cls_dim=d.get("cls_dim"),
            dataset=d.get("dataset"),
            store=d.get("store"),
            seed=d.get("seed", 0),
            params=merged_params,
        )

    def resolved(self) -> dict:
        """Full audit dict: feeding it back through from_dict reproduces the cell."""
        out = {
            "family": self.family,
            "fusion": self.fusion.value,
            "cls_model": self.cls_model.value if self.cls_model else None,
            "cls_dim": self.cls_dim,
            "seed": self.seed,
            "params": _jsonable(self.params),
            "search": _jsonable(self.search),
        }
        if self.classifier is not None:
            out["classifier"] = {
                "algo": self.classifier.algo,
                "hyperparams": _jsonable(self.classifier.hyperparams),
                "seed": self.classifier.seed,
            }
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


def _expected_dim(cfg: PipelineConfig) -> int:
    dim = 10 * len(cfg.fusion.blocks())
    if cfg.family == "HYBRID":
        dim += cfg.cls_dim
    return dim


class FittedPipeline:
    def __init__(self, cfg, scorer, store, pca, model, classes):
        self.cfg = cfg
        self.scorer = scorer
        self.store = store
        self.pca = pca
        self.model = model
        self.classes = classes

    def artifacts(self):
        if self.scorer is not None:
            yield from self.scorer.artifacts()
        if self.pca is not None:
            yield self.pca

    def feature_vector(self, pair: RequirementPair):
        blocks = {}
        needed = set(self.cfg.fusion.blocks())
        for rep in Rep:
            if rep.value in needed:
                blocks[rep.value] = np.asarray(
                    self.scorer.method_scores(rep, pair.left.text, pair.right.text)
                )
        if "llm" in needed:
            blocks["llm"] = llm_sim_vector(pair.pair_id, self.store)
        if self.pca is not None:
            emb = self.store.cls_embedding(pair.pair_id, self.cfg.cls_model)
            blocks["cls"] = pca_reduce(self.pca, emb)
        return fuse(
            self.cfg.fusion,
            tfidf=blocks.get("tfidf"),
            bm25=blocks.get("bm25"),
            llm=blocks.get("llm"),
            cls=blocks.get("cls"),
        )

    def feature_matrix(self, pairs) -> tuple[np.ndarray, list[str]]:
        fused = [self.feature_vector(p) for p in pairs]
        return np.stack([f.values for f in fused]), fused[0].feature_names()

    def predict(self, pairs) -> list[str]:
        X, _ = self.feature_matrix(pairs)
        return list(learn.predict(self.model, X))


class ExecutablePipeline:
    """Fit-on-train / score-on-test closure for one pipeline configuration."""

    def __init__(self, cfg: PipelineConfig, store: EmbeddingStore | None):
        self.cfg = cfg
        self.store = store

    def fit(self, train_pairs, train_folds: frozenset, train_classifier: bool = True) -> FittedPipeline:
        cfg = self.cfg
        scorer = None
        needed_reps = tuple(r for r in Rep if r.value in cfg.fusion.blocks())
        if needed_reps:
            texts, seen = [], set()
            for p in train_pairs:
                for req in (p.left, p.right):
                    if req.id not in seen:
                        seen.add(req.id)
                        texts.append(req.text)
            rep_params = cfg.params.get("rep", {})
            bm25 = rep_params.get("bm25", {})
            tok = rep_params.get("tokenize", {})
            scorer = TraditionalScorer.fit(
                texts,
                cfg=LatentConfig.from_params(cfg.params),
                bm25_k1=bm25.get("k1", 1.5),
                bm25_b=bm25.get("b", 0.75),
                tokenize_kwargs={
                    k: tok[k] for k in ("drop_stopwords", "stem") if k in tok
                },
                fold_ids=train_folds,
                reps=needed_reps,
            )
        pca = None
        if cfg.family == "HYBRID":
            if self.store is None:
                raise MissingStore("HYBRID pipeline needs an embedding store")
            embeddings = [
                self.store.cls_embedding(p.pair_id, cfg.cls_model) for p in train_pairs
            ]
            pca = fit_pca(embeddings, cfg.cls_dim, fold_ids=train_folds)
        if "llm" in cfg.fusion.blocks() and self.store is None:
            raise MissingStore("fusion strategy includes the LLM block but no store is loaded")

        fitted = FittedPipeline(cfg, scorer, self.store, pca, model=None, classes=None)
        if train_classifier:
            X, _ = fitted.feature_matrix(train_pairs)
            y = np.array([p.label.value for p in train_pairs])
            spec = cfg.classifier
            if cfg.search:
                spec = self._run_search(spec, X, y)
            fitted.model = learn.fit(spec, X, y)
            fitted.classes = fitted.model.classes
        return fitted

    def _run_search(self, template, X, y):
        cfg = self.cfg
        search = cfg.search
        template = template or learn.ClassifierSpec(
            algo=search["algo"], hyperparams={}, seed=cfg.seed
        )
        space = search.get("space") or learn.DEFAULT_SPACES.get(template.algo.upper())
        inner_k = search.get("inner_k", 3)
        objective = search.get("objective")
        if objective is None:
            positives = sorted(set(y) - {"neutral"})
            objective = f"f1:{positives[0]}" if positives else "accuracy"
        inner = _stratified_rows(y, inner_k, cfg.seed)
        best, trials = learn.search_hyperparams(
            template, space, search.get("budget", 10), objective, X, y, inner, seed=cfg.seed
        )
        self.trials = trials
        return best


def _stratified_rows(y, k: int, seed: int) -> np.ndarray:
    """Per-label shuffled round-robin fold ids for rows of a feature matrix."""
    rng = np.random.default_rng(seed)
    folds = np.zeros(len(y), dtype=int)
    for label in np.unique(y):
        rows = np.nonzero(y == label)[0]
        rng.shuffle(rows)
        for pos, r in enumerate(rows):
            folds[r] = pos % k
    return folds


def assemble(cfg: PipelineConfig) -> ExecutablePipeline:
    """Validate a config and bind its store; returns the executable pipeline."""
    store = None
    needs_store = "llm" in cfg.fusion.blocks() or cfg.family == "HYBRID"
    if needs_store:
        if cfg.store is None:
            raise MissingStore("config references LLM knowledge but names no store file")
        if not os.path.exists(cfg.store):
            raise MissingStore(f"store file not found: {cfg.store}")
        store = load_store(cfg.store)
    return ExecutablePipeline(cfg, store)


# ---------------------------------------------------------------------------
# experiment plans


@dataclass(frozen=True)
class ExperimentPlan:
    cells: tuple[dict, ...]
    master_seed: int
    out_dir: str
    folds: int = 3
    metric: str = "f1"
    params: dict = field(default_factory=dict)
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict, out_dir=None, master_seed=None, workers=None) -> "ExperimentPlan":
        cells = [dict(c) for c in d.get("cells", [])]
        grid = d.get("grid")
        if grid:
            cells.extend(_expand_grid(grid))
        for imp in d.get("imported", []):
            cells.append({"imported": imp["name"], "predictions": imp["predictions"],
                          "dataset": imp.get("dataset", imp["name"])})
        if not cells:
            raise BadConfig("experiment plan has no cells")
        return cls(
            cells=tuple(cells),
            master_seed=master_seed if master_seed is not None else d.get("master_seed", 0),
            out_dir=out_dir if out_dir is not None else d.get("out_dir", "runs"),
            folds=d.get("folds", 3),
            metric=d.get("metric", "f1"),
            params=d.get("params", {}),
            workers=workers if workers is not None else d.get("workers", 1),
        )


def _expand_grid(grid: dict) -> list[dict]:
    cells = []
    datasets = grid["datasets"]
    stores = grid.get("stores", {})
    for ds_path in datasets:
        for fusion in grid.get("fusions", ["tfidf_bm25_llm"]):
            for clf in grid["classifiers"]:
                for cls_variant in grid.get("cls_variants", [None]):
                    cell = {
                        "dataset": ds_path,
                        "store": stores.get(ds_path),
                        "fusion": fusion,
                        "classifier": dict(clf),
                    }
                    if cls_variant:
                        cell["family"] = "HYBRID"
                        cell["cls_model"] = cls_variant["model"]
                        cell["cls_dim"] = cls_variant["dim"]
                    else:
                        cell["family"] = "SIMILARITY"
                    cells.append(cell)
    return cells


def _derive_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0] % (2**31))


def _file_sha(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class ReportRow:
    dataset: str
    family: str
    strategy: str
    cls_model: str
    cls_dim: str
    classifier: str
    metrics: dict
    error: str | None = None
    best: bool = False

    def sort_key(self):
        return (self.dataset, self.family, self.strategy, self.cls_model,
                str(self.cls_dim), self.classifier)


@dataclass
class ReportTable:
    rows: list
    metric: str

    def mark_best(self):
        by_dataset: dict[str, list[ReportRow]] = {}
        for row in self.rows:
            row.best = False
            if row.error is None and self.metric in row.metrics:
                by_dataset.setdefault(row.dataset, []).append(row)
        for rows in by_dataset.values():
            top = max(r.metrics[self.metric][0] for r in rows)
            for r in rows:
                if r.metrics[self.metric][0] == top:
                    r.best = True


@dataclass
class RunStats:
    computed: int = 0
    cached: int = 0
    failed: int = 0


def _cell_result_to_row(cell: dict, payload: dict) -> ReportRow:
    return ReportRow(
        dataset=payload["dataset_name"],
        family=cell.get("family", "SIMILARITY") if "imported" not in cell else "IMPORTED",
        strategy=cell.get("fusion", "-") if "imported" not in cell else cell["imported"],
        cls_model=cell.get("cls_model") or "-",
        cls_dim=str(cell.get("cls_dim")) if cell.get("cls_dim") else "-",
        classifier=cell.get("classifier", {}).get("algo", "-") if "imported" not in cell else "-",
        metrics={k: tuple(v) for k, v in payload.get("aggregate", {}).items()},
        error=payload.get("error"),
    )


def _run_cell(cell: dict, plan: ExperimentPlan, index: int, cells_dir: str):
    """Run one grid cell, or return its cached result.

    Successful cells persist as <key>.json and are never recomputed while the
    inputs hash the same; failures persist as <key>.error.json for audit but
    are retried on the next run.
    """
    payload = {"cell": cell}
    key = None
    try:
        cell_seed = _derive_seed(plan.master_seed, index)
        if "imported" in cell:
            hashes = {"predictions_sha256": _file_sha(cell["predictions"])}
            key_src = {"cell": cell}
            cfg = None
        else:
            cfg = PipelineConfig.from_dict({**cell, "seed": cell_seed}, params=plan.params)
            payload["resolved_config"] = cfg.resolved()
            hashes = {"dataset_sha256": _file_sha(cell["dataset"])}
            if cell.get("store"):
                hashes["store_sha256"] = _file_sha(cell["store"])
            key_src = {"config": payload["resolved_config"], "folds": plan.folds}
        payload.update(hashes)
        key = hashlib.sha256(_canonical_json({**key_src, **hashes}).encode()).hexdigest()
        artifact_path = os.path.join(cells_dir, f"{key}.json")
        if os.path.exists(artifact_path):
            with open(artifact_path, "r", encoding="utf-8") as fh:
                return cell, json.load(fh), True

        if cfg is None:
            cv, ds_name = import_predictions(cell["predictions"])
            payload["dataset_name"] = cell.get("dataset", ds_name)
        else:
            ds = load_pairs(cell["dataset"], name=os.path.basename(cell["dataset"]))
            payload["dataset_name"] = ds.name
            cv = cross_validate(cfg, ds, plan.folds, seed=cell_seed)
        payload["aggregate"] = {k: list(v) for k, v in cv.aggregate.items()}
        payload["per_fold"] = [
            {
                "macro_precision": rep.macro_precision,
                "macro_recall": rep.macro_recall,
                "macro_f1": rep.macro_f1,
                "per_class": {
                    str(c): [m.precision, m.recall, m.f1, m.support]
                    for c, m in sorted(rep.per_class.items())
                },
            }
            for rep in cv.folds
        ]
    except Exception as e:  # cell isolation: one failure must not kill the grid
        payload.setdefault(
            "dataset_name", str(cell.get("dataset", cell.get("imported", "?")))
        )
        payload["error"] = f"{type(e).__name__}: {e}"
        if key is None:
            key = hashlib.sha256(
                _canonical_json({"cell": cell, "index": index}).encode()
            ).hexdigest()
        error_path = os.path.join(cells_dir, f"{key}.error.json")
        with open(error_path, "w", encoding="utf-8") as fh:
            fh.write(_canonical_json(payload))
        return cell, payload, False
    with open(artifact_path, "w", encoding="utf-8") as fh:
        fh.write(_canonical_json(payload))
    return cell, payload, False


def run_experiment(plan: ExperimentPlan):
    """Execute (or resume) every cell; returns (ReportTable, RunStats)."""
    cells_dir = os.path.join(plan.out_dir, "cells")
    os.makedirs(cells_dir, exist_ok=True)
    stats = RunStats()
    results = [None] * len(plan.cells)

    def work(i):
        return i, _run_cell(dict(plan.cells[i]), plan, i, cells_dir)

    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            for i, res in pool.map(work, range(len(plan.cells))):
                results[i] = res
    else:
        for i in range(len(plan.cells)):
            results[i] = work(i)[1]

    rows = []
    for cell, payload, was_cached in results:
        if was_cached:
            stats.cached += 1
        elif payload.get("error"):
            stats.failed += 1
        else:
            stats.computed += 1
        rows.append(_cell_result_to_row(cell, payload))
    table = ReportTable(rows=sorted(rows, key=ReportRow.sort_key), metric=plan.metric)
    table.mark_best()
    emit_report(table, "csv", os.path.join(plan.out_dir, "report.csv"))
    emit_report(table, "markdown", os.path.join(plan.out_dir, "report.md"))
    return table, stats


REPORT_COLUMNS = (
    "dataset", "family", "strategy", "cls_model", "cls_dim", "classifier",
    "metric_mean", "metric_std", "macro_f1_mean", "best", "error",
)


def _row_cells(row: ReportRow) -> list[str]:
    mean, std = row.metrics.get("f1", (None, None))
    macro = row.metrics.get("macro_f1", (None, None))[0]
    return [
        row.dataset, row.family, row.strategy, row.cls_model, str(row.cls_dim),
        row.classifier,
        "" if mean is None else repr(mean),
        "" if std is None else repr(std),
        "" if macro is None else repr(macro),
        "*" if row.best else "",
        row.error or "",
    ]


def emit_report(table: ReportTable, fmt: str, path=None) -> str:
    rows = sorted(table.rows, key=ReportRow.sort_key)
    if fmt == "csv":
        lines = [",".join(REPORT_COLUMNS)]
        for row in rows:
            lines.append(",".join(_csv_escape(c) for c in _row_cells(row)))
        text = "\n".join(lines) + "\n"
    elif fmt in ("md", "markdown"):
        header = "| " + " | ".join(REPORT_COLUMNS) + " |"
        sep = "|" + "|".join(["---"] * len(REPORT_COLUMNS)) + "|"
        lines = [header, sep]
        for row in rows:
            cells = [c.replace("|", "/") for c in _row_cells(row)]
            lines.append("| " + " | ".join(cells) + " |")
        text = "\n".join(lines) + "\n"
    else:
        raise BadConfig(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _csv_escape(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def import_predictions(path) -> tuple[CvResult, str]:
    """Fold scores for externally produced predictions (CSV: fold,pair_id,y_true,y_pred)."""
    by_fold: dict[str, list[tuple[str, str]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"fold", "y_true", "y_pred"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise BadConfig(f"{path}: predictions CSV needs columns {sorted(required)}")
        for row in reader:
            by_fold.setdefault(row["fold"], []).append((row["y_true"], row["y_pred"]))
    if not by_fold:
        raise BadConfig(f"{path}: no prediction rows")
    classes = sorted({lab for rows in by_fold.values() for pair in rows for lab in pair})
    reports = [
        MetricReport.from_predictions(
            [t for t, _ in rows], [p for _, p in rows], classes
        )
        for _, rows in sorted(by_fold.items())
    ]
    positives = [c for c in classes if c != "neutral"]
    positive = positives[0] if positives else classes[0]
    return CvResult.from_folds(reports, positive_class=positive), os.path.basename(str(path))


def export_features(cfg: PipelineConfig, ds: PairDataset, fold_plan: FoldPlan, out_dir) -> list[str]:
    """Per-fold train/test feature matrices + labels, one CSV per split."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for test_fold in range(fold_plan.k):
        train_pairs, test_pairs, train_folds = fold_plan.split(ds, test_fold)
        fitted = assemble(cfg).fit(train_pairs, train_folds, train_classifier=False)
        for split, pairs in (("train", train_pairs), ("test", test_pairs)):
            X, names = fitted.feature_matrix(pairs)
            path = os.path.join(out_dir, f"features_fold{test_fold}_{split}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["pair_id", *names, "label"])
                for pair, row in zip(pairs, X):
                    writer.writerow([pair.pair_id, *[repr(float(v)) for v in row], pair.label.value])
            written.append(path)
    return written


def load_features(path) -> tuple[list[str], np.ndarray, list[str]]:
    """Reload an export_features CSV as (pair_ids, matrix, labels)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        pair_ids, rows, labels = [], [], []
        for row in reader:
            pair_ids.append(row[0])
            rows.append([float(v) for v in row[1:-1]])
            labels.append(row[-1])
    return pair_ids, np.asarray(rows), labels
