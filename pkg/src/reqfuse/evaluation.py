"""Confusion-matrix metrics (standard + macro forms) and the CV protocol.

Macro F1 follows the harmonic-mean-of-macro-averages form by default; the
mean-of-per-class-F1 alternative sits behind metrics.macro_f1 =
"per_class_mean". The 0/0 convention for every ratio is 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .corpus import PairDataset, stratified_kfold
from .errors import LeakageDetected, LengthMismatch, UnknownLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    """One-vs-rest counts per class from a single (y_true, y_pred) multiset."""

    classes: tuple
    tp: dict
    fp: dict
    tn: dict
    fn: dict

    def total(self) -> int:
        c = self.classes[0]
        return self.tp[c] + self.fp[c] + self.tn[c] + self.fn[c]


def confusion(y_true, y_pred, classes) -> ConfusionMatrix:
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    if not y_true:
        raise LengthMismatch("need at least one prediction")
    known = set(classes)
    for lab in y_true + y_pred:
        if lab not in known:
            raise UnknownLabel(f"label {lab!r} not in classes {sorted(map(str, known))}")
    tp, fp, tn, fn = {}, {}, {}, {}
    for c in classes:
        tp[c] = fp[c] = tn[c] = fn[c] = 0
        for t, p in zip(y_true, y_pred):
            if t == c and p == c:
                tp[c] += 1
            elif t != c and p == c:
                fp[c] += 1
            elif t == c and p != c:
                fn[c] += 1
            else:
                tn[c] += 1
    return ConfusionMatrix(classes=tuple(classes), tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def standard_metrics(cm: ConfusionMatrix, positive_class) -> tuple[float, float, float]:
    """(precision, recall, F1) of one class; 0/0 ratios are 0."""
    tp = cm.tp[positive_class]
    pr = _ratio(tp, tp + cm.fp[positive_class])
    r = _ratio(tp, tp + cm.fn[positive_class])
    return pr, r, _ratio(2 * pr * r, pr + r)


def macro_metrics(
    precisions, recalls, f1_mode: str = "harmonic"
) -> tuple[float, float, float]:
    """Macro precision/recall are plain means; macro F1 per the selected form."""
    precisions = list(precisions)
    recalls = list(recalls)
    if len(precisions) < 2 or len(precisions) != len(recalls):
        raise LengthMismatch("need per-class precision/recall for >= 2 classes")
    pr_macro = float(np.mean(precisions))
    r_macro = float(np.mean(recalls))
    if f1_mode == "harmonic":
        f1_macro = _ratio(2 * pr_macro * r_macro, pr_macro + r_macro)
    elif f1_mode == "per_class_mean":
        f1_macro = float(
            np.mean([_ratio(2 * p * r, p + r) for p, r in zip(precisions, recalls)])
        )
    else:
        raise ValueError(f"unknown macro F1 mode {f1_mode!r}")
    return pr_macro, r_macro, f1_macro


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricReport:
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float

    @classmethod
    def from_predictions(cls, y_true, y_pred, classes, f1_mode: str = "harmonic") -> "MetricReport":
        cm = confusion(y_true, y_pred, classes)
        per_class = {}
        for c in classes:
            pr, r, f1 = standard_metrics(cm, c)
            per_class[c] = ClassMetrics(pr, r, f1, support=cm.tp[c] + cm.fn[c])
        pr_m, r_m, f1_m = macro_metrics(
            [per_class[c].precision for c in classes],
            [per_class[c].recall for c in classes],
            f1_mode=f1_mode,
        )
        return cls(per_class=per_class, macro_precision=pr_m, macro_recall=r_m, macro_f1=f1_m)


AGGREGATE_METRICS = (
    "precision", "recall", "f1", "macro_precision", "macro_recall", "macro_f1",
)


@dataclass(frozen=True)
class CvResult:
    folds: tuple
    positive_class: object
    aggregate: dict = field(default_factory=dict)

    @classmethod
    def from_folds(cls, folds, positive_class) -> "CvResult":
        values = {name: [] for name in AGGREGATE_METRICS}
        for rep in folds:
            pos = rep.per_class[positive_class]
            values["precision"].append(pos.precision)
            values["recall"].append(pos.recall)
            values["f1"].append(pos.f1)
            values["macro_precision"].append(rep.macro_precision)
            values["macro_recall"].append(rep.macro_recall)
            values["macro_f1"].append(rep.macro_f1)
        aggregate = {
            name: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0)
            for name, v in values.items()
        }
        return cls(folds=tuple(folds), positive_class=positive_class, aggregate=aggregate)


def check_no_leakage(artifacts, test_fold: int, train_folds: frozenset):
    """Every fitted artifact's fold set must exclude the held-out fold."""
    for artifact in artifacts:
        fold_ids = getattr(artifact, "fit_fold_ids", None)
        if fold_ids is None:
            raise LeakageDetected(
                f"fitted artifact {type(artifact).__name__} carries no fold tracking"
            )
        if test_fold in fold_ids or not fold_ids <= train_folds:
            raise LeakageDetected(
                f"{type(artifact).__name__} fitted on folds {sorted(fold_ids)} "
                f"overlaps test fold {test_fold}"
            )


def cross_validate(pipeline_cfg, ds: PairDataset, k: int, seed: int) -> CvResult:
    """Stratified k-fold CV: fit everything on k-1 folds, score the held-out fold.

    Accepts a PipelineConfig or any executable with the same
    fit(train_pairs, train_folds) -> fitted contract.
    """
    if hasattr(pipeline_cfg, "fit"):
        executable = pipeline_cfg
    else:
        from .pipeline import assemble  # local import; pipeline depends on this module

        executable = assemble(pipeline_cfg)
    plan = stratified_kfold(ds, k, seed)
    classes = sorted({p.label.value for p in ds.pairs})
    f1_mode = "harmonic"
    if hasattr(pipeline_cfg, "params") and isinstance(getattr(pipeline_cfg, "params"), dict):
        f1_mode = pipeline_cfg.params.get("metrics", {}).get("macro_f1", "harmonic")
    reports = []
    for test_fold in range(k):
        train_pairs, test_pairs, train_folds = plan.split(ds, test_fold)
        fitted = executable.fit(train_pairs, train_folds)
        check_no_leakage(fitted.artifacts(), test_fold, train_folds)
        y_true = [p.label.value for p in test_pairs]
        y_pred = list(fitted.predict(test_pairs))
        reports.append(MetricReport.from_predictions(y_true, y_pred, classes, f1_mode=f1_mode))
    return CvResult.from_folds(reports, positive_class=ds.positive_class.value)


def write_metric_report(cv: CvResult, path) -> None:
    """CSV rows: fold,class,precision,recall,f1,support plus per-fold macro rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fold", "class", "precision", "recall", "f1", "support"])
        for i, rep in enumerate(cv.folds):
            for c in sorted(rep.per_class):
                m = rep.per_class[c]
                writer.writerow([i, c, repr(m.precision), repr(m.recall), repr(m.f1), m.support])
            total = sum(m.support for m in rep.per_class.values())
            writer.writerow(
                [i, "macro", repr(rep.macro_precision), repr(rep.macro_recall), repr(rep.macro_f1), total]
            )
        for name in AGGREGATE_METRICS:
            mean, std = cv.aggregate[name]
            writer.writerow(["mean", name, repr(mean), "", "", ""])
            writer.writerow(["std", name, repr(std), "", "", ""])
