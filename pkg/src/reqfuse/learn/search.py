"""Seeded random hyperparameter search with inner cross-validation scoring.

The space mirrors the usual search-table shape: each entry is either a list of
choices or a {"low", "high", "type": "int"|"float", "log": bool} range. Trials
are sampled, scored by inner CV on training rows only, and logged; ties keep
the first-sampled winner.
"""

from __future__ import annotations

import csv

import numpy as np

from ..errors import EmptySpace
from .base import ClassifierSpec, fit, predict

DEFAULT_SPACES = {
    "KNN": {"k": [1, 3, 5, 7, 11, 15]},
    "GNB": {"var_floor": [1e-9, 1e-7, 1e-5]},
    "BNB": {"alpha": [0.1, 0.5, 1.0, 2.0]},
    "LOGR": {"lr": [0.1, 0.5, 1.0], "l2": [1e-5, 1e-4, 1e-3, 1e-2]},
    "LINSVM": {"lr": [0.05, 0.1, 0.5], "l2": [1e-4, 1e-3, 1e-2]},
    "QDA": {"ridge": [1e-6, 1e-4, 1e-2]},
    "DT": {"max_depth": [3, 6, 12, None], "min_samples_leaf": [1, 2, 5]},
    "RF": {"n_trees": [25, 50, 100], "max_depth": [6, 12, None]},
    "ADABOOST": {"n_rounds": [25, 50, 100]},
    "GBOOST": {"n_rounds": [50, 100], "lr": [0.05, 0.1, 0.2], "max_depth": [2, 3]},
    "MLP": {"hidden": [(16,), (32,), (64,), (32, 16)], "lr": [0.01, 0.05, 0.1]},
}


def _sample_param(value_spec, rng: np.random.Generator):
    if isinstance(value_spec, (list, tuple)):
        if len(value_spec) == 0:
            raise EmptySpace("empty choice list in search space")
        return value_spec[int(rng.integers(0, len(value_spec)))]
    if isinstance(value_spec, dict) and "low" in value_spec and "high" in value_spec:
        low, high = value_spec["low"], value_spec["high"]
        if value_spec.get("log"):
            x = float(np.exp(rng.uniform(np.log(low), np.log(high))))
        else:
            x = float(rng.uniform(low, high))
        return int(round(x)) if value_spec.get("type") == "int" else x
    raise EmptySpace(f"cannot sample from space entry {value_spec!r}")


def _accuracy(y_true, y_pred) -> float:
    return float(np.mean(np.asarray(y_true) == np.asarray(y_pred)))


def _f1_for(y_true, y_pred, positive) -> float:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    tp = int(((y_true == positive) & (y_pred == positive)).sum())
    fp = int(((y_true != positive) & (y_pred == positive)).sum())
    fn = int(((y_true == positive) & (y_pred != positive)).sum())
    pr = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return 2 * pr * r / (pr + r) if pr + r else 0.0


def _objective_fn(objective):
    if callable(objective):
        return objective
    if objective == "accuracy":
        return _accuracy
    if objective.startswith("f1:"):
        positive = objective.split(":", 1)[1]
        return lambda yt, yp: _f1_for(yt, yp, positive)
    raise ValueError(f"unknown objective {objective!r}")


def search_hyperparams(
    template: ClassifierSpec,
    space: dict,
    budget: int,
    objective,
    X,
    y,
    inner_folds: np.ndarray,
    seed: int = 0,
):
    """Random search; returns (best_spec, trials). Never touches rows outside (X, y)."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not space:
        raise EmptySpace("search space has no parameters")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    inner_folds = np.asarray(inner_folds)
    score = _objective_fn(objective)
    rng = np.random.default_rng(seed)
    folds = np.unique(inner_folds)
    trials = []
    best = None  # (objective, trial index, spec)
    for t in range(budget):
        params = {name: _sample_param(vs, rng) for name, vs in sorted(space.items())}
        spec = template.with_params(**params)
        fold_scores = []
        for f in folds:
            train = inner_folds != f
            model = fit(spec, X[train], y[train])
            fold_scores.append(score(y[~train], predict(model, X[~train])))
        value = float(np.mean(fold_scores))
        trials.append({"trial": t, "params": params, "objective": value})
        if best is None or value > best[0]:
            best = (value, t, spec)
    return best[2], trials


def write_trial_log(trials: list[dict], path) -> None:
    param_names = sorted({name for t in trials for name in t["params"]})
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", *param_names, "objective"])
        for t in trials:
            writer.writerow(
                [t["trial"], *[t["params"].get(p, "") for p in param_names], repr(t["objective"])]
            )
