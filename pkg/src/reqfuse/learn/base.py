"""Classifier specs, the fit/predict surface, and the external-plugin registry.

Every native implementation works on label *indices* into a sorted class list
and exposes fit(X, y_idx, n_classes) / predict_idx(X) / predict_scores(X).
External classifier adapters (XGBoost and friends) register a factory by name
and honor the same contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimMismatch, DimZero, NonFinite, SingleClass, UnknownAlgo

NATIVE_ALGOS = (
    "KNN", "GNB", "BNB", "LOGR", "LINSVM", "QDA", "DT", "RF", "ADABOOST", "GBOOST", "MLP",
)

# Reachable only through registered plugins; never implemented natively.
PLUGIN_ONLY_ALGOS = ("GP", "XGBOOST", "CATBOOST", "HISTGBOOST", "LIGHTGBM")

_PLUGINS: dict[str, object] = {}


def register_plugin(name: str, factory) -> None:
    """Register an external classifier adapter: factory(hyperparams, seed) -> impl."""
    _PLUGINS[name.upper()] = factory


def registered_plugins() -> tuple[str, ...]:
    return tuple(sorted(_PLUGINS))


@dataclass(frozen=True)
class ClassifierSpec:
    algo: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0

    def with_params(self, **updates) -> "ClassifierSpec":
        merged = dict(self.hyperparams)
        merged.update(updates)
        return ClassifierSpec(algo=self.algo, hyperparams=merged, seed=self.seed)


@dataclass(frozen=True)
class TrainedClassifier:
    spec: ClassifierSpec
    classes: np.ndarray
    n_features: int
    impl: object


def _check_training_data(X: np.ndarray, y: np.ndarray):
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got shape {X.shape}")
    if X.shape[1] == 0:
        raise DimZero("feature matrix has zero columns")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 training rows")
    if not np.isfinite(X).all():
        raise NonFinite("feature matrix contains non-finite values")


def _resolve_impl(spec: ClassifierSpec):
    from . import bayes, linear, mlp, neighbors, trees

    native = {
        "KNN": neighbors.KNearestNeighbors,
        "GNB": bayes.GaussianNaiveBayes,
        "BNB": bayes.BernoulliNaiveBayes,
        "QDA": bayes.QuadraticDiscriminant,
        "LOGR": linear.LogisticRegressionGD,
        "LINSVM": linear.LinearSvmSubgradient,
        "MLP": mlp.MlpClassifier,
        "DT": trees.DecisionTreeClassifier,
        "RF": trees.RandomForestClassifier,
        "ADABOOST": trees.AdaBoostSamme,
        "GBOOST": trees.GradientBoostingClassifier,
    }
    algo = spec.algo.upper()
    if algo in native:
        try:
            return native[algo](seed=spec.seed, **spec.hyperparams)
        except TypeError as e:
            raise ValueError(f"{algo}: bad hyperparameters {spec.hyperparams}: {e}") from None
    if algo in _PLUGINS:
        return _PLUGINS[algo](spec.hyperparams, spec.seed)
    if algo in PLUGIN_ONLY_ALGOS:
        raise UnknownAlgo(
            f"{algo} is only available through a registered plugin adapter "
            f"(see learn.register_plugin); registered: {registered_plugins() or 'none'}"
        )
    raise UnknownAlgo(f"unknown classifier algo {spec.algo!r}")


def fit(spec: ClassifierSpec, X, y) -> TrainedClassifier:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    _check_training_data(X, y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass(f"training labels contain a single class {classes[0]!r}")
    y_idx = np.searchsorted(classes, y)
    impl = _resolve_impl(spec)
    impl.fit(X, y_idx, len(classes))
    return TrainedClassifier(spec=spec, classes=classes, n_features=X.shape[1], impl=impl)


def _check_predict_input(model: TrainedClassifier, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimMismatch(
            f"expected {model.n_features} features, got shape {X.shape}"
        )
    return X


def predict(model: TrainedClassifier, X) -> np.ndarray:
    X = _check_predict_input(model, X)
    return model.classes[model.impl.predict_idx(X)]


def predict_scores(model: TrainedClassifier, X) -> np.ndarray:
    """Per-class scores; probability rows for probabilistic algos, margins otherwise."""
    X = _check_predict_input(model, X)
    return model.impl.predict_scores(X)
