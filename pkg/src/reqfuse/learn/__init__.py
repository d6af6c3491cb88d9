"""Native classifier suite over fused feature vectors, plus hyperparameter search."""

from .base import (
    NATIVE_ALGOS,
    PLUGIN_ONLY_ALGOS,
    ClassifierSpec,
    TrainedClassifier,
    fit,
    predict,
    predict_scores,
    register_plugin,
    registered_plugins,
)
from .search import DEFAULT_SPACES, search_hyperparams, write_trial_log

__all__ = [
    "NATIVE_ALGOS",
    "PLUGIN_ONLY_ALGOS",
    "ClassifierSpec",
    "TrainedClassifier",
    "fit",
    "predict",
    "predict_scores",
    "register_plugin",
    "registered_plugins",
    "DEFAULT_SPACES",
    "search_hyperparams",
    "write_trial_log",
]
