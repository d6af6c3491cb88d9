"""reqfuse: similarity-knowledge pipelines for duplicate/conflicting requirement pairs."""

__version__ = "0.1.0"

from .corpus import (
    FoldPlan,
    PairDataset,
    PairLabel,
    Requirement,
    RequirementPair,
    carve_validation,
    load_pairs,
    stratified_kfold,
    write_pairs,
)
from .llmknow import EmbeddingStore, FusionStrategy, LlmModelId, fit_pca, fuse, load_store
from .pipeline import ExperimentPlan, PipelineConfig, assemble, run_experiment
from .evaluation import cross_validate

__all__ = [
    "FoldPlan",
    "PairDataset",
    "PairLabel",
    "Requirement",
    "RequirementPair",
    "carve_validation",
    "load_pairs",
    "stratified_kfold",
    "write_pairs",
    "EmbeddingStore",
    "FusionStrategy",
    "LlmModelId",
    "fit_pca",
    "fuse",
    "load_store",
    "ExperimentPlan",
    "PipelineConfig",
    "assemble",
    "run_experiment",
    "cross_validate",
    "__version__",
]
