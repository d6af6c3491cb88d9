"""Service configuration: which models to serve and how each one is backed."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

CACHE_DIR_ENV = "EMBEDSVC_CACHE_DIR"

# Checkpoint guide for the transformers backend; every entry is overridable.
DEFAULT_CHECKPOINTS = {
    "albert": "albert-base-v2",
    "bart": "facebook/bart-base",
    "bert": "bert-large-uncased",
    "deberta": "microsoft/deberta-large",
    "electra": "google/electra-large-discriminator",
    "gpt": "gpt2-large",
    "longformer": "allenai/longformer-base-4096",
    "roberta": "roberta-base",
    "xlm": "xlm-roberta-base",
    "xlnet": "xlnet-large-cased",
}


@dataclass(frozen=True)
class ModelSpec:
    name: str
    backend: str = "hash"            # "hash" (deterministic, offline) or "hf"
    dim: int = 32                    # hash backend output width
    checkpoint: str | None = None    # hf backend checkpoint id

    def resolved_checkpoint(self) -> str | None:
        if self.backend != "hf":
            return None
        return self.checkpoint or DEFAULT_CHECKPOINTS.get(self.name)


@dataclass
class ServiceConfig:
    models: dict[str, ModelSpec] = field(default_factory=dict)
    max_batch: int = 64
    lazy: bool = False
    cache_dir: str | None = None

    def __post_init__(self):
        if self.cache_dir is None:
            self.cache_dir = os.environ.get(CACHE_DIR_ENV)

    @classmethod
    def from_names(cls, names, backend: str = "hash", **kwargs) -> "ServiceConfig":
        models = {n: ModelSpec(name=n, backend=backend) for n in names}
        return cls(models=models, **kwargs)

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        models = {}
        for name, spec in raw.get("models", {}).items():
            if isinstance(spec, str):  # shorthand: "bert": "hf"
                spec = {"backend": spec}
            models[name] = ModelSpec(
                name=name,
                backend=spec.get("backend", "hash"),
                dim=spec.get("dim", 32),
                checkpoint=spec.get("checkpoint"),
            )
        return cls(
            models=models,
            max_batch=raw.get("max_batch", 64),
            lazy=raw.get("lazy", False),
            cache_dir=raw.get("cache_dir"),
        )
