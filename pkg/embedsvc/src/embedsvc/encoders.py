"""Text encoders behind the service.

Two backends share one interface: encode(text, pooling) -> float64 vector.

HashedProjectionEncoder is fully deterministic and dependency-free: each token
hashes (salted by model name) to a signed coordinate, token vectors pool by
position-weighted (cls) or plain (mean) averaging. It exists so the service
and exporter run bit-reproducibly without model weights; records written from
it say so in their metadata.

TransformersEncoder wraps a pretrained checkpoint when torch/transformers are
installed: cls pooling takes the first-position hidden state, mean pooling the
attention-masked average.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

POOLINGS = ("cls", "mean")


class HashedProjectionEncoder:
    backend = "hash"

    def __init__(self, model_name: str, dim: int = 32):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.model_name = model_name
        self.dim = dim
        self.checkpoint = None
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        digest = hashlib.blake2b(
            f"{self.model_name}:{token}".encode("utf-8"), digest_size=16
        ).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng(seed)
        vec = rng.normal(0.0, 1.0, self.dim)
        self._token_cache[token] = vec
        return vec

    def encode(self, text: str, pooling: str = "cls") -> np.ndarray:
        if pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}")
        tokens = _WORD_RE.findall(text.lower())
        if not tokens:
            return np.zeros(self.dim)
        acc = np.zeros(self.dim)
        total = 0.0
        for i, tok in enumerate(tokens):
            w = 1.0 / (i + 1) if pooling == "cls" else 1.0
            acc += w * self._token_vector(tok)
            total += w
        return np.tanh(acc / total)


class TransformersEncoder:
    backend = "hf"

    def __init__(self, model_name: str, checkpoint: str, cache_dir: str | None = None):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise RuntimeError(f"transformers backend unavailable: {e}") from None
        self.model_name = model_name
        self.checkpoint = checkpoint
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(checkpoint, cache_dir=cache_dir)
        self._model = AutoModel.from_pretrained(checkpoint, cache_dir=cache_dir)
        self._model.eval()
        self.dim = int(self._model.config.hidden_size)

    def encode(self, text: str, pooling: str = "cls") -> np.ndarray:
        if pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}")
        torch = self._torch
        inputs = self._tokenizer(
            text, return_tensors="pt", truncation=True, max_length=512
        )
        with torch.no_grad():
            hidden = self._model(**inputs).last_hidden_state[0]
        if pooling == "cls":
            vec = hidden[0]
        else:
            mask = inputs["attention_mask"][0].unsqueeze(-1)
            vec = (hidden * mask).sum(0) / mask.sum()
        return vec.double().numpy()


def build_encoder(spec, cache_dir: str | None = None):
    if spec.backend == "hash":
        return HashedProjectionEncoder(spec.name, dim=spec.dim)
    if spec.backend == "hf":
        checkpoint = spec.resolved_checkpoint()
        if not checkpoint:
            raise RuntimeError(f"no checkpoint configured for model {spec.name!r}")
        return TransformersEncoder(spec.name, checkpoint, cache_dir=cache_dir)
    raise RuntimeError(f"unknown backend {spec.backend!r}")


def encode_pair_text(left: str, right: str) -> str:
    """The joined-pair form used for CLS extraction."""
    return f"{left} [SEP] {right}"


def pair_similarity(encoder, left: str, right: str, pooling: str = "mean") -> float:
    """Clamped cosine of the pooled per-side representations."""
    a = encoder.encode(left, pooling)
    b = encoder.encode(right, pooling)
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    if np.array_equal(a, b):
        return 1.0
    return min(1.0, max(0.0, float(a @ b) / (na * nb)))
