"""LLM-derived knowledge: the score/embedding store, PCA reduction, feature fusion.

The primary component never runs a language model. Pairwise similarity scores
and CLS embeddings arrive through a JSON Lines store file (one record per
line), produced offline or by the embedding sidecar.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadTargetDim,
    DimInconsistent,
    DimMismatch,
    DuplicateKey,
    MalformedRecord,
    MissingBlock,
    MissingScore,
    TooFewSamples,
)


class LlmModelId(enum.Enum):
    ALBERT = "albert"
    BART = "bart"
    BERT = "bert"
    DEBERTA = "deberta"
    ELECTRA = "electra"
    GPT = "gpt"
    LONGFORMER = "longformer"
    ROBERTA = "roberta"
    XLM = "xlm"
    XLNET = "xlnet"


# Canonical orderings: alphabetical over model names.
SIM_MODELS = tuple(sorted(LlmModelId, key=lambda m: m.value))
CLS_MODELS = tuple(m for m in SIM_MODELS if m not in (LlmModelId.BART, LlmModelId.XLM))

PCA_TARGET_DIMS = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class PairEmbedding:
    pair_id: str
    model: LlmModelId
    vector: np.ndarray


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any float64 bit-exactly."""
    return format(float(x), ".17g")


class EmbeddingStore:
    """Read-only index of (pair_id, model, kind) -> values after load."""

    def __init__(self):
        self._records: dict[tuple[str, str, str], np.ndarray] = {}
        self._meta: dict[tuple[str, str, str], dict] = {}
        self._dims: dict[tuple[str, str], int] = {}

    def _add(self, pair_id: str, model: str, kind: str, values, meta=None, where=""):
        key = (pair_id, model, kind)
        if key in self._records:
            raise DuplicateKey(f"{where}duplicate record for {key}")
        dim_key = (model, kind)
        dim = len(values)
        known = self._dims.get(dim_key)
        if known is None:
            self._dims[dim_key] = dim
        elif known != dim:
            raise DimInconsistent(
                f"{where}model {model!r} kind {kind!r} has dim {dim}, expected {known}"
            )
        self._records[key] = np.asarray(values, dtype=float)
        if meta:
            self._meta[key] = meta

    def sim_score(self, pair_id: str, model: LlmModelId) -> float:
        rec = self._records.get((pair_id, model.value, "sim"))
        if rec is None:
            raise MissingScore(f"no sim score for pair {pair_id!r}, model {model.value!r}")
        return float(rec[0])

    def cls_embedding(self, pair_id: str, model: LlmModelId) -> PairEmbedding:
        rec = self._records.get((pair_id, model.value, "cls"))
        if rec is None:
            raise MissingScore(f"no cls embedding for pair {pair_id!r}, model {model.value!r}")
        return PairEmbedding(pair_id=pair_id, model=model, vector=rec)

    def has(self, pair_id: str, model: LlmModelId, kind: str) -> bool:
        return (pair_id, model.value, kind) in self._records

    def keys(self):
        return self._records.keys()

    def __len__(self):
        return len(self._records)


def load_store(path) -> EmbeddingStore:
    """Parse a store JSONL file; reject duplicates and inconsistent dims."""
    store = EmbeddingStore()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(f"{path}, line {lineno}: invalid JSON ({e})") from None
            where = f"{path}, line {lineno}: "
            if not isinstance(rec, dict):
                raise MalformedRecord(where + "record is not an object")
            for field_name in ("pair_id", "model", "kind", "values"):
                if field_name not in rec:
                    raise MalformedRecord(where + f"missing field {field_name!r}")
            kind = rec["kind"]
            if kind not in ("sim", "cls"):
                raise MalformedRecord(where + f"kind must be 'sim' or 'cls', got {kind!r}")
            values = rec["values"]
            if not isinstance(values, list) or not values or not all(
                isinstance(v, (int, float)) for v in values
            ):
                raise MalformedRecord(where + "values must be a non-empty list of numbers")
            if kind == "sim" and len(values) != 1:
                raise MalformedRecord(where + f"sim records carry exactly 1 value, got {len(values)}")
            store._add(rec["pair_id"], rec["model"], kind, values, rec.get("meta"), where)
    return store


def write_store_record(fh, pair_id: str, model: str, kind: str, values, meta=None) -> None:
    vals = ", ".join(format_float(v) for v in values)
    meta_part = f', "meta": {json.dumps(meta, sort_keys=True)}' if meta else ""
    fh.write(
        f'{{"pair_id": {json.dumps(pair_id)}, "model": {json.dumps(model)}, '
        f'"kind": {json.dumps(kind)}, "values": [{vals}]{meta_part}}}\n'
    )


def llm_sim_vector(pair_id: str, store: EmbeddingStore) -> np.ndarray:
    """The 10 LLM pairwise scores in canonical model order."""
    return np.array([store.sim_score(pair_id, m) for m in SIM_MODELS])


# ---------------------------------------------------------------------------
# PCA


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray          # (target_dim, native_dim), orthonormal rows
    explained_variance: np.ndarray  # (target_dim,), non-increasing
    target_dim: int
    fit_fold_ids: frozenset[int] | None = None


def fit_pca(
    embeddings: list[PairEmbedding],
    target_dim: int,
    fold_ids: frozenset[int] | None = None,
) -> PcaModel:
    """Mean-centered PCA via SVD; component signs pinned for reproducibility."""
    if target_dim not in PCA_TARGET_DIMS:
        raise BadTargetDim(f"target_dim must be one of {PCA_TARGET_DIMS}, got {target_dim}")
    if len(embeddings) < target_dim + 1:
        raise TooFewSamples(f"need >= {target_dim + 1} samples, got {len(embeddings)}")
    models = {e.model for e in embeddings}
    if len(models) > 1:
        raise DimInconsistent(f"embeddings from multiple models: {sorted(m.value for m in models)}")
    x = np.stack([e.vector for e in embeddings])
    if x.shape[1] < target_dim:
        raise DimMismatch(f"native dim {x.shape[1]} < target_dim {target_dim}")
    mean = x.mean(axis=0)
    centered = x - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:target_dim].copy()
    for i in range(components.shape[0]):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    explained = (s[:target_dim] ** 2) / (len(embeddings) - 1)
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=explained,
        target_dim=target_dim,
        fit_fold_ids=fold_ids,
    )


def reduce(pca: PcaModel, emb: PairEmbedding) -> np.ndarray:
    if emb.vector.shape[0] != pca.mean.shape[0]:
        raise DimMismatch(
            f"embedding dim {emb.vector.shape[0]} != PCA native dim {pca.mean.shape[0]}"
        )
    return pca.components @ (emb.vector - pca.mean)


# ---------------------------------------------------------------------------
# fusion


class FusionStrategy(enum.Enum):
    TFIDF = "tfidf"
    BM25 = "bm25"
    LLM = "llm"
    TFIDF_BM25 = "tfidf_bm25"
    TFIDF_LLM = "tfidf_llm"
    BM25_LLM = "bm25_llm"
    TFIDF_BM25_LLM = "tfidf_bm25_llm"

    def blocks(self) -> tuple[str, ...]:
        return tuple(self.value.split("_"))


# Fixed concatenation order; absent blocks are skipped.
BLOCK_ORDER = ("cls", "tfidf", "bm25", "llm")
SIM_BLOCK_DIM = 10


@dataclass(frozen=True)
class FusedFeatureVector:
    values: np.ndarray
    layout: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if sum(span for _, span in self.layout) != self.values.shape[0]:
            raise DimMismatch("layout spans do not sum to vector length")

    def feature_names(self) -> list[str]:
        names = []
        for tag, span in self.layout:
            if tag in ("tfidf", "bm25"):
                from .simtrad import METHOD_ORDER

                names.extend(f"{tag}_{m.value}" for m in METHOD_ORDER)
            elif tag == "llm":
                names.extend(f"llm_{m.value}" for m in SIM_MODELS)
            else:
                names.extend(f"{tag}_{i}" for i in range(span))
        return names


def fuse(
    strategy: FusionStrategy,
    tfidf: np.ndarray | None = None,
    bm25: np.ndarray | None = None,
    llm: np.ndarray | None = None,
    cls: np.ndarray | None = None,
) -> FusedFeatureVector:
    """Concatenate the requested blocks in the fixed CLS|TFIDF|BM25|LLM order."""
    provided = {"tfidf": tfidf, "bm25": bm25, "llm": llm, "cls": cls}
    wanted = set(strategy.blocks())
    if cls is not None:
        wanted.add("cls")
    parts, layout = [], []
    for tag in BLOCK_ORDER:
        if tag not in wanted:
            continue
        block = provided[tag]
        if block is None:
            raise MissingBlock(f"strategy {strategy.value} requires block {tag!r}")
        block = np.asarray(block, dtype=float)
        if tag != "cls" and block.shape != (SIM_BLOCK_DIM,):
            raise DimMismatch(f"block {tag!r} must have dim {SIM_BLOCK_DIM}, got {block.shape}")
        parts.append(block)
        layout.append((tag, block.shape[0]))
    return FusedFeatureVector(values=np.concatenate(parts), layout=tuple(layout))
