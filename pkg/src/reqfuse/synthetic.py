"""Seeded synthetic benchmark: requirement pairs plus a surrogate knowledge store.

Duplicate pairs rewrite a base sentence through a synonym table and a word-order
shuffle; neutral pairs draw two sentences from unrelated template domains. The
surrogate store scores every pair with a noisy monotone function of token
overlap (sigma 0.1) for the 10 similarity models, and attaches seeded
random-projection CLS vectors that carry the same overlap signal.
"""

from __future__ import annotations

import os
import zlib

import numpy as np

from .corpus import PairDataset, PairLabel, Requirement, RequirementPair, build_dataset, write_pairs
from .llmknow import CLS_MODELS, SIM_MODELS, write_store_record
from .textrep import tokenize

SYNONYMS = {
    "system": ["software", "application", "platform"],
    "shall": ["must", "will"],
    "process": ["handle", "execute"],
    "payments": ["transactions", "charges"],
    "user": ["operator", "customer"],
    "data": ["records", "information"],
    "report": ["summary", "statement"],
    "store": ["persist", "archive"],
    "send": ["transmit", "dispatch"],
    "within": ["inside", "under"],
    "display": ["show", "render"],
    "errors": ["faults", "failures"],
    "log": ["journal", "ledger"],
    "alerts": ["notifications", "warnings"],
    "verify": ["validate", "check"],
    "credentials": ["passwords", "identities"],
}

_DOMAINS = [
    ["the", "system", "shall", "process", "payments", "within", "24", "hours", "for", "each", "user"],
    ["the", "platform", "must", "verify", "credentials", "before", "granting", "account", "access"],
    ["the", "application", "will", "display", "errors", "and", "alerts", "on", "the", "dashboard"],
    ["the", "service", "shall", "store", "sensor", "data", "and", "send", "a", "daily", "report"],
    ["the", "controller", "must", "log", "telemetry", "frames", "every", "second", "during", "flight"],
    ["the", "gateway", "will", "route", "messages", "between", "ground", "station", "and", "vehicle"],
]


def _sentence(rng: np.random.Generator, domain: int) -> list[str]:
    words = list(_DOMAINS[domain])
    # drop or duplicate one word occasionally so sentences inside a domain vary
    if rng.random() < 0.5 and len(words) > 6:
        del words[int(rng.integers(1, len(words)))]
    if rng.random() < 0.3:
        words.insert(int(rng.integers(1, len(words))), "promptly")
    return words


def _duplicate_variant(rng: np.random.Generator, words: list[str]) -> list[str]:
    out = []
    for w in words:
        options = SYNONYMS.get(w)
        if options and rng.random() < 0.35:
            out.append(options[int(rng.integers(0, len(options)))])
        else:
            out.append(w)
    out = list(out)
    rng.shuffle(out)
    return out


def make_benchmark(n_pairs: int = 400, seed: int = 7, dup_fraction: float = 0.4) -> PairDataset:
    rng = np.random.default_rng(seed)
    n_dup = int(n_pairs * dup_fraction)
    pairs = []
    for i in range(n_pairs):
        pid = f"p{i:04d}"
        if i < n_dup:
            domain = int(rng.integers(0, len(_DOMAINS)))
            base = _sentence(rng, domain)
            variant = _duplicate_variant(rng, base)
            label = "duplicate"
            left, right = " ".join(base), " ".join(variant)
        else:
            d1 = int(rng.integers(0, len(_DOMAINS)))
            d2 = int((d1 + 1 + rng.integers(0, len(_DOMAINS) - 1)) % len(_DOMAINS))
            left = " ".join(_sentence(rng, d1))
            right = " ".join(_sentence(rng, d2))
            label = "neutral"
        pairs.append(
            RequirementPair(
                pair_id=pid,
                left=Requirement(f"r{i:04d}a", left),
                right=Requirement(f"r{i:04d}b", right),
                label=PairLabel(label),
            )
        )
    return build_dataset("synthetic", pairs)


def _overlap(left: str, right: str) -> float:
    a, b = set(tokenize(left)), set(tokenize(right))
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def _pair_features(pair: RequirementPair) -> np.ndarray:
    """16 deterministic features: overlap stats plus a tiny hashed shared-token bag."""
    a, b = tokenize(pair.left.text), tokenize(pair.right.text)
    sa, sb = set(a), set(b)
    feats = np.zeros(16)
    union = len(sa | sb)
    feats[0] = len(sa & sb) / union if union else 0.0
    feats[1] = min(len(a), len(b)) / max(len(a), len(b), 1)
    for tok in sa & sb:
        feats[2 + zlib.crc32(tok.encode()) % 14] += 1.0
    return feats


def write_surrogate_store(ds: PairDataset, path, seed: int = 7, cls_native_dim: int = 32,
                          sigma: float = 0.1) -> None:
    rng = np.random.default_rng(seed)
    projections = {
        m.value: np.random.default_rng(seed + 1000 + i).normal(0, 1.0, size=(cls_native_dim, 16))
        for i, m in enumerate(CLS_MODELS)
    }
    with open(path, "w", encoding="utf-8") as fh:
        for pair in ds.pairs:
            overlap = _overlap(pair.left.text, pair.right.text)
            for model in SIM_MODELS:
                score = float(np.clip(overlap + rng.normal(0.0, sigma), 0.0, 1.0))
                write_store_record(
                    fh, pair.pair_id, model.value, "sim", [score],
                    meta={"source": "surrogate-overlap"},
                )
            feats = _pair_features(pair)
            for model in CLS_MODELS:
                vec = np.tanh(projections[model.value] @ feats)
                vec = vec + rng.normal(0.0, 0.05, size=cls_native_dim)
                write_store_record(fh, pair.pair_id, model.value, "cls", vec.tolist())


def write_benchmark(out_dir, n_pairs: int = 400, seed: int = 7) -> tuple[str, str]:
    """Write pairs.csv + store.jsonl under out_dir; returns the two paths."""
    os.makedirs(out_dir, exist_ok=True)
    ds = make_benchmark(n_pairs=n_pairs, seed=seed)
    csv_path = os.path.join(out_dir, "pairs.csv")
    store_path = os.path.join(out_dir, "store.jsonl")
    write_pairs(ds, csv_path)
    write_surrogate_store(ds, store_path, seed=seed)
    return csv_path, store_path
