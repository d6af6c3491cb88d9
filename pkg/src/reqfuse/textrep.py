"""Tokenization, corpus statistics, and the two term-weighting schemes.

Both weighting schemes emit the same sparse vector shape so every similarity
method downstream consumes one representation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DegenerateStats, EmptyCorpus

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Small built-in stopword list, only applied when requested via config.
STOPWORDS = frozenset(
    "a an and are as at be by for from has have in is it its of on or that the this to was were will with".split()
)


def _light_stem(token: str) -> str:
    for suffix in ("ing", "ed", "es", "s"):
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def tokenize(text: str, *, drop_stopwords: bool = False, stem: bool = False) -> list[str]:
    """Lowercased Unicode word segmentation; pure-punctuation runs never survive."""
    tokens = _WORD_RE.findall(text.lower())
    if drop_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    if stem:
        tokens = [_light_stem(t) for t in tokens]
    return tokens


@dataclass(frozen=True)
class CorpusStats:
    """Vocabulary + document statistics fitted on one training corpus."""

    vocabulary: dict[str, int]
    doc_count: int
    doc_freq: dict[str, int]
    avg_doc_len: float
    fit_fold_ids: frozenset[int] | None = None


@dataclass(frozen=True)
class SparseTermVector:
    entries: dict[int, float]
    dim: int

    def l2_norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def is_zero(self) -> bool:
        return not self.entries


def fit_corpus_stats(docs: list[list[str]], fold_ids: frozenset[int] | None = None) -> CorpusStats:
    """Fit vocabulary (first-occurrence order), document frequencies and average length."""
    if not docs:
        raise EmptyCorpus("need at least one document")
    vocabulary: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    total_len = 0
    for doc in docs:
        total_len += len(doc)
        for term in doc:
            if term not in vocabulary:
                vocabulary[term] = len(vocabulary)
        for term in set(doc):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    return CorpusStats(
        vocabulary=vocabulary,
        doc_count=len(docs),
        doc_freq=doc_freq,
        avg_doc_len=total_len / len(docs),
        fit_fold_ids=fold_ids,
    )


def _term_counts(doc: list[str], stats: CorpusStats) -> dict[int, int]:
    counts: dict[int, int] = {}
    for term in doc:
        idx = stats.vocabulary.get(term)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return counts


def tfidf_vector(doc: list[str], stats: CorpusStats) -> SparseTermVector:
    """Smoothed-idf TFIDF, L2-normalized: w(t) = tf * (ln((1+N)/(1+df)) + 1)."""
    n = stats.doc_count
    df_by_index = {stats.vocabulary[t]: df for t, df in stats.doc_freq.items()}
    entries = {}
    for idx, tf in _term_counts(doc, stats).items():
        idf = math.log((1 + n) / (1 + df_by_index[idx])) + 1.0
        entries[idx] = tf * idf
    norm = math.sqrt(sum(w * w for w in entries.values()))
    if norm > 0:
        entries = {i: w / norm for i, w in entries.items()}
    return SparseTermVector(entries=entries, dim=len(stats.vocabulary))


def bm25_vector(
    doc: list[str], stats: CorpusStats, k1: float = 1.5, b: float = 0.75
) -> SparseTermVector:
    """Okapi BM25 per-term weights (not normalized).

    w(t) = ln(1 + (N - df + 0.5)/(df + 0.5)) * tf*(k1+1) / (tf + k1*(1 - b + b*|doc|/avgdl))
    """
    if k1 <= 0:
        raise ValueError("k1 must be > 0")
    if not 0 <= b <= 1:
        raise ValueError("b must be in [0, 1]")
    counts = _term_counts(doc, stats)
    if not counts:
        return SparseTermVector(entries={}, dim=len(stats.vocabulary))
    if stats.avg_doc_len == 0:
        raise DegenerateStats("avg_doc_len is 0 but document is non-empty")
    n = stats.doc_count
    df_by_index = {stats.vocabulary[t]: df for t, df in stats.doc_freq.items()}
    len_norm = k1 * (1 - b + b * len(doc) / stats.avg_doc_len)
    entries = {}
    for idx, tf in counts.items():
        df = df_by_index[idx]
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        w = idf * tf * (k1 + 1) / (tf + len_norm)
        if w > 0:
            entries[idx] = w
    return SparseTermVector(entries=entries, dim=len(stats.vocabulary))
