"""Latent factorizations of the document-term matrix: LSI, NMF, and LDA.

All three are fitted on a training corpus only; held-out documents are folded
in by projection (LSI/NMF) or fixed-topic Gibbs inference (LDA), never by
refitting. Every fit is deterministic for a fixed (input, k, seed, iterations).

LSI
    Rank-k truncated SVD of the doc-term matrix. A document is projected as
    V_k^T u (no singular-value scaling), so full-rank LSI reproduces plain
    cosine similarity on in-span documents.

NMF
    Lee-Seung multiplicative updates minimizing the Frobenius error
    ||A - WH||_F. The per-iteration error sequence is recorded; it is
    non-increasing by construction. New documents are projected onto the
    fitted basis H by least squares.

LDA
    Collapsed Gibbs sampling. Topic-term distributions phi are estimated from
    the final count state with beta smoothing. Weighted input vectors are
    quantized to pseudo-counts by scaling each document's minimum nonzero
    weight to 1 (exact for raw counts, ratio-preserving for TFIDF/BM25).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, EmptyMatrix, RankTooLarge
from .textrep import SparseTermVector

_DOC_TOKEN_BUDGET = 100


@dataclass(frozen=True)
class LatentModel:
    kind: str               # "lsi" | "nmf" | "lda"
    k: int
    vocab_dim: int
    seed: int
    # LSI
    components: np.ndarray | None = None        # (k, vocab)
    singular_values: np.ndarray | None = None   # (k,)
    # NMF
    basis: np.ndarray | None = None             # (k, vocab)
    doc_factors: np.ndarray | None = None       # (docs, k), training-time W
    loss_history: tuple[float, ...] = ()
    # LDA
    phi: np.ndarray | None = None               # (k, vocab), rows sum to 1
    alpha: float = 0.0
    beta: float = 0.0
    infer_sweeps: int = 0
    fit_fold_ids: frozenset[int] | None = None


def _to_dense(matrix: list[SparseTermVector]) -> np.ndarray:
    dim = matrix[0].dim
    for v in matrix:
        if v.dim != dim:
            raise DimMismatch(f"vector dim {v.dim} != {dim}")
    dense = np.zeros((len(matrix), dim))
    for i, v in enumerate(matrix):
        for j, w in v.entries.items():
            dense[i, j] = w
    return dense


def _sign_normalize(rows: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude loading is positive."""
    out = rows.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def quantize_counts(v: SparseTermVector, budget: int = _DOC_TOKEN_BUDGET) -> dict[int, int]:
    """Turn a weighted term vector into positive integer pseudo-counts.

    The minimum nonzero weight maps to 1, which is exact for raw counts. If the
    weight spread would blow the document past `budget` tokens (BM25's idf can
    span orders of magnitude), weights are renormalized to the budget instead.
    """
    if not v.entries:
        return {}
    min_w = min(v.entries.values())
    counts = {idx: max(1, int(round(w / min_w))) for idx, w in v.entries.items()}
    if sum(counts.values()) > budget:
        total_w = sum(v.entries.values())
        counts = {
            idx: max(1, int(round(w / total_w * budget))) for idx, w in v.entries.items()
        }
    return counts


def _token_array(v: SparseTermVector) -> np.ndarray:
    """Expand pseudo-counts into a flat array of term indices (sorted for determinism)."""
    counts = quantize_counts(v)
    if not counts:
        return np.empty(0, dtype=np.int64)
    parts = [np.full(c, idx, dtype=np.int64) for idx, c in sorted(counts.items())]
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# fitting


def fit_latent(
    kind: str,
    matrix: list[SparseTermVector],
    k: int,
    seed: int,
    max_iter: int = 200,
    tol: float = 1e-4,
    alpha: float | None = None,
    beta: float = 0.01,
    infer_sweeps: int = 50,
    fold_ids: frozenset[int] | None = None,
) -> LatentModel:
    if not matrix:
        raise EmptyMatrix("no documents to fit")
    vocab_dim = matrix[0].dim
    if k < 1 or k > min(len(matrix), vocab_dim):
        raise RankTooLarge(f"k={k} exceeds min(docs={len(matrix)}, vocab={vocab_dim})")
    if kind == "lsi":
        return _fit_lsi(matrix, k, seed, fold_ids)
    if kind == "nmf":
        return _fit_nmf(matrix, k, seed, max_iter, tol, fold_ids)
    if kind == "lda":
        a = alpha if alpha is not None else 50.0 / k
        return _fit_lda(matrix, k, seed, max_iter, a, beta, infer_sweeps, fold_ids)
    raise ValueError(f"unknown latent kind {kind!r}")


def _fit_lsi(matrix, k, seed, fold_ids) -> LatentModel:
    dense = _to_dense(matrix)
    _, s, vt = np.linalg.svd(dense, full_matrices=False)
    components = _sign_normalize(vt[:k])
    return LatentModel(
        kind="lsi",
        k=k,
        vocab_dim=dense.shape[1],
        seed=seed,
        components=components,
        singular_values=s[:k].copy(),
        fit_fold_ids=fold_ids,
    )


def _fit_nmf(matrix, k, seed, max_iter, tol, fold_ids) -> LatentModel:
    a = _to_dense(matrix)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 1.0, size=(a.shape[0], k))
    h = rng.uniform(0.0, 1.0, size=(k, a.shape[1]))
    eps = 1e-12
    losses = []
    prev = None
    for _ in range(max_iter):
        h *= (w.T @ a) / (w.T @ w @ h + eps)
        w *= (a @ h.T) / (w @ h @ h.T + eps)
        err = float(np.linalg.norm(a - w @ h))
        losses.append(err)
        if prev is not None and prev - err < tol * max(prev, eps):
            break
        prev = err
    return LatentModel(
        kind="nmf",
        k=k,
        vocab_dim=a.shape[1],
        seed=seed,
        basis=h,
        doc_factors=w,
        loss_history=tuple(losses),
        fit_fold_ids=fold_ids,
    )


def _fit_lda(matrix, k, seed, sweeps, alpha, beta, infer_sweeps, fold_ids) -> LatentModel:
    # inner loop runs on plain Python floats: ~5x faster than per-token numpy
    vocab_dim = matrix[0].dim
    docs = [_token_array(v).tolist() for v in matrix]
    rng = np.random.default_rng(seed)

    n_dk = [[0.0] * k for _ in docs]
    n_kw_byword = [[0.0] * k for _ in range(vocab_dim)]
    n_k = [0.0] * k
    z: list[list[int]] = []
    for d, words in enumerate(docs):
        zd = rng.integers(0, k, size=len(words)).tolist()
        z.append(zd)
        ndk = n_dk[d]
        for w, t in zip(words, zd):
            ndk[t] += 1
            n_kw_byword[w][t] += 1
            n_k[t] += 1

    vbeta = vocab_dim * beta
    for _ in range(sweeps):
        for d, words in enumerate(docs):
            zd = z[d]
            ndk = n_dk[d]
            rvals = rng.random(len(words))
            for i, w in enumerate(words):
                t = zd[i]
                col = n_kw_byword[w]
                ndk[t] -= 1
                col[t] -= 1
                n_k[t] -= 1
                total = 0.0
                cdf = [0.0] * k
                for j in range(k):
                    total += (ndk[j] + alpha) * (col[j] + beta) / (n_k[j] + vbeta)
                    cdf[j] = total
                r = rvals[i] * total
                t = 0
                while cdf[t] < r:
                    t += 1
                zd[i] = t
                ndk[t] += 1
                col[t] += 1
                n_k[t] += 1

    n_kw = np.array(n_kw_byword).T  # (k, vocab)
    phi = (n_kw + beta) / (np.array(n_k)[:, None] + vbeta)
    return LatentModel(
        kind="lda",
        k=k,
        vocab_dim=vocab_dim,
        seed=seed,
        phi=phi,
        alpha=alpha,
        beta=beta,
        infer_sweeps=infer_sweeps,
        fit_fold_ids=fold_ids,
    )


# ---------------------------------------------------------------------------
# folding held-out documents into a fitted model


def project(model: LatentModel, v: SparseTermVector) -> np.ndarray:
    """Latent-space coordinates of one document under a fitted LSI/NMF model."""
    if v.dim != model.vocab_dim:
        raise DimMismatch(f"vector dim {v.dim} != model vocab {model.vocab_dim}")
    dense = np.zeros(model.vocab_dim)
    for j, w in v.entries.items():
        dense[j] = w
    if model.kind == "lsi":
        return model.components @ dense
    if model.kind == "nmf":
        coeffs, *_ = np.linalg.lstsq(model.basis.T, dense, rcond=None)
        return coeffs
    raise ValueError(f"project() undefined for kind {model.kind!r}")


def infer_theta(model: LatentModel, v: SparseTermVector) -> np.ndarray:
    """Document-topic mixture under fixed phi, via seeded Gibbs sweeps.

    Every call re-seeds from the model seed, so identical inputs always yield
    identical mixtures.
    """
    if v.dim != model.vocab_dim:
        raise DimMismatch(f"vector dim {v.dim} != model vocab {model.vocab_dim}")
    k = model.k
    alpha = model.alpha
    words = _token_array(v).tolist()
    if not words:
        return np.full(k, 1.0 / k)
    phi_byword = model.phi.T.tolist()  # per-word topic rows
    rng = np.random.default_rng(model.seed)
    zd = rng.integers(0, k, size=len(words)).tolist()
    n_t = [0.0] * k
    for t in zd:
        n_t[t] += 1
    for _ in range(model.infer_sweeps):
        rvals = rng.random(len(words))
        for i, w in enumerate(words):
            t = zd[i]
            n_t[t] -= 1
            row = phi_byword[w]
            total = 0.0
            cdf = [0.0] * k
            for j in range(k):
                total += (n_t[j] + alpha) * row[j]
                cdf[j] = total
            r = rvals[i] * total
            t = 0
            while cdf[t] < r:
                t += 1
            zd[i] = t
            n_t[t] += 1
    theta = np.array(n_t)
    return (theta + alpha) / (len(words) + k * alpha)
