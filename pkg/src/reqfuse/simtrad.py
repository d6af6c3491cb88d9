"""The ten traditional similarity methods and the 20-dim pair vector.

Five base methods (VSM, LSI, JS, NMF, LDA) and five hybrids, each hybrid being
the unweighted mean of its two components. Every score lies in [0, 1] and every
method is symmetric in its two inputs. Zero vectors score 0 against everything.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .corpus import RequirementPair
from .errors import DimMismatch, WrongComponents
from .latent import LatentModel, fit_latent, infer_theta, project
from .textrep import CorpusStats, SparseTermVector, bm25_vector, tfidf_vector, tokenize


class SimilarityMethodId(enum.Enum):
    VSM = "vsm"
    LSI = "lsi"
    JS = "js"
    NMF = "nmf"
    LDA = "lda"
    NMF_LDA = "nmf_lda"
    JS_LDA = "js_lda"
    VSM_NMF = "vsm_nmf"
    JS_NMF = "js_nmf"
    VSM_JS = "vsm_js"


METHOD_ORDER = tuple(SimilarityMethodId)

HYBRID_PARTS = {
    SimilarityMethodId.NMF_LDA: (SimilarityMethodId.NMF, SimilarityMethodId.LDA),
    SimilarityMethodId.JS_LDA: (SimilarityMethodId.JS, SimilarityMethodId.LDA),
    SimilarityMethodId.VSM_NMF: (SimilarityMethodId.VSM, SimilarityMethodId.NMF),
    SimilarityMethodId.JS_NMF: (SimilarityMethodId.JS, SimilarityMethodId.NMF),
    SimilarityMethodId.VSM_JS: (SimilarityMethodId.VSM, SimilarityMethodId.JS),
}


class Rep(enum.Enum):
    TFIDF = "tfidf"
    BM25 = "bm25"


DIM_NAMES = tuple(
    f"{rep.value}_{method.value}" for rep in Rep for method in METHOD_ORDER
)


@dataclass(frozen=True)
class TraditionalSimVector:
    """20 scores: the 10 methods under TFIDF, then the same 10 under BM25."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (20,):
            raise DimMismatch(f"expected 20 values, got {self.values.shape}")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _check_dims(u: SparseTermVector, v: SparseTermVector):
    if u.dim != v.dim:
        raise DimMismatch(f"vector dims differ: {u.dim} != {v.dim}")


def vsm_similarity(u: SparseTermVector, v: SparseTermVector) -> float:
    """Cosine over sparse term weights, clamped to [0, 1]."""
    _check_dims(u, v)
    if u.is_zero() or v.is_zero():
        return 0.0
    if u.entries == v.entries:
        return 1.0
    small, big = (u.entries, v.entries) if len(u.entries) <= len(v.entries) else (v.entries, u.entries)
    dot = sum(w * big.get(i, 0.0) for i, w in small.items())
    return _clamp01(dot / (u.l2_norm() * v.l2_norm()))


def js_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Base-2 Jensen-Shannon divergence of two probability vectors; in [0, 1]."""
    m = 0.5 * (p + q)
    div = 0.0
    for dist in (p, q):
        mask = dist > 0
        div += 0.5 * float(np.sum(dist[mask] * np.log2(dist[mask] / m[mask])))
    return min(1.0, max(0.0, div))


def js_similarity(u: SparseTermVector, v: SparseTermVector) -> float:
    """1 - JSD of the L1-normalized vectors."""
    _check_dims(u, v)
    if u.is_zero() or v.is_zero():
        return 0.0
    support = sorted(set(u.entries) | set(v.entries))
    p = np.array([u.entries.get(i, 0.0) for i in support])
    q = np.array([v.entries.get(i, 0.0) for i in support])
    return _clamp01(1.0 - js_divergence(p / p.sum(), q / q.sum()))


def cosine_dense(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    if np.array_equal(a, b):
        return 1.0
    return _clamp01(float(a @ b) / (na * nb))


def latent_similarity(model: LatentModel, u: SparseTermVector, v: SparseTermVector) -> float:
    """Similarity in latent space: projected cosine (LSI/NMF) or 1 - JSD of topic mixtures (LDA)."""
    if u.dim != model.vocab_dim or v.dim != model.vocab_dim:
        raise DimMismatch("vector dim does not match model vocabulary")
    if u.is_zero() or v.is_zero():
        return 0.0
    if model.kind in ("lsi", "nmf"):
        return cosine_dense(project(model, u), project(model, v))
    if model.kind == "lda":
        theta_u = infer_theta(model, u)
        theta_v = infer_theta(model, v)
        return _clamp01(1.0 - js_divergence(theta_u, theta_v))
    raise ValueError(f"unknown model kind {model.kind!r}")


def hybrid_similarity(method: SimilarityMethodId, parts: dict[SimilarityMethodId, float]) -> float:
    """Unweighted mean of the two component scores named by a hybrid method."""
    if method not in HYBRID_PARTS:
        raise WrongComponents(f"{method} is not a hybrid method")
    expected = HYBRID_PARTS[method]
    if set(parts) != set(expected):
        raise WrongComponents(
            f"{method.value} needs components {[m.value for m in expected]}, "
            f"got {[m.value for m in parts]}"
        )
    return (parts[expected[0]] + parts[expected[1]]) / 2.0


@dataclass
class LatentConfig:
    lsi_k: int = 100
    nmf_k: int = 50
    nmf_max_iter: int = 200
    nmf_tol: float = 1e-4
    lda_k: int = 20
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_sweeps: int = 100
    lda_infer_sweeps: int = 50
    seed: int = 0

    @classmethod
    def from_params(cls, params: dict) -> "LatentConfig":
        sim = params.get("sim", {})
        lsi = sim.get("lsi", {})
        nmf = sim.get("nmf", {})
        lda = sim.get("lda", {})
        return cls(
            lsi_k=lsi.get("k", 100),
            nmf_k=nmf.get("k", 50),
            nmf_max_iter=nmf.get("max_iter", 200),
            nmf_tol=nmf.get("tol", 1e-4),
            lda_k=lda.get("k", 20),
            lda_alpha=lda.get("alpha"),
            lda_beta=lda.get("beta", 0.01),
            lda_sweeps=lda.get("sweeps", 100),
            lda_infer_sweeps=lda.get("infer_sweeps", 50),
            seed=sim.get("seed", 0),
        )


class TraditionalScorer:
    """Fitted representation + latent-model bundle that scores requirement pairs.

    Fit on the training fold's requirement texts only; scoring is pure and
    memoizes per-document vectors, projections, and topic mixtures.
    """

    def __init__(
        self,
        stats: CorpusStats,
        models: dict[tuple[str, Rep], LatentModel],
        bm25_k1: float = 1.5,
        bm25_b: float = 0.75,
        tokenize_kwargs: dict | None = None,
    ):
        self.stats = stats
        self.models = models
        self.bm25_k1 = bm25_k1
        self.bm25_b = bm25_b
        self.tokenize_kwargs = tokenize_kwargs or {}
        self._vec_cache: dict[tuple[Rep, str], SparseTermVector] = {}
        self._proj_cache: dict[tuple[str, Rep, str], np.ndarray] = {}

    @classmethod
    def fit(
        cls,
        texts: list[str],
        cfg: LatentConfig | None = None,
        bm25_k1: float = 1.5,
        bm25_b: float = 0.75,
        tokenize_kwargs: dict | None = None,
        fold_ids: frozenset[int] | None = None,
        reps: tuple[Rep, ...] = (Rep.TFIDF, Rep.BM25),
    ) -> "TraditionalScorer":
        from .textrep import fit_corpus_stats

        cfg = cfg or LatentConfig()
        tok_kwargs = tokenize_kwargs or {}
        docs = [tokenize(t, **tok_kwargs) for t in texts]
        stats = fit_corpus_stats(docs, fold_ids=fold_ids)
        scorer = cls(stats, {}, bm25_k1=bm25_k1, bm25_b=bm25_b, tokenize_kwargs=tok_kwargs)

        vocab = len(stats.vocabulary)
        max_rank = min(len(docs), vocab)
        # per-(rep, kind) seeds are stable regardless of which reps get fitted
        cell_index = {
            (rep, kind): i
            for i, (rep, kind) in enumerate(
                (r, k) for r in Rep for k in ("lsi", "nmf", "lda")
            )
        }
        for rep in reps:
            vectors = [scorer.vector(rep, t) for t in texts]
            for kind, k_cfg in (("lsi", cfg.lsi_k), ("nmf", cfg.nmf_k), ("lda", cfg.lda_k)):
                k = max(1, min(k_cfg, max_rank))
                kwargs = {}
                if kind == "nmf":
                    kwargs = {"max_iter": cfg.nmf_max_iter, "tol": cfg.nmf_tol}
                elif kind == "lda":
                    kwargs = {
                        "max_iter": cfg.lda_sweeps,
                        "alpha": cfg.lda_alpha,
                        "beta": cfg.lda_beta,
                        "infer_sweeps": cfg.lda_infer_sweeps,
                    }
                seed_seq = np.random.SeedSequence([cfg.seed, cell_index[(rep, kind)]])
                scorer.models[(kind, rep)] = fit_latent(
                    kind,
                    vectors,
                    k,
                    seed=int(seed_seq.generate_state(1)[0] % (2**31)),
                    fold_ids=fold_ids,
                    **kwargs,
                )
        return scorer

    def vector(self, rep: Rep, text: str) -> SparseTermVector:
        key = (rep, text)
        cached = self._vec_cache.get(key)
        if cached is not None:
            return cached
        doc = tokenize(text, **self.tokenize_kwargs)
        if rep is Rep.TFIDF:
            vec = tfidf_vector(doc, self.stats)
        else:
            vec = bm25_vector(doc, self.stats, k1=self.bm25_k1, b=self.bm25_b)
        self._vec_cache[key] = vec
        return vec

    def _latent_repr(self, kind: str, rep: Rep, text: str) -> np.ndarray:
        key = (kind, rep, text)
        cached = self._proj_cache.get(key)
        if cached is None:
            model = self.models[(kind, rep)]
            vec = self.vector(rep, text)
            cached = infer_theta(model, vec) if kind == "lda" else project(model, vec)
            self._proj_cache[key] = cached
        return cached

    def base_scores(self, rep: Rep, left: str, right: str) -> dict[SimilarityMethodId, float]:
        u = self.vector(rep, left)
        v = self.vector(rep, right)
        scores = {
            SimilarityMethodId.VSM: vsm_similarity(u, v),
            SimilarityMethodId.JS: js_similarity(u, v),
        }
        if u.is_zero() or v.is_zero():
            scores[SimilarityMethodId.LSI] = 0.0
            scores[SimilarityMethodId.NMF] = 0.0
            scores[SimilarityMethodId.LDA] = 0.0
            return scores
        scores[SimilarityMethodId.LSI] = cosine_dense(
            self._latent_repr("lsi", rep, left), self._latent_repr("lsi", rep, right)
        )
        scores[SimilarityMethodId.NMF] = cosine_dense(
            self._latent_repr("nmf", rep, left), self._latent_repr("nmf", rep, right)
        )
        scores[SimilarityMethodId.LDA] = _clamp01(
            1.0 - js_divergence(
                self._latent_repr("lda", rep, left), self._latent_repr("lda", rep, right)
            )
        )
        return scores

    def method_scores(self, rep: Rep, left: str, right: str) -> list[float]:
        base = self.base_scores(rep, left, right)
        out = []
        for method in METHOD_ORDER:
            if method in HYBRID_PARTS:
                a, b = HYBRID_PARTS[method]
                out.append(hybrid_similarity(method, {a: base[a], b: base[b]}))
            else:
                out.append(base[method])
        return out

    def artifacts(self):
        yield self.stats
        yield from self.models.values()


def traditional_vector(pair: RequirementPair, scorer: TraditionalScorer) -> TraditionalSimVector:
    """The 20-dim pair vector: the 10 method scores under TFIDF, then under BM25."""
    values = []
    for rep in Rep:
        values.extend(scorer.method_scores(rep, pair.left.text, pair.right.text))
    return TraditionalSimVector(values=np.asarray(values))
