"""Acceptance gate: every criterion below must pass at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. The end-to-end benchmark is synthetic and self-contained; no
sidecar service or checked-out model weights are involved anywhere here.
"""

import math
import time

import numpy as np
import pytest

from reqfuse.corpus import load_pairs, stratified_kfold
from reqfuse.errors import LeakageDetected
from reqfuse.evaluation import check_no_leakage, confusion, cross_validate, macro_metrics, standard_metrics
from reqfuse.latent import fit_latent, infer_theta
from reqfuse.learn import ClassifierSpec, fit, predict
from reqfuse.llmknow import PairEmbedding, LlmModelId, FusionStrategy, fit_pca, fuse
from reqfuse.pipeline import ExperimentPlan, PipelineConfig, assemble, run_experiment
from reqfuse.simtrad import js_similarity, vsm_similarity
from reqfuse.synthetic import write_benchmark
from reqfuse.textrep import SparseTermVector

from conftest import make_blobs

BENCH_PARAMS = {
    "sim": {
        "lsi": {"k": 30},
        "nmf": {"k": 20, "max_iter": 120, "tol": 1e-4},
        "lda": {"k": 6, "alpha": 0.5, "sweeps": 30, "infer_sweeps": 15},
        "seed": 7,
    }
}


def ok(line: str):
    print(f"\nACCEPTANCE PASS: {line}")


@pytest.fixture(scope="module")
def bench400(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench400")
    csv_path, store_path = write_benchmark(out, n_pairs=400, seed=7)
    return str(csv_path), str(store_path)


def sparse_of(dense) -> SparseTermVector:
    return SparseTermVector(
        entries={i: float(w) for i, w in enumerate(dense) if w != 0.0}, dim=len(dense)
    )


class TestKernelOracleEquivalence:
    started = None

    @classmethod
    def setup_class(cls):
        cls.started = time.monotonic()

    @classmethod
    def teardown_class(cls):
        elapsed = time.monotonic() - cls.started
        assert elapsed < 10.0, f"kernel oracle block took {elapsed:.2f}s, budget 10s"
        ok(f"kernel oracle block runtime {elapsed:.2f}s < 10s")

    def test_cosine_vs_dense_dot_oracle(self):
        rng = np.random.default_rng(101)
        worst = 0.0
        for _ in range(50):
            a = rng.uniform(0, 1, 12) * (rng.random(12) > 0.4)
            b = rng.uniform(0, 1, 12) * (rng.random(12) > 0.4)
            na, nb = np.linalg.norm(a), np.linalg.norm(b)
            expected = 0.0 if na == 0 or nb == 0 else min(1.0, float(a @ b) / (na * nb))
            got = vsm_similarity(sparse_of(a), sparse_of(b))
            worst = max(worst, abs(got - expected))
        assert worst <= 1e-9
        ok(f"cosine vs dense dot-product oracle, 50 pairs, worst |delta| {worst:.2e} <= 1e-9")

    def test_jsd_vs_direct_formula_oracle(self):
        def jsd_oracle(p, q):
            def h(d):
                return -sum(x * math.log2(x) for x in d if x > 0)

            m = [(a + b) / 2 for a, b in zip(p, q)]
            return h(m) - (h(p) + h(q)) / 2

        rng = np.random.default_rng(102)
        worst = 0.0
        checked = 0
        while checked < 100:
            a = rng.uniform(0, 1, 8) * (rng.random(8) > 0.3)
            b = rng.uniform(0, 1, 8) * (rng.random(8) > 0.3)
            if a.sum() == 0 or b.sum() == 0:
                continue
            checked += 1
            p, q = a / a.sum(), b / b.sum()
            jsd = jsd_oracle(list(p), list(q))
            assert jsd <= 1.0 + 1e-15  # base-2 bound
            got = js_similarity(sparse_of(a), sparse_of(b))
            worst = max(worst, abs(got - (1.0 - jsd)))
        p = np.array([0.25, 0.25, 0.5])
        v = sparse_of(p)
        assert js_similarity(v, v) == 1.0  # JSD(p, p) = 0 exactly
        assert worst <= 1e-9
        ok(f"JSD vs direct-formula oracle, 100 pairs, worst |delta| {worst:.2e} <= 1e-9; JSD(p,p)=0; bound<=1")

    def test_pca_vs_dense_eigendecomposition_oracle(self):
        rng = np.random.default_rng(103)
        data = rng.normal(size=(50, 20)) * np.linspace(4, 0.2, 20)
        embeddings = [PairEmbedding(f"p{i}", LlmModelId.BERT, row) for i, row in enumerate(data)]
        pca = fit_pca(embeddings, 16)
        centered = data - data.mean(axis=0)
        eigvals = np.linalg.eigvalsh(centered.T @ centered / (len(data) - 1))[::-1][:16]
        rel = float((np.abs(pca.explained_variance - eigvals) / eigvals).max())
        gram_err = float(np.abs(pca.components @ pca.components.T - np.eye(16)).max())
        assert rel <= 1e-6
        assert gram_err <= 1e-8
        ok(f"PCA explained variance vs eig oracle rel err {rel:.2e} <= 1e-6; orthonormality {gram_err:.2e} <= 1e-8")

    def test_confusion_metrics_vs_nested_loop_oracle(self):
        rng = np.random.default_rng(104)
        classes = ["conflict", "neutral", "duplicate"]
        y_true = [classes[i] for i in rng.integers(0, 3, 200)]
        y_pred = [classes[i] for i in rng.integers(0, 3, 200)]
        cm = confusion(y_true, y_pred, classes)
        prs, rs = [], []
        for c in classes:
            tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
            fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
            tn = sum(1 for t, p in zip(y_true, y_pred) if t != c and p != c)
            fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
            assert (cm.tp[c], cm.fp[c], cm.tn[c], cm.fn[c]) == (tp, fp, tn, fn)
            pr, r, f1 = standard_metrics(cm, c)
            assert pr == (tp / (tp + fp) if tp + fp else 0.0)
            assert r == (tp / (tp + fn) if tp + fn else 0.0)
            assert f1 == (2 * pr * r / (pr + r) if pr + r else 0.0)
            prs.append(pr)
            rs.append(r)
        pr_m, r_m, f1_m = macro_metrics(prs, rs)
        assert pr_m == sum(prs) / 3 and r_m == sum(rs) / 3
        assert f1_m == 2 * pr_m * r_m / (pr_m + r_m)
        ok("confusion + standard + macro metrics match nested-loop oracle exactly on 200 labelings")


class TestNumericalOptimizationProperties:
    def test_nmf_error_non_increasing_and_nonnegative(self):
        for seed in range(5):
            rng = np.random.default_rng(1000 + seed)
            dense = rng.uniform(0, 1, (12, 10))
            model = fit_latent(
                "nmf", [sparse_of(r) for r in dense], k=4, seed=seed, max_iter=200, tol=0.0
            )
            losses = model.loss_history
            assert len(losses) == 200
            for a, b in zip(losses, losses[1:]):
                assert b <= a + 1e-10 * max(a, 1.0), f"seed {seed}: uptick {a} -> {b}"
            assert (model.basis >= 0).all() and (model.doc_factors >= 0).all()
        ok("NMF Frobenius error non-increasing over 200 updates on 5 seeded matrices; factors >= 0")

    def test_lda_two_topic_recovery_under_30s(self):
        start = time.monotonic()
        rng = np.random.default_rng(7)
        rows = []
        for d in range(40):
            lo = 0 if d % 2 == 0 else 8
            counts = {}
            for _ in range(15):
                w = int(rng.integers(lo, lo + 8))
                counts[w] = counts.get(w, 0) + 1
            rows.append(sparse_of([counts.get(i, 0) for i in range(16)]))
        model = fit_latent("lda", rows, k=2, seed=7, max_iter=200, alpha=0.1)
        frac = float(np.mean([infer_theta(model, r).max() > 0.7 for r in rows]))
        elapsed = time.monotonic() - start
        assert frac >= 0.9, f"only {frac:.0%} of docs dominated"
        assert elapsed < 30.0
        ok(f"LDA 2-topic fixture: {frac:.0%} docs with dominant mass > 0.7 (>= 90%), {elapsed:.1f}s < 30s")

    def test_gboost_log_loss_non_increasing(self):
        X, y = make_blobs(n=200, margin=2.0, seed=7)
        model = fit(ClassifierSpec("GBOOST", {"n_rounds": 50}, seed=7), X, y)
        losses = model.impl.train_log_loss
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
        ok("GBOOST train log-loss non-increasing per round on the blobs fixture")


class TestStructuralDims:
    def test_fusion_dims_match(self):
        blocks = {"tfidf": np.zeros(10), "bm25": np.zeros(10), "llm": np.zeros(10)}
        dims = []
        for strategy in FusionStrategy:
            kwargs = {tag: blocks[tag] for tag in strategy.blocks()}
            dims.append(fuse(strategy, **kwargs).values.shape[0])
        assert sorted(dims) == [10, 10, 10, 20, 20, 20, 30]
        fused38 = fuse(
            FusionStrategy.TFIDF_BM25_LLM, cls=np.zeros(8), **blocks
        )
        assert fused38.values.shape == (38,)
        from reqfuse.simtrad import DIM_NAMES

        assert len(DIM_NAMES) == 20
        ok("fusion dims {10,10,10,20,20,20,30}; CLS(8)+30 -> 38; traditional vector length 20")


class TestClassifierFloor:
    def test_all_native_classifiers_on_blobs(self):
        X, y = make_blobs(n=200, margin=2.0, seed=7)
        specs = {
            "KNN": {"k": 3},
            "GNB": {},
            "BNB": {},
            "LOGR": {},
            "LINSVM": {},
            "QDA": {},
            "DT": {"max_depth": 8},
            "RF": {"n_trees": 20, "max_depth": 8},
            "ADABOOST": {"n_rounds": 20},
            "GBOOST": {"n_rounds": 30},
            "MLP": {"hidden": (16,), "epochs": 100},
        }
        accs = {}
        for algo, hp in specs.items():
            model = fit(ClassifierSpec(algo, hp, seed=7), X, y)
            accs[algo] = float(np.mean(predict(model, X) == y))
            assert accs[algo] >= 0.95, f"{algo}: {accs[algo]}"
        knn1 = fit(ClassifierSpec("KNN", {"k": 1}, seed=7), X, y)
        assert float(np.mean(predict(knn1, X) == y)) == 1.0
        floor = min(accs.values())
        ok(f"all 11 native classifiers >= 0.95 on blobs (min {floor:.3f}); KNN k=1 train accuracy 1.0")


class TestEndToEndBenchmark:
    def test_similarity_and_hybrid_pipelines(self, bench400):
        start = time.monotonic()
        csv_path, store_path = bench400
        ds = load_pairs(csv_path)
        assert len(ds.pairs) == 400
        mlp = {"algo": "MLP", "hyperparams": {"hidden": (32,), "epochs": 150, "lr": 0.05}}
        sim_cfg = PipelineConfig.from_dict(
            {
                "family": "SIMILARITY", "fusion": "tfidf_bm25_llm", "classifier": mlp,
                "dataset": csv_path, "store": store_path, "seed": 7, "params": BENCH_PARAMS,
            }
        )
        cv_sim = cross_validate(sim_cfg, ds, k=3, seed=7)
        f1_sim = cv_sim.aggregate["f1"][0]
        assert f1_sim >= 0.90, f"SIMILARITY positive-class F1 {f1_sim:.4f} < 0.90"

        hyb_cfg = PipelineConfig.from_dict(
            {
                "family": "HYBRID", "fusion": "tfidf_bm25_llm", "classifier": mlp,
                "cls_model": "longformer", "cls_dim": 16,
                "dataset": csv_path, "store": store_path, "seed": 7, "params": BENCH_PARAMS,
            }
        )
        cv_hyb = cross_validate(hyb_cfg, ds, k=3, seed=7)
        f1_hyb = cv_hyb.aggregate["f1"][0]
        assert f1_hyb >= f1_sim - 0.02, f"HYBRID {f1_hyb:.4f} < SIMILARITY {f1_sim:.4f} - 0.02"
        elapsed = time.monotonic() - start
        assert elapsed < 120.0, f"benchmark took {elapsed:.1f}s, budget 120s"
        ok(
            f"e2e benchmark: SIMILARITY(30)+MLP F1 {f1_sim:.4f} >= 0.90; "
            f"HYBRID(CLS16+30)+MLP F1 {f1_hyb:.4f} >= SIMILARITY - 0.02; {elapsed:.1f}s < 120s"
        )


class TestProtocolGuards:
    def test_every_fitted_artifact_tracks_training_folds(self, bench400):
        csv_path, store_path = bench400
        ds = load_pairs(csv_path)
        plan = stratified_kfold(ds, k=3, seed=7)
        train_pairs, _, train_folds = plan.split(ds, test_fold=0)
        cfg = PipelineConfig.from_dict(
            {
                "family": "HYBRID", "fusion": "tfidf_bm25_llm",
                "classifier": {"algo": "KNN", "hyperparams": {"k": 3}},
                "cls_model": "bert", "cls_dim": 8,
                "dataset": csv_path, "store": store_path, "seed": 7, "params": BENCH_PARAMS,
            }
        )
        fitted = assemble(cfg).fit(train_pairs[:60], train_folds, train_classifier=False)
        artifacts = list(fitted.artifacts())
        assert len(artifacts) == 8  # corpus stats + 6 latent models + PCA
        for artifact in artifacts:
            assert artifact.fit_fold_ids == train_folds
        check_no_leakage(artifacts, test_fold=0, train_folds=train_folds)
        with pytest.raises(LeakageDetected):
            check_no_leakage(artifacts, test_fold=1, train_folds=frozenset({0, 2}))
        ok("leakage guard: all 8 fitted artifacts carry exact training-fold sets; poisoned check raises")

    def test_reports_byte_identical_for_same_master_seed(self, bench400, tmp_path):
        csv_path, store_path = bench400
        outputs = []
        for name in ("run_a", "run_b"):
            out_dir = tmp_path / name
            plan = ExperimentPlan.from_dict(
                {
                    "out_dir": str(out_dir),
                    "master_seed": 99,
                    "folds": 3,
                    "params": BENCH_PARAMS,
                    "cells": [
                        {"dataset": csv_path, "store": store_path, "family": "SIMILARITY",
                         "fusion": "llm", "classifier": {"algo": "KNN", "hyperparams": {"k": 5}}},
                        {"dataset": csv_path, "store": store_path, "family": "SIMILARITY",
                         "fusion": "llm", "classifier": {"algo": "GNB", "hyperparams": {}}},
                    ],
                }
            )
            run_experiment(plan)
            outputs.append(
                ((out_dir / "report.csv").read_bytes(), (out_dir / "report.md").read_bytes())
            )
        assert outputs[0] == outputs[1]
        ok("rerunning an experiment with the same master seed yields byte-identical report files")
