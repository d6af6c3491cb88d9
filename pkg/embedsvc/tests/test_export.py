import json

from fastapi.testclient import TestClient

from embedsvc import cli
from embedsvc.config import ModelSpec, ServiceConfig
from embedsvc.service import create_app
from embedsvc.store import export_store, format_float, read_pairs_csv

SPECS = [ModelSpec(name="albert"), ModelSpec(name="bert")]


def read_records(path):
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


class TestExportStore:
    def test_record_counts(self, pairs_csv, tmp_path):
        out = tmp_path / "store.jsonl"
        stats = export_store(pairs_csv, SPECS, out)
        assert stats == {"pairs": 3, "written": 12, "skipped": 0}
        records = read_records(out)
        assert sum(1 for r in records if r["kind"] == "sim") == 6
        assert sum(1 for r in records if r["kind"] == "cls") == 6

    def test_restart_appends_only_missing(self, pairs_csv, tmp_path):
        out = tmp_path / "store.jsonl"
        export_store(pairs_csv, [SPECS[0]], out)
        before = out.read_bytes()
        stats = export_store(pairs_csv, SPECS, out)
        assert stats["written"] == 6  # only the second model's records
        assert out.read_bytes().startswith(before)
        rerun = export_store(pairs_csv, SPECS, out)
        assert rerun["written"] == 0

    def test_meta_records_backend_and_pooling(self, pairs_csv, tmp_path):
        out = tmp_path / "store.jsonl"
        export_store(pairs_csv, [SPECS[0]], out)
        for rec in read_records(out):
            assert rec["meta"]["backend"] == "hash"
            if rec["kind"] == "sim":
                assert rec["meta"]["similarity"] == "cosine-of-pooled"
                assert rec["meta"]["pooling"] == "mean"
            else:
                assert rec["meta"]["pooling"] == "cls"

    def test_offline_equals_live_responses_bit_for_bit(self, pairs_csv, tmp_path):
        out = tmp_path / "store.jsonl"
        export_store(pairs_csv, SPECS, out)
        records = {(r["pair_id"], r["model"], r["kind"]): r["values"] for r in read_records(out)}
        pairs = read_pairs_csv(pairs_csv)
        cfg = ServiceConfig.from_names([s.name for s in SPECS])
        with TestClient(create_app(cfg)) as client:
            for spec in SPECS:
                sims = client.post(
                    "/v1/pair-similarities",
                    json={"model": spec.name, "pairs": pairs, "pooling": "mean"},
                ).json()["scores"]
                for pair, score in zip(pairs, sims):
                    stored = records[(pair["pair_id"], spec.name, "sim")][0]
                    assert float(format_float(score["value"])) == stored
                embs = client.post(
                    "/v1/cls-embeddings",
                    json={"model": spec.name, "pairs": pairs, "pooling": "cls"},
                ).json()["vectors"]
                for pair, emb in zip(pairs, embs):
                    stored = records[(pair["pair_id"], spec.name, "cls")]
                    assert [float(format_float(v)) for v in emb["values"]] == stored

    def test_exported_store_passes_core_validation(self, pairs_csv, tmp_path):
        reqfuse_llmknow = __import__("reqfuse.llmknow", fromlist=["load_store"])
        out = tmp_path / "store.jsonl"
        specs = [ModelSpec(name=n) for n in (
            "albert", "bart", "bert", "deberta", "electra",
            "gpt", "longformer", "roberta", "xlm", "xlnet",
        )]
        export_store(pairs_csv, specs, out)
        store = reqfuse_llmknow.load_store(out)
        assert len(store) == 3 * 10 * 2
        vec = reqfuse_llmknow.llm_sim_vector("p0", store)
        assert vec.shape == (10,)
        assert all(0.0 <= v <= 1.0 for v in vec)
        emb = store.cls_embedding("p0", reqfuse_llmknow.LlmModelId.BERT)
        assert emb.vector.shape == (32,)

    def test_identical_pair_sim_is_one_in_store(self, pairs_csv, tmp_path):
        out = tmp_path / "store.jsonl"
        export_store(pairs_csv, [SPECS[0]], out)
        records = {(r["pair_id"], r["kind"]): r["values"] for r in read_records(out)}
        assert records[("p0", "sim")][0] == 1.0  # identical left/right texts


class TestCli:
    def test_export_command(self, pairs_csv, tmp_path, capsys):
        out = tmp_path / "store.jsonl"
        rc = cli.main([
            "export", "--dataset", str(pairs_csv), "--models", "albert,bert",
            "--out", str(out),
        ])
        assert rc == 0
        assert "wrote 12 records" in capsys.readouterr().out
        assert len(read_records(out)) == 12

    def test_export_requires_models(self, pairs_csv, tmp_path):
        rc = cli.main(["export", "--dataset", str(pairs_csv), "--out", str(tmp_path / "s.jsonl")])
        assert rc == 1

    def test_config_file_round_trip(self, tmp_path):
        cfg_path = tmp_path / "svc.json"
        cfg_path.write_text(json.dumps({
            "max_batch": 8,
            "lazy": True,
            "models": {"bert": {"backend": "hash", "dim": 16}, "gpt": "hash"},
        }))
        cfg = ServiceConfig.from_file(cfg_path)
        assert cfg.max_batch == 8 and cfg.lazy
        assert cfg.models["bert"].dim == 16
        assert cfg.models["gpt"].backend == "hash"
