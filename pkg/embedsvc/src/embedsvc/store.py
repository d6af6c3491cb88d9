"""Offline store export: one JSONL record per (pair, model, kind).

The record shape matches the core's knowledge-store schema exactly:
{"pair_id", "model", "kind": "sim"|"cls", "values": [...], "meta": {...}}
with floats at 17 significant digits so values survive round-trips bit-exactly.
Exports are restartable: existing records are kept, only missing ones append.
"""

from __future__ import annotations

import csv
import json
import os

from .encoders import build_encoder, encode_pair_text, pair_similarity

PAIRS_HEADER = ("pair_id", "req1_id", "req1_text", "req2_id", "req2_text", "label")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def read_pairs_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in PAIRS_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: pairs CSV lacks column(s) {missing}")
        return [
            {"pair_id": row["pair_id"], "left": row["req1_text"], "right": row["req2_text"]}
            for row in reader
        ]


def existing_keys(path) -> set[tuple[str, str, str]]:
    keys = set()
    if not os.path.exists(path):
        return keys
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            keys.add((rec["pair_id"], rec["model"], rec["kind"]))
    return keys


def write_record(fh, pair_id: str, model: str, kind: str, values, meta: dict) -> None:
    vals = ", ".join(format_float(v) for v in values)
    fh.write(
        f'{{"pair_id": {json.dumps(pair_id)}, "model": {json.dumps(model)}, '
        f'"kind": {json.dumps(kind)}, "values": [{vals}], '
        f'"meta": {json.dumps(meta, sort_keys=True)}}}\n'
    )


def record_meta(encoder, pooling: str) -> dict:
    meta = {"backend": encoder.backend, "pooling": pooling}
    if encoder.checkpoint:
        meta["checkpoint"] = encoder.checkpoint
    return meta


def export_store(
    dataset_csv,
    model_specs,
    out_path,
    kinds=("sim", "cls"),
    cls_pooling: str = "cls",
    sim_pooling: str = "mean",
    cache_dir: str | None = None,
) -> dict:
    """Write sim/cls records for every (pair, model); skip records already present."""
    pairs = read_pairs_csv(dataset_csv)
    done = existing_keys(out_path)
    written = 0
    with open(out_path, "a", encoding="utf-8") as fh:
        for spec in model_specs:
            encoder = build_encoder(spec, cache_dir=cache_dir)
            for pair in pairs:
                if "sim" in kinds and (pair["pair_id"], spec.name, "sim") not in done:
                    score = pair_similarity(encoder, pair["left"], pair["right"], sim_pooling)
                    meta = record_meta(encoder, sim_pooling)
                    meta["similarity"] = "cosine-of-pooled"
                    write_record(fh, pair["pair_id"], spec.name, "sim", [score], meta)
                    written += 1
                if "cls" in kinds and (pair["pair_id"], spec.name, "cls") not in done:
                    vec = encoder.encode(encode_pair_text(pair["left"], pair["right"]), cls_pooling)
                    write_record(
                        fh, pair["pair_id"], spec.name, "cls", vec.tolist(),
                        record_meta(encoder, cls_pooling),
                    )
                    written += 1
    return {"pairs": len(pairs), "written": written, "skipped": len(done)}
