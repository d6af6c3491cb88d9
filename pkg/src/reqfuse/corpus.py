"""Labeled requirement-pair datasets: loading, writing, and the fold protocol.

A dataset is a list of (left requirement, right requirement, label) rows where
the label is one of conflict / duplicate / neutral, and a dataset mixes neutral
rows with at most one of the two positive labels.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassTooSmall,
    DuplicatePairId,
    EmptyFile,
    InvalidDataset,
    MissingColumn,
    UnknownLabel,
)

CSV_HEADER = ["pair_id", "req1_id", "req1_text", "req2_id", "req2_text", "label"]


class PairLabel(enum.Enum):
    CONFLICT = "conflict"
    DUPLICATE = "duplicate"
    NEUTRAL = "neutral"

    @classmethod
    def parse(cls, raw: str) -> "PairLabel":
        try:
            return cls(raw.strip().lower())
        except ValueError:
            raise UnknownLabel(f"unknown label {raw!r}") from None


@dataclass(frozen=True)
class Requirement:
    id: str
    text: str


@dataclass(frozen=True)
class RequirementPair:
    pair_id: str
    left: Requirement
    right: Requirement
    label: PairLabel


@dataclass(frozen=True)
class PairDataset:
    name: str
    pairs: tuple[RequirementPair, ...]
    positive_class: PairLabel

    def __post_init__(self):
        if not self.pairs:
            raise InvalidDataset("dataset must contain at least one pair")
        if self.positive_class is PairLabel.NEUTRAL:
            raise InvalidDataset("positive_class cannot be neutral")

    def labels(self) -> list[PairLabel]:
        return [p.label for p in self.pairs]

    def by_id(self) -> dict[str, RequirementPair]:
        return {p.pair_id: p for p in self.pairs}


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: dict[str, int]
    seed: int

    def fold_ids(self, fold: int) -> list[str]:
        return [pid for pid, f in self.assignments.items() if f == fold]

    def split(self, ds: PairDataset, test_fold: int):
        """Return (train_pairs, test_pairs, train_fold_set) for one CV round."""
        train, test = [], []
        for p in ds.pairs:
            (test if self.assignments[p.pair_id] == test_fold else train).append(p)
        train_folds = frozenset(range(self.k)) - {test_fold}
        return train, test, train_folds


def _resolve_positive(labels: set[PairLabel], name: str) -> PairLabel:
    positives = labels - {PairLabel.NEUTRAL}
    if len(positives) > 1:
        raise InvalidDataset(
            f"{name}: dataset mixes both positive labels {sorted(l.value for l in positives)}"
        )
    if not positives:
        raise InvalidDataset(f"{name}: dataset has no positive-class rows")
    return positives.pop()


def build_dataset(name: str, pairs: list[RequirementPair]) -> PairDataset:
    seen = set()
    for p in pairs:
        if p.pair_id in seen:
            raise DuplicatePairId(f"duplicate pair_id {p.pair_id!r}")
        seen.add(p.pair_id)
    positive = _resolve_positive({p.label for p in pairs}, name)
    return PairDataset(name=name, pairs=tuple(pairs), positive_class=positive)


def load_pairs(path, name: str | None = None) -> PairDataset:
    """Load a pairs CSV (UTF-8, RFC-4180, header pair_id,req1_id,req1_text,req2_id,req2_text,label)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        missing = [c for c in CSV_HEADER if c not in header]
        if missing:
            raise MissingColumn(f"{path}: header lacks column(s) {missing}")
        idx = {c: header.index(c) for c in CSV_HEADER}
        pairs = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                label = PairLabel.parse(row[idx["label"]])
            except UnknownLabel as e:
                raise UnknownLabel(f"{path}, row {rownum}: {e}") from None
            pid = row[idx["pair_id"]]
            pairs.append(
                RequirementPair(
                    pair_id=pid,
                    left=Requirement(row[idx["req1_id"]], row[idx["req1_text"]]),
                    right=Requirement(row[idx["req2_id"]], row[idx["req2_text"]]),
                    label=label,
                )
            )
        if not pairs:
            raise EmptyFile(f"{path}: no data rows")
    seen = set()
    for rownum, p in enumerate(pairs, start=2):
        if p.pair_id in seen:
            raise DuplicatePairId(f"{path}, row {rownum}: duplicate pair_id {p.pair_id!r}")
        seen.add(p.pair_id)
    dsname = name if name is not None else str(path)
    positive = _resolve_positive({p.label for p in pairs}, dsname)
    return PairDataset(name=dsname, pairs=tuple(pairs), positive_class=positive)


def write_pairs(ds: PairDataset, path) -> None:
    """Write the canonical CSV form: LF line endings, minimal quoting, lowercase labels."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in ds.pairs:
            writer.writerow(
                [p.pair_id, p.left.id, p.left.text, p.right.id, p.right.text, p.label.value]
            )


def stratified_kfold(ds: PairDataset, k: int, seed: int) -> FoldPlan:
    """Assign pairs to k folds: per-label seeded shuffle, then round-robin.

    Guarantees per-fold counts of every label differ by at most 1.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    by_label: dict[PairLabel, list[str]] = {}
    for p in ds.pairs:
        by_label.setdefault(p.label, []).append(p.pair_id)
    for label, ids in by_label.items():
        if len(ids) < k:
            raise ClassTooSmall(
                f"class {label.value!r} has {len(ids)} members, need >= {k} for {k}-fold"
            )
    rng = np.random.default_rng(seed)
    assignments: dict[str, int] = {}
    for label in sorted(by_label, key=lambda l: l.value):
        ids = list(by_label[label])
        order = rng.permutation(len(ids))
        for pos, j in enumerate(order):
            assignments[ids[j]] = pos % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


def carve_validation(train_ids: list[str], fraction: float, seed: int):
    """Split ids into (train, validation); |val| = round(fraction * n), floor 1."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    n = len(train_ids)
    n_val = max(1, round(fraction * n))
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    val_idx = set(order[:n_val].tolist())
    train = [train_ids[i] for i in range(n) if i not in val_idx]
    val = [train_ids[i] for i in range(n) if i in val_idx]
    return train, val
