"""Reproducible train/test corpus splits."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

__all__ = ["CorpusSplit", "split_corpus", "save_split", "load_split"]


@dataclass(frozen=True)
class CorpusSplit:
    train_ids: frozenset[int]
    test_ids: frozenset[int]
    seed: int
    test_fraction: float

    def __post_init__(self):
        if self.train_ids & self.test_ids:
            raise ValueError("train and test sets overlap")


def split_corpus(store, test_fraction: float, seed: int) -> CorpusSplit:
    """Uniformly sample round(test_fraction * total) held-out documents.

    ``store`` is anything exposing pmids() or an iterable of ids. The same
    seed always yields the same split.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    ids = sorted(store.pmids() if hasattr(store, "pmids") else store)
    if not ids:
        raise ValueError("cannot split an empty corpus")
    n_test = int(math.floor(test_fraction * len(ids) + 0.5))
    rng = random.Random(seed)
    test = frozenset(rng.sample(ids, n_test))
    train = frozenset(ids) - test
    return CorpusSplit(train, test, seed, test_fraction)


def save_split(split: CorpusSplit, path) -> None:
    payload = {
        "seed": split.seed,
        "test_fraction": split.test_fraction,
        "train_ids": sorted(split.train_ids),
        "test_ids": sorted(split.test_ids),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", "utf-8")


def load_split(path) -> CorpusSplit:
    payload = json.loads(Path(path).read_text("utf-8"))
    return CorpusSplit(
        frozenset(payload["train_ids"]),
        frozenset(payload["test_ids"]),
        int(payload["seed"]),
        float(payload["test_fraction"]),
    )
