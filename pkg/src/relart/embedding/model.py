"""Model container and versioned binary serialization.

File layout, all little-endian:
  8-byte magic "RELARTPV", uint32 format version, then four uint64
  length-prefixed JSON blocks (hyperparameters, vocabulary words+counts,
  document ids, metadata), then three matrices (document, word, output),
  each as uint32 rows, uint32 cols, rows*cols float32 values row-major.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .params import HyperParams
from .vocab import Vocabulary, vocabulary_from_counts

__all__ = ["EmbeddingModel", "init_matrices", "save_model", "load_model"]

MAGIC = b"RELARTPV"
FORMAT_VERSION = 1


@dataclass
class EmbeddingModel:
    """A trained paragraph-vector model. Immutable once training finishes;
    concurrent readers share it freely."""

    params: HyperParams
    vocab: Vocabulary
    doc_ids: list[str]
    docvecs: np.ndarray   # (n_docs, d) float32
    wordvecs: np.ndarray  # (|V|, d) float32
    outw: np.ndarray      # inner nodes (hs) or word outputs (ns), float32
    meta: dict = field(default_factory=dict)
    doc_index: dict[str, int] = field(repr=False, default_factory=dict)
    _doc_norms: np.ndarray | None = field(repr=False, default=None)

    def __post_init__(self):
        if not self.doc_index:
            self.doc_index = {d: i for i, d in enumerate(self.doc_ids)}
        if len(self.doc_index) != len(self.doc_ids):
            raise ValueError("document ids must be unique")
        d = self.params.vector_size
        for name, m in (("doc", self.docvecs), ("word", self.wordvecs),
                        ("output", self.outw)):
            if m.shape[1] != d:
                raise ValueError(f"{name} matrix width {m.shape[1]} != {d}")

    @property
    def vector_size(self) -> int:
        return self.params.vector_size

    def __len__(self) -> int:
        return len(self.doc_ids)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_index

    def vector_for(self, doc_id: str) -> np.ndarray:
        return self.docvecs[self.doc_index[doc_id]]

    def doc_norms(self) -> np.ndarray:
        """L2 norms of document rows in float64, cached after first use."""
        if self._doc_norms is None:
            self._doc_norms = np.linalg.norm(
                self.docvecs.astype(np.float64), axis=1
            )
        return self._doc_norms


def init_matrices(
    params: HyperParams, n_docs: int, n_words: int, n_out: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Input matrices uniform in [-0.5/d, +0.5/d]; output weights zero."""
    d = params.vector_size
    gen = np.random.default_rng(seed)
    bound = 0.5 / d
    docvecs = gen.uniform(-bound, bound, (n_docs, d)).astype(np.float32)
    wordvecs = gen.uniform(-bound, bound, (n_words, d)).astype(np.float32)
    outw = np.zeros((n_out, d), dtype=np.float32)
    return docvecs, wordvecs, outw


def _write_block(fh: BinaryIO, obj) -> None:
    raw = json.dumps(obj, ensure_ascii=False).encode("utf-8")
    fh.write(struct.pack("<Q", len(raw)))
    fh.write(raw)


def _read_block(fh: BinaryIO):
    (length,) = struct.unpack("<Q", _read_exact(fh, 8))
    return json.loads(_read_exact(fh, length).decode("utf-8"))


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ValueError("model file truncated")
    return data


def _write_matrix(fh: BinaryIO, m: np.ndarray) -> None:
    rows, cols = m.shape
    fh.write(struct.pack("<II", rows, cols))
    fh.write(np.ascontiguousarray(m, dtype="<f4").tobytes())


def _read_matrix(fh: BinaryIO) -> np.ndarray:
    rows, cols = struct.unpack("<II", _read_exact(fh, 8))
    data = _read_exact(fh, rows * cols * 4)
    return np.frombuffer(data, dtype="<f4").reshape(rows, cols).copy()


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        _write_block(fh, model.params.as_dict())
        _write_block(
            fh,
            {"words": model.vocab.words,
             "counts": [int(c) for c in model.vocab.counts]},
        )
        _write_block(fh, model.doc_ids)
        _write_block(fh, model.meta)
        _write_matrix(fh, model.docvecs)
        _write_matrix(fh, model.wordvecs)
        _write_matrix(fh, model.outw)


def load_model(path: str | Path) -> EmbeddingModel:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path} is not a model file (bad magic)")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        params = HyperParams.from_dict(_read_block(fh))
        vocab_raw = _read_block(fh)
        doc_ids = list(_read_block(fh))
        meta = _read_block(fh)
        docvecs = _read_matrix(fh)
        wordvecs = _read_matrix(fh)
        outw = _read_matrix(fh)
    vocab = vocabulary_from_counts(
        vocab_raw["words"],
        np.array(vocab_raw["counts"], dtype=np.int64),
        params.hs,
        params.negative,
    )
    return EmbeddingModel(params, vocab, doc_ids, docvecs, wordvecs, outw, meta)
