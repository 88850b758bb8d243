"""Cosine similarity and exact top-k retrieval over the document matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .model import EmbeddingModel

__all__ = ["NeighborList", "cosine_similarity", "top_k_neighbors"]


@dataclass
class NeighborList:
    """Ranked retrieval result. truncated is set when fewer than the
    requested k documents were available after exclusions."""

    query_id: str | None
    neighbors: list[tuple[str, float]]
    source: str = "pv"
    truncated: bool = False

    def ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.neighbors]


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


def top_k_neighbors(
    model: EmbeddingModel,
    query_vector: np.ndarray,
    k: int,
    exclude_ids: Iterable[str] = (),
    query_id: str | None = None,
) -> NeighborList:
    """Exhaustive exact scan: every stored document scored by cosine
    similarity, sorted descending. Ties break by document row for
    determinism. Zero-norm document rows sort last."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = np.asarray(query_vector, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != model.vector_size:
        raise ValueError(
            f"query vector must have dimension {model.vector_size}"
        )
    qn = np.linalg.norm(q)
    if qn == 0.0:
        raise ValueError("cosine similarity undefined for zero query")

    norms = model.doc_norms()
    scores = model.docvecs.astype(np.float64) @ q
    nonzero = norms > 0.0
    scores[nonzero] /= norms[nonzero] * qn
    scores[~nonzero] = -2.0

    excluded = set(exclude_ids)
    order = np.argsort(-scores, kind="stable")
    neighbors: list[tuple[str, float]] = []
    for row in order:
        doc_id = model.doc_ids[row]
        if doc_id in excluded:
            continue
        neighbors.append((doc_id, float(scores[row])))
        if len(neighbors) == k:
            break
    return NeighborList(
        query_id=query_id,
        neighbors=neighbors,
        truncated=len(neighbors) < k,
    )
