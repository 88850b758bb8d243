"""Neighbor providers: the uniform query surface over trained models and
the pmra client. A provider has a .name ("pv-dbow", "pv-dm", "pmra") and
.neighbors(doc, k) returning a NeighborList."""

from __future__ import annotations

import zlib

from .corpus import Document, normalize_document
from .embedding import EmbeddingModel, infer_vector, top_k_neighbors
from .embedding.similarity import NeighborList
from .pmra import PmraClient

__all__ = ["EmbeddingProvider", "PmraProvider", "ScriptedProvider"]


class EmbeddingProvider:
    """Neighbors by cosine over a model's document matrix. Stored documents
    query with their trained vector; unseen documents are inferred first.
    Inference seeds derive from the query id, so results are stable across
    runs and independent of query order."""

    def __init__(
        self,
        model: EmbeddingModel,
        infer_epochs: int | None = None,
        seed: int | None = None,
    ):
        self.model = model
        self.infer_epochs = infer_epochs
        self.seed = model.params.seed if seed is None else seed

    @property
    def name(self) -> str:
        return self.model.params.architecture

    def _query_vector(self, doc: Document):
        qid = str(doc.pmid)
        if qid in self.model:
            return self.model.vector_for(qid)
        tokens = normalize_document(doc)
        per_query = zlib.crc32(f"{self.seed}:{qid}".encode())
        return infer_vector(
            self.model, tokens, infer_epochs=self.infer_epochs, seed=per_query
        )

    def neighbors(self, doc: Document, k: int) -> NeighborList:
        qid = str(doc.pmid)
        nl = top_k_neighbors(
            self.model,
            self._query_vector(doc),
            k,
            exclude_ids=[qid],
            query_id=qid,
        )
        nl.source = self.name
        return nl


class PmraProvider:
    """Thin adapter putting the eLink client behind the provider surface."""

    name = "pmra"

    def __init__(self, client: PmraClient):
        self.client = client

    def neighbors(self, doc: Document, k: int) -> NeighborList:
        return self.client.fetch_pmra_neighbors(int(doc.pmid), k)


class ScriptedProvider:
    """Fixed answers for tests: maps query id -> list of (id, score)."""

    def __init__(self, answers: dict[str, list[tuple[str, float]]],
                 name: str = "pv-dbow"):
        self.answers = answers
        self.name = name

    def neighbors(self, doc: Document, k: int) -> NeighborList:
        qid = str(doc.pmid)
        pairs = self.answers[qid][:k]
        return NeighborList(qid, list(pairs), self.name, len(pairs) < k)
