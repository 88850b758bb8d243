"""Blind rating sessions: pooled candidate lists with a server-side source
map, file-backed persistence, and rating submission with rank validation.

Evaluators only ever see opaque candidate ids plus title and abstract; the
mapping back to document ids and proposing models stays on disk with the
session. Candidates proposed by several providers appear once and their
rating later counts toward every proposer.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .agreement import RatingRecord, append_rating, load_rating_log
from .corpus import Document

__all__ = [
    "Candidate",
    "SessionQuery",
    "RatingSession",
    "SessionStore",
    "create_session",
    "SessionNotFound",
    "UnknownCandidate",
    "RankCollision",
]


class SessionNotFound(KeyError):
    pass


class UnknownCandidate(KeyError):
    pass


class RankCollision(ValueError):
    pass


@dataclass(frozen=True)
class Candidate:
    """One pooled result. candidate_id is the only identifier evaluators
    see; doc_id and sources never leave the server."""

    candidate_id: str
    doc_id: str
    title: str
    abstract: str
    sources: tuple[str, ...]

    def blind_payload(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "title": self.title,
            "abstract": self.abstract,
        }


@dataclass
class SessionQuery:
    query_id: str
    doc_id: str
    title: str
    abstract: str
    candidates: list[Candidate]

    def blind_payload(self) -> dict:
        return {
            "query_id": self.query_id,
            "title": self.title,
            "abstract": self.abstract,
            "candidates": [c.blind_payload() for c in self.candidates],
        }

    def candidate(self, candidate_id: str) -> Candidate:
        for c in self.candidates:
            if c.candidate_id == candidate_id:
                return c
        raise UnknownCandidate(candidate_id)


@dataclass
class RatingSession:
    session_id: str
    seed: int
    k: int
    providers: tuple[str, ...]
    queries: list[SessionQuery]
    status: str = "open"
    evaluators: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def query(self, query_id: str) -> SessionQuery:
        for q in self.queries:
            if q.query_id == query_id:
                return q
        raise SessionNotFound(f"query {query_id}")

    def blind_payload(self) -> dict:
        """Session overview for evaluators: no doc ids, no sources."""
        return {
            "session_id": self.session_id,
            "status": self.status,
            "queries": [
                {
                    "query_id": q.query_id,
                    "title": q.title,
                    "n_candidates": len(q.candidates),
                }
                for q in self.queries
            ],
        }

    def as_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "seed": self.seed,
            "k": self.k,
            "providers": list(self.providers),
            "status": self.status,
            "evaluators": list(self.evaluators),
            "meta": self.meta,
            "queries": [
                {
                    "query_id": q.query_id,
                    "doc_id": q.doc_id,
                    "title": q.title,
                    "abstract": q.abstract,
                    "candidates": [
                        {
                            "candidate_id": c.candidate_id,
                            "doc_id": c.doc_id,
                            "title": c.title,
                            "abstract": c.abstract,
                            "sources": list(c.sources),
                        }
                        for c in q.candidates
                    ],
                }
                for q in self.queries
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RatingSession":
        queries = [
            SessionQuery(
                q["query_id"],
                q["doc_id"],
                q["title"],
                q["abstract"],
                [
                    Candidate(
                        c["candidate_id"],
                        c["doc_id"],
                        c["title"],
                        c["abstract"],
                        tuple(c["sources"]),
                    )
                    for c in q["candidates"]
                ],
            )
            for q in d["queries"]
        ]
        return cls(
            session_id=d["session_id"],
            seed=d["seed"],
            k=d["k"],
            providers=tuple(d["providers"]),
            queries=queries,
            status=d.get("status", "open"),
            evaluators=list(d.get("evaluators", [])),
            meta=dict(d.get("meta", {})),
        )


def _select_query_docs(docs: Sequence[Document], n: int, seed: int):
    if len(docs) <= n:
        return list(docs)
    idx = sorted(random.Random(seed).sample(range(len(docs)), n))
    return [docs[i] for i in idx]


def create_session(
    docs: Sequence[Document],
    providers,
    docs_by_id: Mapping[str, Document],
    n_queries: int = 10,
    k: int = 10,
    seed: int = 0,
    session_id: str | None = None,
) -> RatingSession:
    """Pool each provider's top k per query, dedup, shuffle, assign opaque
    ids. Any provider failure aborts the whole session."""
    if n_queries < 1 or k < 1:
        raise ValueError("n_queries and k must be >= 1")
    if not providers:
        raise ValueError("at least one provider required")
    query_docs = _select_query_docs(list(docs), n_queries, seed)
    if not query_docs:
        raise ValueError("no query documents available")
    session_id = session_id or f"sess{seed}"
    queries: list[SessionQuery] = []
    dropped = 0
    for qi, doc in enumerate(query_docs):
        pooled: dict[str, list[str]] = {}
        for provider in providers:
            nl = provider.neighbors(doc, k)
            for doc_id, _ in nl.neighbors:
                sources = pooled.setdefault(doc_id, [])
                if provider.name not in sources:
                    sources.append(provider.name)
        order = list(pooled)
        random.Random(seed * 100003 + qi).shuffle(order)
        candidates = []
        for doc_id in order:
            cdoc = docs_by_id.get(doc_id)
            if cdoc is None:
                dropped += 1
                continue
            candidates.append(
                Candidate(
                    candidate_id=f"q{qi}c{len(candidates)}",
                    doc_id=doc_id,
                    title=cdoc.title,
                    abstract=cdoc.abstract,
                    sources=tuple(pooled[doc_id]),
                )
            )
        queries.append(
            SessionQuery(
                query_id=f"q{qi}",
                doc_id=str(doc.pmid),
                title=doc.title,
                abstract=doc.abstract,
                candidates=candidates,
            )
        )
    return RatingSession(
        session_id=session_id,
        seed=seed,
        k=k,
        providers=tuple(p.name for p in providers),
        queries=queries,
        meta={"unresolvable_candidates": dropped},
    )


class SessionStore:
    """One directory per data root: sessions as JSON documents, ratings as
    an append-only line log per session. Appends are serialized."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _session_path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def _log_path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.ratings.jsonl"

    def save(self, session: RatingSession, overwrite: bool = False) -> None:
        path = self._session_path(session.session_id)
        if path.exists() and not overwrite:
            raise ValueError(f"session {session.session_id} already exists")
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(session.as_dict(), ensure_ascii=False, indent=1),
            encoding="utf-8",
        )
        tmp.replace(path)

    def get(self, session_id: str) -> RatingSession:
        path = self._session_path(session_id)
        if not path.exists():
            raise SessionNotFound(session_id)
        return RatingSession.from_dict(json.loads(path.read_text("utf-8")))

    def list_ids(self) -> list[str]:
        return sorted(
            p.stem for p in self.directory.glob("*.json")
        )

    def ratings(self, session_id: str) -> list[RatingRecord]:
        path = self._log_path(session_id)
        if not path.exists():
            return []
        return load_rating_log(path)

    def submit_rating(
        self,
        session_id: str,
        evaluator_id: str,
        query_id: str,
        candidate_id: str,
        relevance: int,
        rank: int,
    ) -> RatingRecord:
        """Validate against the session pool and append. Resubmission for
        the same (evaluator, query, candidate) replaces the earlier record;
        a rank held by a different candidate is a collision."""
        session = self.get(session_id)
        if session.status != "open":
            raise ValueError(f"session {session_id} is {session.status}")
        query = session.query(query_id)
        candidate = query.candidate(candidate_id)
        pool_size = len(query.candidates)
        if not 1 <= rank <= pool_size:
            raise ValueError(
                f"rank {rank} outside 1..{pool_size} for query {query_id}"
            )
        record = RatingRecord(
            evaluator_id=evaluator_id,
            session_id=session_id,
            query_id=query_id,
            candidate_id=candidate_id,
            sources=candidate.sources,
            relevance=relevance,
            rank=rank,
        )
        with self._lock:
            for existing in self.ratings(session_id):
                if (
                    existing.evaluator_id == evaluator_id
                    and existing.query_id == query_id
                    and existing.candidate_id != candidate_id
                    and existing.rank == rank
                ):
                    raise RankCollision(
                        f"rank {rank} already used by {existing.candidate_id}"
                    )
            append_rating(self._log_path(session_id), record)
        return record
