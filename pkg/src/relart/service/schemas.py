"""Request and response bodies. Evaluator-facing payloads are modeled with
extra="forbid" so a source-model field can never ride along."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "SessionCreateRequest",
    "CandidateCard",
    "QueryOverview",
    "SessionOverview",
    "QueryCandidates",
    "RatingSubmission",
    "RatingAck",
    "NeighborEntry",
    "RelatedResponse",
    "EvalRequest",
    "EvalResponse",
]


class SessionCreateRequest(BaseModel):
    n_queries: int = Field(default=10, ge=1)
    k: int = Field(default=10, ge=1)
    seed: int = 0
    providers: list[str] = Field(default=["pv-dbow", "pmra"], min_length=1)
    session_id: str | None = None


class CandidateCard(BaseModel):
    """What an evaluator sees: opaque id, content, nothing else."""

    model_config = ConfigDict(extra="forbid")

    candidate_id: str
    title: str
    abstract: str


class QueryOverview(BaseModel):
    model_config = ConfigDict(extra="forbid")

    query_id: str
    title: str
    n_candidates: int


class SessionOverview(BaseModel):
    model_config = ConfigDict(extra="forbid")

    session_id: str
    status: str
    queries: list[QueryOverview]


class QueryCandidates(BaseModel):
    model_config = ConfigDict(extra="forbid")

    query_id: str
    title: str
    abstract: str
    candidates: list[CandidateCard]


class RatingSubmission(BaseModel):
    evaluator_id: str = Field(min_length=1)
    query_id: str
    candidate_id: str
    relevance: int = Field(ge=0, le=2)
    rank: int = Field(ge=1)


class RatingAck(BaseModel):
    model_config = ConfigDict(extra="forbid")

    status: str
    evaluator_id: str
    query_id: str
    candidate_id: str
    relevance: int
    rank: int


class NeighborEntry(BaseModel):
    id: str
    score: float
    title: str | None = None


class RelatedResponse(BaseModel):
    query_id: str
    provider: str
    k: int
    truncated: bool
    normalized: bool
    neighbors: list[NeighborEntry]


class EvalRequest(BaseModel):
    provider: str
    n_docs: int | None = Field(default=None, ge=1)
    k: int | None = Field(default=None, ge=1)
    seed: int | None = None
    n_samples: int = Field(default=500, ge=1)


class EvalResponse(BaseModel):
    task: str
    provider: str
    seed: int
    n_points: int
    skipped: int
    slope: float | None
    intercept: float | None
    series_path: str
    summary_path: str
