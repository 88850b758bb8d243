"""HTTP surface over the store, models, pmra client, evaluation tasks,
and blind rating sessions. All state lives under one data directory."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from ..agreement import compile_agreement_report
from ..corpus import Document, DocumentStore, load_split, normalize_document
from ..embedding import infer_vector, load_model, top_k_neighbors
from ..evalsuite import (
    TASK_DEFAULTS,
    TaskParams,
    build_cooccurrence,
    run_task,
    trend_slope,
    write_series_tsv,
    write_summary_tsv,
)
from ..pmra import PmraClient, PmraTransportError, normalize_scores
from ..providers import EmbeddingProvider, PmraProvider
from ..sessions import (
    RankCollision,
    SessionNotFound,
    SessionStore,
    UnknownCandidate,
    create_session,
)
from ..textproc import tokenize
from .config import ServiceConfig, load_config
from .schemas import (
    EvalRequest,
    EvalResponse,
    NeighborEntry,
    QueryCandidates,
    RatingAck,
    RatingSubmission,
    RelatedResponse,
    SessionCreateRequest,
    SessionOverview,
)

__all__ = ["create_app", "ServiceState"]

EMBEDDING_PROVIDERS = ("pv-dbow", "pv-dm")
KNOWN_PROVIDERS = EMBEDDING_PROVIDERS + ("pmra",)


class ServiceState:
    """Lazy holders for everything the routes share."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.sessions = SessionStore(config.sessions_dir)
        self._store = None
        self._docs_by_id = None
        self._models: dict = {}
        self._matrices: dict = {}
        self._pmra = None

    def store(self) -> DocumentStore:
        if self._store is None:
            try:
                self._store = DocumentStore(self.config.store_dir)
            except FileNotFoundError:
                raise HTTPException(
                    503, f"no document store at {self.config.store_dir}"
                )
        return self._store

    def docs_by_id(self) -> dict[str, Document]:
        if self._docs_by_id is None:
            self._docs_by_id = {str(d.pmid): d for d in self.store()}
        return self._docs_by_id

    def test_docs(self) -> list[Document]:
        docs = list(self.docs_by_id().values())
        if self.config.split_path.exists():
            split = load_split(self.config.split_path)
            docs = [d for d in docs if d.pmid in split.test_ids]
        return docs

    def model(self, name: str):
        if name not in self._models:
            path = {
                "pv-dbow": self.config.dbow_model,
                "pv-dm": self.config.dm_model,
            }[name]
            if path is None:
                raise HTTPException(503, f"no {name} model configured")
            model = load_model(path)
            if model.params.architecture != name:
                raise HTTPException(
                    503,
                    f"model at {path} is {model.params.architecture},"
                    f" expected {name}",
                )
            self._models[name] = model
        return self._models[name]

    def pmra_client(self) -> PmraClient:
        if self._pmra is None:
            self._pmra = PmraClient(
                rate=self.config.elink_rate,
                api_key=self.config.elink_api_key,
                cache_dir=self.config.pmra_cache_dir,
                fixture_dir=self.config.pmra_fixtures,
            )
        return self._pmra

    def provider(self, name: str):
        if name not in KNOWN_PROVIDERS:
            raise HTTPException(422, f"unknown provider {name!r}")
        if name == "pmra":
            return PmraProvider(self.pmra_client())
        return EmbeddingProvider(
            self.model(name),
            infer_epochs=self.config.infer_epochs,
            seed=self.config.seed,
        )

    def matrix(self, stemmed: bool):
        if stemmed not in self._matrices:
            corpus = (normalize_document(d) for d in self.docs_by_id().values())
            self._matrices[stemmed] = build_cooccurrence(corpus, stemmed=stemmed)
        return self._matrices[stemmed]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    state = ServiceState(config or load_config())
    app = FastAPI(title="relart", version="1.0")
    app.state.relart = state

    @app.post("/sessions", response_model=SessionOverview, status_code=201)
    def post_session(req: SessionCreateRequest):
        providers = [state.provider(name) for name in req.providers]
        try:
            session = create_session(
                state.test_docs(),
                providers,
                docs_by_id=state.docs_by_id(),
                n_queries=req.n_queries,
                k=req.k,
                seed=req.seed,
                session_id=req.session_id,
            )
        except PmraTransportError as exc:
            raise HTTPException(502, f"provider failure: {exc}")
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        try:
            state.sessions.save(session)
        except ValueError as exc:
            raise HTTPException(409, str(exc))
        return session.blind_payload()

    @app.get("/sessions/{session_id}", response_model=SessionOverview)
    def get_session(session_id: str):
        try:
            return state.sessions.get(session_id).blind_payload()
        except SessionNotFound:
            raise HTTPException(404, f"no session {session_id}")

    @app.get(
        "/sessions/{session_id}/queries/{query_id}/candidates",
        response_model=QueryCandidates,
    )
    def get_candidates(session_id: str, query_id: str):
        try:
            session = state.sessions.get(session_id)
            return session.query(query_id).blind_payload()
        except SessionNotFound as exc:
            raise HTTPException(404, str(exc))

    @app.post(
        "/sessions/{session_id}/ratings",
        response_model=RatingAck,
        status_code=201,
    )
    def post_rating(session_id: str, req: RatingSubmission):
        try:
            record = state.sessions.submit_rating(
                session_id,
                req.evaluator_id,
                req.query_id,
                req.candidate_id,
                req.relevance,
                req.rank,
            )
        except (SessionNotFound, UnknownCandidate) as exc:
            raise HTTPException(404, str(exc))
        except RankCollision as exc:
            raise HTTPException(409, str(exc))
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        return {
            "status": "stored",
            "evaluator_id": record.evaluator_id,
            "query_id": record.query_id,
            "candidate_id": record.candidate_id,
            "relevance": record.relevance,
            "rank": record.rank,
        }

    @app.get("/sessions/{session_id}/agreement")
    def get_agreement(session_id: str):
        try:
            state.sessions.get(session_id)
        except SessionNotFound:
            raise HTTPException(404, f"no session {session_id}")
        records = state.sessions.ratings(session_id)
        if not records:
            raise HTTPException(422, "no ratings submitted yet")
        try:
            return compile_agreement_report(records, rng_seed=state.config.seed)
        except ValueError as exc:
            raise HTTPException(422, str(exc))

    @app.get("/related", response_model=RelatedResponse)
    def get_related(
        id: int | None = None,
        text: str | None = None,
        provider: str = "pv-dbow",
        k: int = Query(default=10, ge=1),
    ):
        if (id is None) == (text is None):
            raise HTTPException(422, "pass exactly one of id= or text=")
        if provider not in KNOWN_PROVIDERS:
            raise HTTPException(422, f"unknown provider {provider!r}")
        normalized = False
        if text is not None:
            if provider == "pmra":
                raise HTTPException(422, "pmra requires a PMID, not free text")
            model = state.model(provider)
            try:
                vector = infer_vector(model, tokenize(text))
            except ValueError as exc:
                raise HTTPException(422, str(exc))
            nl = top_k_neighbors(model, vector, k, query_id="text")
            nl.source = provider
        else:
            doc = state.docs_by_id().get(str(id))
            if doc is None:
                raise HTTPException(404, f"no document {id}")
            p = state.provider(provider)
            try:
                nl = p.neighbors(doc, k)
            except PmraTransportError as exc:
                raise HTTPException(502, str(exc))
            if provider == "pmra" and len(nl.neighbors) >= 2:
                scores = [s for _, s in nl.neighbors]
                if min(scores) < max(scores):
                    normed = normalize_scores(scores)
                    nl.neighbors = [
                        (nid, s)
                        for (nid, _), s in zip(nl.neighbors, normed)
                    ]
                    normalized = True
        docs = state.docs_by_id()
        entries = [
            NeighborEntry(
                id=nid,
                score=score,
                title=docs[nid].title if nid in docs else None,
            )
            for nid, score in nl.neighbors
        ]
        return RelatedResponse(
            query_id=nl.query_id,
            provider=provider,
            k=k,
            truncated=nl.truncated,
            normalized=normalized,
            neighbors=entries,
        )

    @app.post("/eval/{task}", response_model=EvalResponse)
    def post_eval(task: str, req: EvalRequest):
        if task not in TASK_DEFAULTS:
            raise HTTPException(404, f"unknown task {task!r}")
        provider = state.provider(req.provider)
        seed = state.config.seed if req.seed is None else req.seed
        matrix = None
        if task in ("words", "stems"):
            matrix = state.matrix(stemmed=(task == "stems"))
        params = TaskParams(
            docs_by_id=state.docs_by_id(),
            n_docs=req.n_docs,
            k=req.k,
            seed=seed,
            n_samples=req.n_samples,
            matrix=matrix,
        )
        series = run_task(task, provider, state.test_docs(), params)
        state.config.eval_dir.mkdir(parents=True, exist_ok=True)
        stem = f"{task}-{provider.name}-seed{seed}"
        series_path = state.config.eval_dir / f"{stem}.tsv"
        summary_path = state.config.eval_dir / f"{stem}-summary.tsv"
        write_series_tsv(series, series_path)
        write_summary_tsv([series], summary_path)
        try:
            slope, intercept = trend_slope(series)
        except ValueError:
            slope = intercept = None
        return EvalResponse(
            task=task,
            provider=provider.name,
            seed=seed,
            n_points=len(series.points),
            skipped=series.skipped,
            slope=slope,
            intercept=intercept,
            series_path=str(series_path),
            summary_path=str(summary_path),
        )

    return app
