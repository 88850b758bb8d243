"""The four automatic evaluation tasks and their TSV outputs.

Each task pairs a query-side metric x with the provider's similarity score
y: length difference, word co-occurrence, stem co-occurrence, or MeSH
similarity (averaged over the top five neighbors). pmra scores are min-max
normalized over the whole run's score population before entering a series;
embedding providers already emit cosines.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from ..corpus import Document, normalize_document
from ..pmra import normalize_scores
from ..textproc import default_stopwords, effective_char_length
from .cooccur import CooccurrenceMatrix, cooccurrence_score, pair_seed
from .meshsim import mesh_similarity_score
from .stats import trend_slope, zscore_filter

__all__ = [
    "TASK_DEFAULTS",
    "TaskPoint",
    "TaskSeries",
    "TaskParams",
    "run_task",
    "write_series_tsv",
    "write_summary_tsv",
]

# task -> (default query count, default k)
TASK_DEFAULTS = {
    "length": (10_000, 1),
    "words": (5_000, 1),
    "stems": (10_000, 1),
    "mesh": (5_000, 5),
}


@dataclass(frozen=True)
class TaskPoint:
    x: float
    y: float
    query_id: str
    neighbor_id: str
    source: str


@dataclass
class TaskSeries:
    task: str
    provider: str
    seed: int
    points: list[TaskPoint]
    skipped: int = 0
    meta: dict = field(default_factory=dict)

    def replace_points(self, points) -> "TaskSeries":
        return replace(self, points=list(points))


@dataclass
class TaskParams:
    """Everything a task run needs beyond the provider itself."""

    docs_by_id: Mapping[str, Document]
    n_docs: int | None = None
    k: int | None = None
    seed: int = 0
    n_samples: int = 500
    matrix: CooccurrenceMatrix | None = None
    stopwords: frozenset[str] | None = None


def _select_queries(docs: Sequence[Document], n: int, seed: int):
    if len(docs) <= n:
        return list(docs)
    idx = sorted(random.Random(seed).sample(range(len(docs)), n))
    return [docs[i] for i in idx]


def run_task(task_kind, provider, test_docs, params: TaskParams) -> TaskSeries:
    if task_kind not in TASK_DEFAULTS:
        raise ValueError(f"unknown task {task_kind!r}")
    n_default, k_default = TASK_DEFAULTS[task_kind]
    n_docs = params.n_docs if params.n_docs is not None else n_default
    k = params.k if params.k is not None else k_default
    if task_kind in ("words", "stems"):
        if params.matrix is None:
            raise ValueError(f"{task_kind} task requires a co-occurrence matrix")
        if params.matrix.stemmed != (task_kind == "stems"):
            raise ValueError("matrix stemming does not match task")
    stopwords = (
        params.stopwords if params.stopwords is not None else default_stopwords()
    )

    queries = _select_queries(list(test_docs), n_docs, params.seed)
    skipped = 0
    collected: list[tuple[Document, list[tuple[str, float]]]] = []
    for doc in queries:
        try:
            nl = provider.neighbors(doc, k)
        except Exception:
            skipped += 1
            continue
        if not nl.neighbors:
            skipped += 1
            continue
        collected.append((doc, list(nl.neighbors)))

    if provider.name == "pmra" and collected:
        pool = [s for _, neighbors in collected for _, s in neighbors]
        normed = iter(normalize_scores(pool))
        collected = [
            (doc, [(nid, next(normed)) for nid, _ in neighbors])
            for doc, neighbors in collected
        ]

    points: list[TaskPoint] = []
    for doc, neighbors in collected:
        if task_kind == "mesh":
            point, bad = _mesh_point(doc, neighbors, params, provider.name)
            skipped += bad
            if point is not None:
                points.append(point)
            continue
        d_tokens = normalize_document(doc)
        for nid, score in neighbors:
            ndoc = params.docs_by_id.get(nid)
            if ndoc is None:
                skipped += 1
                continue
            c_tokens = normalize_document(ndoc)
            try:
                if task_kind == "length":
                    x = float(
                        abs(
                            effective_char_length(d_tokens, stopwords)
                            - effective_char_length(c_tokens, stopwords)
                        )
                    )
                else:
                    x = cooccurrence_score(
                        d_tokens,
                        c_tokens,
                        params.matrix,
                        n_samples=params.n_samples,
                        rng_seed=pair_seed(params.seed, str(doc.pmid), nid),
                        stopwords=stopwords,
                    )
            except ValueError:
                skipped += 1
                continue
            if not (math.isfinite(x) and math.isfinite(score)):
                skipped += 1
                continue
            points.append(
                TaskPoint(x, float(score), str(doc.pmid), nid, provider.name)
            )

    meta = {
        "k": k,
        "n_queries": len(queries),
        "n_samples": params.n_samples,
        "scores_normalized": provider.name == "pmra",
        "mesh_major_topic_flag": "query-side",
    }
    return TaskSeries(task_kind, provider.name, params.seed, points, skipped, meta)


def _mesh_point(doc, neighbors, params, source):
    """One point per query: x is the mean MeSH similarity over resolved
    neighbors, y the mean provider score over the same set."""
    if not doc.mesh:
        return None, 1
    resolved = [
        (nid, score, params.docs_by_id.get(nid)) for nid, score in neighbors
    ]
    resolved = [(n, s, d) for n, s, d in resolved if d is not None]
    if not resolved:
        return None, 1
    xs = [mesh_similarity_score(doc, d) for _, _, d in resolved]
    ys = [s for _, s, _ in resolved]
    x = sum(xs) / len(xs)
    y = sum(ys) / len(ys)
    if not (math.isfinite(x) and math.isfinite(y)):
        return None, 1
    nid = "|".join(n for n, _, _ in resolved)
    return TaskPoint(float(x), float(y), str(doc.pmid), nid, source), 0


def _fmt(v: float) -> str:
    return format(v, ".10g")


def write_series_tsv(series: TaskSeries, path, threshold: float = 3.0) -> None:
    """One point per row, headed by a comment line naming the run."""
    lines = [
        f"# task={series.task}\tprovider={series.provider}"
        f"\tseed={series.seed}\tthreshold={_fmt(threshold)}",
        "x\ty\tquery_id\tneighbor_id\tsource",
    ]
    for p in series.points:
        lines.append(
            f"{_fmt(p.x)}\t{_fmt(p.y)}\t{p.query_id}\t{p.neighbor_id}\t{p.source}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _slope_fields(series) -> tuple[str, str]:
    try:
        slope, intercept = trend_slope(series)
        return _fmt(slope), _fmt(intercept)
    except ValueError:
        return "nan", "nan"


def write_summary_tsv(
    series_list: Sequence[TaskSeries], path, threshold: float = 3.0
) -> None:
    """Slope and intercept per series, before and after the z-score filter."""
    lines = [
        "task\tprovider\tseed\tn_points\tslope\tintercept"
        "\tn_filtered\tslope_filtered\tintercept_filtered\tskipped"
    ]
    for series in series_list:
        slope, intercept = _slope_fields(series)
        try:
            filtered = zscore_filter(series, threshold)
        except ValueError:
            filtered = series
        fslope, fintercept = _slope_fields(filtered)
        lines.append(
            f"{series.task}\t{series.provider}\t{series.seed}"
            f"\t{len(series.points)}\t{slope}\t{intercept}"
            f"\t{len(filtered.points)}\t{fslope}\t{fintercept}"
            f"\t{series.skipped}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
