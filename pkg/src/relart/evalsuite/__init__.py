"""Automatic evaluation: co-occurrence and MeSH scoring, task runners,
trend statistics."""

from relart.evalsuite.cooccur import (
    CooccurrenceMatrix,
    build_cooccurrence,
    cooccurrence_score,
    pair_seed,
)
from relart.evalsuite.meshsim import mesh_similarity_score
from relart.evalsuite.stats import trend_slope, zscore_filter
from relart.evalsuite.tasks import (
    TASK_DEFAULTS,
    TaskParams,
    TaskPoint,
    TaskSeries,
    run_task,
    write_series_tsv,
    write_summary_tsv,
)

__all__ = [
    "CooccurrenceMatrix",
    "build_cooccurrence",
    "cooccurrence_score",
    "pair_seed",
    "mesh_similarity_score",
    "trend_slope",
    "zscore_filter",
    "TASK_DEFAULTS",
    "TaskParams",
    "TaskPoint",
    "TaskSeries",
    "run_task",
    "write_series_tsv",
    "write_summary_tsv",
]
