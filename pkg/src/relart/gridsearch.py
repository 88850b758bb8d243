"""Hyperparameter grid search scored by MeSH descriptor overlap.

One model per combination is trained on a shared train split and scored on
the held-out remainder: for each test document the provider proposes k
neighbors, and each (query, neighbor) pair contributes the percentage of
the query's descriptor labels the neighbor also carries. The winning
PV-DBOW combination is selected first; the PV-DM winner is then picked
among combinations sharing its vector size.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

from .corpus import Document, normalize_document
from .embedding import EmbeddingModel, HyperParams, train
from .providers import EmbeddingProvider

__all__ = [
    "GridSpec",
    "GridResult",
    "GridSearchOutcome",
    "default_grid_spec",
    "load_grid_spec",
    "enumerate_grid",
    "mesh_overlap_accuracy",
    "run_grid_search",
    "select_winners",
    "write_grid_tsv",
]

# accuracy denominator is the QUERY document's descriptor count; every
# emitted artifact restates this so downstream numbers are unambiguous
DENOMINATOR = "query"

_GRID_FIELDS = ("dm", "vector_size", "sample", "alpha", "window", "hs")


@dataclass(frozen=True)
class GridSpec:
    """Candidate values for the six tuned parameters."""

    dm: tuple[int, ...]
    vector_size: tuple[int, ...]
    sample: tuple[float, ...]
    alpha: tuple[float, ...]
    window: tuple[int, ...]
    hs: tuple[int, ...]

    def __post_init__(self):
        for name in _GRID_FIELDS:
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} candidate list is empty")
            if len(set(values)) != len(values):
                raise ValueError(f"{name} candidate list has duplicates")
        for name in ("dm", "hs"):
            bad = set(getattr(self, name)) - {0, 1}
            if bad:
                raise ValueError(f"{name} values must be 0 or 1, got {bad}")

    @property
    def size(self) -> int:
        return math.prod(len(getattr(self, f)) for f in _GRID_FIELDS)


def default_grid_spec() -> GridSpec:
    """Ships a plausible full-size grid; the value lists themselves are a
    configuration default, only the product size is pinned."""
    return GridSpec(
        dm=(0, 1),
        vector_size=(128, 256, 512, 768),
        sample=(0.0, 1e-5, 1e-4, 1e-3, 1e-2),
        alpha=(0.01, 0.025, 0.05, 0.1),
        window=(3, 5, 7, 9, 11, 13),
        hs=(0, 1),
    )


def load_grid_spec(path) -> GridSpec:
    """Read a grid file: TOML, one key per tuned parameter, list values.
    Scalars are accepted as single-candidate lists."""
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    unknown = set(raw) - set(_GRID_FIELDS)
    if unknown:
        raise ValueError(f"unknown grid keys: {sorted(unknown)}")
    missing = set(_GRID_FIELDS) - set(raw)
    if missing:
        raise ValueError(f"missing grid keys: {sorted(missing)}")
    values = {}
    for name in _GRID_FIELDS:
        v = raw[name]
        if not isinstance(v, list):
            v = [v]
        values[name] = tuple(v)
    return GridSpec(**values)


def enumerate_grid(
    spec: GridSpec, base: HyperParams | None = None
) -> list[HyperParams]:
    """Cartesian product in declared field order (dm outermost, hs
    innermost); untuned parameters come from `base`."""
    if base is None:
        base = HyperParams()
    combos = []
    for dm, size, sample, alpha, window, hs in product(
        *(getattr(spec, f) for f in _GRID_FIELDS)
    ):
        combos.append(
            replace(
                base,
                dm=dm,
                vector_size=size,
                sample=sample,
                alpha=alpha,
                window=window,
                hs=hs,
            )
        )
    return combos


def mesh_overlap_accuracy(
    provider,
    test_docs: Sequence[Document],
    k: int = 10,
    *,
    docs_by_id: Mapping[str, Document],
    details: dict | None = None,
) -> float:
    """Mean over all (query, neighbor) pairs of the percentage of the
    query's descriptor labels found on the neighbor.

    Pooled mean: a query with more resolved neighbors contributes more
    pairs. Queries whose neighbor set comes back empty (or resolves to no
    known document) are skipped and counted in details. Every test doc
    must carry at least one descriptor.
    """
    if isinstance(provider, EmbeddingModel):
        provider = EmbeddingProvider(provider)
    if k < 1:
        raise ValueError("k must be >= 1")
    pair_pcts: list[float] = []
    skipped = 0
    for doc in test_docs:
        d_desc = doc.descriptor_labels()
        if not d_desc:
            raise ValueError(f"test doc {doc.pmid} has no MeSH descriptors")
        nl = provider.neighbors(doc, k)
        neighbors = [docs_by_id.get(nid) for nid, _ in nl.neighbors]
        neighbors = [c for c in neighbors if c is not None]
        if not neighbors:
            skipped += 1
            continue
        for c in neighbors:
            shared = d_desc & c.descriptor_labels()
            pair_pcts.append(100.0 * len(shared) / len(d_desc))
    if details is not None:
        details.update(
            n_pairs=len(pair_pcts),
            skipped_queries=skipped,
            n_queries=len(test_docs),
            denominator=DENOMINATOR,
        )
    if not pair_pcts:
        raise ValueError("no scoreable query: all neighbor sets empty")
    return sum(pair_pcts) / len(pair_pcts)


@dataclass
class GridResult:
    params: HyperParams
    accuracy: float | None
    wall_time: float
    seed: int
    skipped_queries: int = 0
    error: str | None = None

    def __post_init__(self):
        if self.accuracy is not None and not 0.0 <= self.accuracy <= 100.0:
            raise ValueError(f"accuracy {self.accuracy} outside [0, 100]")


@dataclass
class GridSearchOutcome:
    results: list[GridResult]
    best_dbow: GridResult | None
    best_dm: GridResult | None
    meta: dict = field(default_factory=dict)


def select_winners(
    results: Iterable[GridResult],
) -> tuple[GridResult | None, GridResult | None]:
    """Best PV-DBOW by accuracy, then best PV-DM restricted to the DBOW
    winner's vector size. Without any scored DBOW combination the DM pick
    is unconstrained. Ties keep the earliest combination in grid order."""
    ok = [r for r in results if r.error is None and r.accuracy is not None]
    dbow = [r for r in ok if r.params.dm == 0]
    best_dbow = max(dbow, key=lambda r: r.accuracy, default=None)
    dm = [r for r in ok if r.params.dm == 1]
    if best_dbow is not None:
        dm = [
            r for r in dm
            if r.params.vector_size == best_dbow.params.vector_size
        ]
    best_dm = max(dm, key=lambda r: r.accuracy, default=None)
    return best_dbow, best_dm


def _default_trainer(corpus, params: HyperParams):
    return train(corpus, params, workers=1)


def _default_provider_factory(model, params: HyperParams):
    return EmbeddingProvider(model)


def run_grid_search(
    store,
    sample_size: int,
    train_fraction: float,
    spec: GridSpec,
    workers: int = 1,
    seed: int = 1,
    *,
    k: int = 10,
    base_params: HyperParams | None = None,
    trainer: Callable | None = None,
    provider_factory: Callable | None = None,
) -> GridSearchOutcome:
    """Train and score every combination on one shared sample split.

    The split is drawn once from `seed`, so accuracy differences across
    combinations come from the parameters alone. A failing combination is
    recorded with its error and the grid continues. Worker threads split
    the combination list; each result lands at its combination's index, so
    output order never depends on scheduling.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    trainer = trainer or _default_trainer
    provider_factory = provider_factory or _default_provider_factory

    docs = store if isinstance(store, list) else list(store)
    if sample_size > len(docs):
        raise ValueError(
            f"sample_size {sample_size} exceeds corpus size {len(docs)}"
        )
    rng = random.Random(seed)
    sampled = rng.sample(docs, sample_size)
    n_train = int(round(sample_size * train_fraction))
    if not 0 < n_train < sample_size:
        raise ValueError("train_fraction leaves an empty split")
    train_docs = sampled[:n_train]
    held_out = sampled[n_train:]
    test_docs = [d for d in held_out if d.descriptor_labels()]
    if not test_docs:
        raise ValueError("no MeSH-annotated documents in the test split")

    train_corpus = [(str(d.pmid), normalize_document(d)) for d in train_docs]
    docs_by_id = {str(d.pmid): d for d in train_docs}
    # spec may be a GridSpec or an explicit combination list (resumed or
    # hand-picked grids)
    rows = spec if isinstance(spec, list) else enumerate_grid(spec, base_params)
    combos = [replace(p, seed=seed) for p in rows]

    def run_one(params: HyperParams) -> GridResult:
        t0 = time.perf_counter()
        try:
            model = trainer(train_corpus, params)
            provider = provider_factory(model, params)
            details: dict = {}
            acc = mesh_overlap_accuracy(
                provider, test_docs, k, docs_by_id=docs_by_id, details=details
            )
            return GridResult(
                params,
                acc,
                time.perf_counter() - t0,
                seed,
                skipped_queries=details["skipped_queries"],
            )
        except Exception as exc:
            return GridResult(
                params,
                None,
                time.perf_counter() - t0,
                seed,
                error=f"{type(exc).__name__}: {exc}",
            )

    if workers == 1:
        results = [run_one(params) for params in combos]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, combos))

    best_dbow, best_dm = select_winners(results)
    meta = {
        "denominator": DENOMINATOR,
        "k": k,
        "seed": seed,
        "sample_size": sample_size,
        "n_train": n_train,
        "n_test": len(test_docs),
        "test_docs_dropped_no_mesh": len(held_out) - len(test_docs),
        "n_combinations": len(combos),
        "n_failed": sum(1 for r in results if r.error is not None),
    }
    return GridSearchOutcome(results, best_dbow, best_dm, meta)


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def _combo_label(result: GridResult | None) -> str:
    if result is None:
        return "none"
    p = result.params
    return (
        f"dm={p.dm},vector_size={p.vector_size},sample={_fmt(p.sample)},"
        f"alpha={_fmt(p.alpha)},window={p.window},hs={p.hs},"
        f"accuracy={_fmt(result.accuracy)}"
    )


def write_grid_tsv(outcome: GridSearchOutcome, path) -> None:
    """One row per combination, preceded by a summary comment block."""
    lines = [
        f"# mesh_overlap_denominator={outcome.meta.get('denominator', DENOMINATOR)}",
        f"# selected_dbow={_combo_label(outcome.best_dbow)}",
        f"# selected_dm={_combo_label(outcome.best_dm)}",
        f"# n_combinations={len(outcome.results)}"
        f"\tn_failed={outcome.meta.get('n_failed', 0)}",
        "dm\tvector_size\tsample\talpha\twindow\ths"
        "\taccuracy\twall_time\tseed\tskipped_queries\terror",
    ]
    for r in outcome.results:
        p = r.params
        lines.append(
            f"{p.dm}\t{p.vector_size}\t{_fmt(p.sample)}\t{_fmt(p.alpha)}"
            f"\t{p.window}\t{p.hs}\t{_fmt(r.accuracy)}\t{_fmt(r.wall_time)}"
            f"\t{r.seed}\t{r.skipped_queries}\t{r.error or ''}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
