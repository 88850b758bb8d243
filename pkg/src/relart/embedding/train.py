"""Training loop and unseen-document inference."""

from __future__ import annotations

import threading
from typing import Iterable, Sequence

import numpy as np

from . import kernels, rng
from .model import EmbeddingModel, init_matrices
from .params import HyperParams
from .vocab import build_vocabulary

__all__ = ["train", "infer_vector"]


def _materialize(corpus) -> tuple[list[str], list[list[str]]]:
    """Accept either bare token lists or (doc_id, tokens) pairs."""
    ids: list[str] = []
    docs: list[list[str]] = []
    for i, item in enumerate(corpus):
        if (
            isinstance(item, tuple)
            and len(item) == 2
            and isinstance(item[0], str)
            and not isinstance(item[1], str)
        ):
            ids.append(item[0])
            docs.append(list(item[1]))
        else:
            ids.append(str(i))
            docs.append(list(item))
    return ids, docs


def _flatten(vocab, docs) -> tuple[np.ndarray, np.ndarray]:
    encoded = [vocab.encode(toks) for toks in docs]
    bounds = np.zeros(len(docs) + 1, dtype=np.int64)
    for i, e in enumerate(encoded):
        bounds[i + 1] = bounds[i] + len(e)
    flat = (
        np.concatenate(encoded)
        if bounds[-1] > 0
        else np.zeros(0, dtype=np.int32)
    ).astype(np.int32)
    return flat, bounds


def _kernel_tables(vocab, params):
    """Arrays the kernels index unconditionally, with inert stand-ins for
    the output layer not in use."""
    d = params.vector_size
    if params.hs:
        codes, points, lens = vocab.codes, vocab.points, vocab.code_lengths
        noise = np.ones(1, dtype=np.float64)
    else:
        codes = np.zeros((1, 1), dtype=np.uint8)
        points = np.zeros((1, 1), dtype=np.int32)
        lens = np.zeros(1, dtype=np.int32)
        noise = vocab.noise_cum
    keep = vocab.keep_probs(params.sample)
    return codes, points, lens, noise, keep, d


def train(
    corpus: Iterable[Sequence[str]] | Iterable[tuple[str, Sequence[str]]],
    params: HyperParams,
    *,
    workers: int = 1,
    compute_loss: bool = False,
) -> EmbeddingModel:
    """Train paragraph vectors over an in-memory token corpus.

    workers=1 is fully deterministic for a given seed. workers>1 runs
    lock-free parallel SGD over document shards; races are tolerated and
    results vary run to run.
    """
    params.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    ids, docs = _materialize(corpus)
    if not docs:
        raise ValueError("corpus is empty")
    vocab = build_vocabulary(docs, params.min_count, params.hs, params.negative)
    if not params.hs and len(vocab) < 2:
        raise ValueError("negative sampling needs at least 2 vocabulary words")

    flat, bounds = _flatten(vocab, docs)
    total_tokens = int(bounds[-1])
    n_out = max(len(vocab) - 1, 0) if params.hs else len(vocab)
    docvecs, wordvecs, outw = init_matrices(
        params, len(docs), len(vocab), n_out, params.seed
    )
    codes, points, lens, noise, keep, d = _kernel_tables(vocab, params)
    max_doc = int(np.max(np.diff(bounds))) if len(docs) else 0
    total_planned = params.epochs * total_tokens
    sample_on = 1 if params.sample > 0 else 0
    epoch_losses: list[float] = []

    if workers == 1:
        state = np.uint64(rng.seed_state(params.seed))
        work_h = np.zeros(d, dtype=np.float32)
        work_g = np.zeros(d, dtype=np.float32)
        work_kept = np.zeros(max(max_doc, 1), dtype=np.int32)
        tokens_done = np.int64(0)
        for _ in range(params.epochs):
            state, tokens_done, loss_sum, steps = kernels.train_epoch(
                flat, bounds, docvecs, wordvecs, outw,
                codes, points, lens, noise, keep,
                params.dm, params.hs, params.negative, params.window,
                sample_on, params.alpha, params.alpha_min,
                np.int64(tokens_done), total_planned,
                compute_loss, np.uint64(state), work_h, work_g, work_kept,
            )
            if compute_loss:
                epoch_losses.append(loss_sum / steps if steps else 0.0)
    else:
        shard_edges = np.linspace(0, len(docs), workers + 1, dtype=np.int64)
        for epoch in range(params.epochs):
            epoch_start = np.int64(epoch) * total_tokens
            results = [None] * workers
            threads = []
            for w in range(workers):
                s, e = int(shard_edges[w]), int(shard_edges[w + 1])
                if s == e:
                    continue
                threads.append(
                    threading.Thread(
                        target=_run_shard,
                        args=(results, w, epoch, flat, bounds, s, e,
                              docvecs, wordvecs, outw, codes, points, lens,
                              noise, keep, params, sample_on, epoch_start,
                              total_planned, compute_loss, max_doc, d),
                    )
                )
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            if compute_loss:
                loss_sum = sum(r[0] for r in results if r)
                steps = sum(r[1] for r in results if r)
                epoch_losses.append(loss_sum / steps if steps else 0.0)

    meta = {
        "composition": "mean",
        "alpha_floor_ratio": params.alpha_min / params.alpha,
        "trained_tokens": total_planned,
        "workers": workers,
    }
    if compute_loss:
        meta["epoch_losses"] = epoch_losses
    return EmbeddingModel(params, vocab, ids, docvecs, wordvecs, outw, meta)


def _run_shard(results, w, epoch, flat, bounds, s, e, docvecs, wordvecs,
               outw, codes, points, lens, noise, keep, params, sample_on,
               epoch_start, total_planned, compute_loss, max_doc, d):
    shard_bounds = (bounds[s : e + 1] - bounds[s]).astype(np.int64)
    shard_flat = flat[bounds[s] : bounds[e]]
    state = np.uint64(rng.seed_state(params.seed + 7919 * (w + 1) + epoch))
    work_h = np.zeros(d, dtype=np.float32)
    work_g = np.zeros(d, dtype=np.float32)
    work_kept = np.zeros(max(max_doc, 1), dtype=np.int32)
    _, _, loss_sum, steps = kernels.train_epoch(
        shard_flat, shard_bounds, docvecs[s:e], wordvecs, outw,
        codes, points, lens, noise, keep,
        params.dm, params.hs, params.negative, params.window,
        sample_on, params.alpha, params.alpha_min,
        epoch_start + np.int64(bounds[s]), total_planned,
        compute_loss, state, work_h, work_g, work_kept,
    )
    results[w] = (loss_sum, steps)


def infer_vector(
    model: EmbeddingModel,
    tokens: Sequence[str],
    infer_epochs: int | None = None,
    seed: int | None = None,
) -> np.ndarray:
    """Embed an unseen token sequence against a trained model.

    A fresh randomly initialised vector is trained by the model's own
    objective with word and output matrices frozen. Deterministic for a
    given model and seed.
    """
    params = model.params
    epochs = params.epochs if infer_epochs is None else infer_epochs
    if epochs < 1:
        raise ValueError("infer_epochs must be >= 1")
    if seed is None:
        seed = params.seed
    enc = model.vocab.encode(tokens)
    if len(enc) == 0:
        raise ValueError("no in-vocabulary tokens to infer from")

    d = params.vector_size
    bound = 0.5 / d
    vec = (
        np.random.default_rng(seed)
        .uniform(-bound, bound, d)
        .astype(np.float32)
    )
    codes, points, lens, noise, keep, _ = _kernel_tables(model.vocab, params)
    work_h = np.zeros(d, dtype=np.float32)
    work_g = np.zeros(d, dtype=np.float32)
    work_kept = np.zeros(len(enc), dtype=np.int32)
    state = np.uint64(rng.seed_state(seed))
    kernels.infer_doc(
        enc, vec, model.wordvecs, model.outw,
        codes, points, lens, noise, keep,
        params.dm, params.hs, params.negative, params.window,
        1 if params.sample > 0 else 0,
        params.alpha, params.alpha_min, epochs,
        state, work_h, work_g, work_kept,
    )
    return vec
