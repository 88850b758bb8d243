"""Compiled training and inference kernels.

The math here mirrors objective.py exactly: signed-logistic loss, mean
composition, per-input gradient divided by the input count. Kernels are
dtype-polymorphic; production models use float32 matrices, the equivalence
tests instantiate the same kernels at float64 and compare against the
reference step.

RNG is xorshift64*, inlined so a run is reproducible from a single uint64
state; rng.py holds the Python mirror used by tests to replay draws.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["train_epoch", "infer_doc"]

_S11 = np.uint64(11)
_S12 = np.uint64(12)
_S25 = np.uint64(25)
_S27 = np.uint64(27)
_MULT = np.uint64(0x2545F4914F6CDD1D)
_F53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(nogil=True, cache=True)
def _rng_next(state):
    state ^= state >> _S12
    state ^= state << _S25
    state ^= state >> _S27
    return state, state * _MULT


@njit(nogil=True, cache=True)
def _rng_unit(state):
    state, value = _rng_next(state)
    return state, np.float64(value >> _S11) * _F53


@njit(nogil=True, cache=True)
def _doc_pass(
    kept,
    n_kept,
    docvec,
    wordvecs,
    outw,
    codes,
    points,
    code_lens,
    noise_cum,
    dm,
    hs,
    negative,
    window,
    alpha,
    update_words,
    track_loss,
    rng_state,
    work_h,
    work_g,
):
    """One pass over a subsampled document: every position is a prediction
    step. Updates docvec always; wordvecs/outw only when update_words (the
    inference path freezes them). Returns (rng_state, loss_sum, steps)."""
    d = docvec.shape[0]
    loss = 0.0
    steps = 0
    for i in range(n_kept):
        target = kept[i]
        cs = 0
        ce = 0
        if dm == 1:
            cs = i - window
            if cs < 0:
                cs = 0
            ce = i + window + 1
            if ce > n_kept:
                ce = n_kept
            # doc vector plus (ce - cs - 1) context words
            cnt = ce - cs
            for k in range(d):
                work_h[k] = docvec[k]
            for j in range(cs, ce):
                if j == i:
                    continue
                wrow = kept[j]
                for k in range(d):
                    work_h[k] += wordvecs[wrow, k]
            inv = 1.0 / cnt
            for k in range(d):
                work_h[k] *= inv
        else:
            for k in range(d):
                work_h[k] = docvec[k]
            inv = 1.0
        for k in range(d):
            work_g[k] = 0.0

        n_terms = code_lens[target] if hs == 1 else negative + 1
        for m in range(n_terms):
            if hs == 1:
                row = points[target, m]
                sign = 1.0 - 2.0 * codes[target, m]
            elif m == 0:
                row = target
                sign = 1.0
            else:
                while True:
                    rng_state, u = _rng_unit(rng_state)
                    cand = np.searchsorted(noise_cum, u, side="right")
                    if cand >= noise_cum.shape[0]:
                        cand = noise_cum.shape[0] - 1
                    if cand != target:
                        break
                row = cand
                sign = -1.0
            x = 0.0
            for k in range(d):
                x += np.float64(outw[row, k]) * np.float64(work_h[k])
            sx = sign * x
            if track_loss:
                if sx < -35.0:
                    loss += -sx
                else:
                    loss += math.log1p(math.exp(-sx))
            # e = alpha * sigma(-sx) * sign = -alpha * dL/dx
            if sx <= 0.0:
                gm = 1.0 / (1.0 + math.exp(sx))
            else:
                ex = math.exp(-sx)
                gm = ex / (1.0 + ex)
            e = alpha * sign * gm
            for k in range(d):
                work_g[k] += e * outw[row, k]
            if update_words:
                for k in range(d):
                    outw[row, k] += e * work_h[k]

        # mean composition: each input row gets the hidden gradient / count
        for k in range(d):
            docvec[k] += work_g[k] * inv
        if dm == 1 and update_words:
            for j in range(cs, ce):
                if j == i:
                    continue
                wrow = kept[j]
                for k in range(d):
                    wordvecs[wrow, k] += work_g[k] * inv
        steps += 1
    return rng_state, loss, steps


@njit(nogil=True, cache=True)
def train_epoch(
    tokens_flat,
    bounds,
    docvecs,
    wordvecs,
    outw,
    codes,
    points,
    code_lens,
    noise_cum,
    keep_probs,
    dm,
    hs,
    negative,
    window,
    sample_on,
    alpha0,
    alpha_min,
    tokens_done,
    total_planned,
    track_loss,
    rng_state,
    work_h,
    work_g,
    work_kept,
):
    """One epoch over the flattened corpus. The learning rate is recomputed
    at each document from raw in-vocabulary token progress (pre-subsample),
    decaying linearly from alpha0 to the alpha_min floor over total_planned
    tokens. Returns (rng_state, tokens_done, loss_sum, steps)."""
    loss_sum = 0.0
    steps = 0
    n_docs = bounds.shape[0] - 1
    for di in range(n_docs):
        start = bounds[di]
        end = bounds[di + 1]
        n_tok = end - start
        if n_tok == 0:
            continue
        progress = tokens_done / total_planned
        alpha = alpha0 + (alpha_min - alpha0) * progress
        if alpha < alpha_min:
            alpha = alpha_min
        nk = 0
        if sample_on == 1:
            for t in range(start, end):
                w = tokens_flat[t]
                rng_state, u = _rng_unit(rng_state)
                if u < keep_probs[w]:
                    work_kept[nk] = w
                    nk += 1
        else:
            for t in range(start, end):
                work_kept[nk] = tokens_flat[t]
                nk += 1
        rng_state, dl, ds = _doc_pass(
            work_kept, nk, docvecs[di], wordvecs, outw,
            codes, points, code_lens, noise_cum,
            dm, hs, negative, window, alpha,
            True, track_loss, rng_state, work_h, work_g,
        )
        loss_sum += dl
        steps += ds
        tokens_done += n_tok
    return rng_state, tokens_done, loss_sum, steps


@njit(nogil=True, cache=True)
def infer_doc(
    tokens,
    docvec,
    wordvecs,
    outw,
    codes,
    points,
    code_lens,
    noise_cum,
    keep_probs,
    dm,
    hs,
    negative,
    window,
    sample_on,
    alpha0,
    alpha_min,
    epochs,
    rng_state,
    work_h,
    work_g,
    work_kept,
):
    """Train a single fresh document vector against frozen word and output
    matrices. Same decay schedule as training, scaled to this sequence."""
    n_tok = tokens.shape[0]
    total = epochs * n_tok
    done = 0
    for _ in range(epochs):
        progress = done / total
        alpha = alpha0 + (alpha_min - alpha0) * progress
        if alpha < alpha_min:
            alpha = alpha_min
        nk = 0
        if sample_on == 1:
            for t in range(n_tok):
                w = tokens[t]
                rng_state, u = _rng_unit(rng_state)
                if u < keep_probs[w]:
                    work_kept[nk] = w
                    nk += 1
        else:
            for t in range(n_tok):
                work_kept[nk] = tokens[t]
                nk += 1
        rng_state, _, _ = _doc_pass(
            work_kept, nk, docvec, wordvecs, outw,
            codes, points, code_lens, noise_cum,
            dm, hs, negative, window, alpha,
            False, False, rng_state, work_h, work_g,
        )
        done += n_tok
    return rng_state
