"""Reference objective in float64: loss and analytic gradients for one
prediction step.

This is the slow, readable route. The training kernels implement the same
math; tests tie the two together and check these gradients against central
finite differences. Both output layers reduce to a sum of signed logistic
terms: L = -sum_j log sigma(s_j * x_j) with x_j the score of output row j
against the composed hidden vector, s_j = +1 for the true target (or a
Huffman bit of 0) and -1 for a noise word (or bit of 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StepGradients",
    "compose_hidden",
    "hs_signs",
    "ns_signs",
    "step_loss",
    "step_gradients",
]


def _log_sigmoid(z: np.ndarray) -> np.ndarray:
    # log sigma(z) = -log(1 + exp(-z)), stable for large |z|
    return -np.logaddexp(0.0, -z)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def compose_hidden(input_vectors: np.ndarray) -> np.ndarray:
    """Mean of the input rows: the document vector alone, or the document
    vector stacked with context word vectors."""
    inputs = np.atleast_2d(np.asarray(input_vectors, dtype=np.float64))
    return inputs.mean(axis=0)


def hs_signs(code_bits: np.ndarray) -> np.ndarray:
    """Hierarchical-softmax signs: bit 0 → +1, bit 1 → -1."""
    return 1.0 - 2.0 * np.asarray(code_bits, dtype=np.float64)


def ns_signs(negative: int) -> np.ndarray:
    """Negative-sampling signs: the true target first, then noise words."""
    if negative < 0:
        raise ValueError("negative must be non-negative")
    return np.concatenate([[1.0], -np.ones(negative)])


def step_loss(
    input_vectors: np.ndarray,
    output_rows: np.ndarray,
    signs: np.ndarray,
) -> float:
    """Loss of one prediction step; the quantity finite differences perturb."""
    h = compose_hidden(input_vectors)
    rows = np.atleast_2d(np.asarray(output_rows, dtype=np.float64))
    x = rows @ h
    return float(-np.sum(_log_sigmoid(np.asarray(signs, dtype=np.float64) * x)))


@dataclass
class StepGradients:
    loss: float
    d_inputs: np.ndarray   # (n_inputs, d): gradient wrt each input row
    d_outputs: np.ndarray  # (n_outputs, d): gradient wrt each output row


def step_gradients(
    input_vectors: np.ndarray,
    output_rows: np.ndarray,
    signs: np.ndarray,
) -> StepGradients:
    """Analytic gradients of step_loss wrt every parameter it touches.

    With h the mean of n input rows, dL/dx_j = -s_j sigma(-s_j x_j); each
    input row receives dL/dh divided by n (the composition is a true mean,
    so the gradient splits evenly).
    """
    inputs = np.atleast_2d(np.asarray(input_vectors, dtype=np.float64))
    rows = np.atleast_2d(np.asarray(output_rows, dtype=np.float64))
    s = np.asarray(signs, dtype=np.float64)
    if rows.shape[0] != s.shape[0]:
        raise ValueError("one sign per output row required")

    h = inputs.mean(axis=0)
    x = rows @ h
    sx = s * x
    loss = float(-np.sum(_log_sigmoid(sx)))
    g = -s * _sigmoid(-sx)                  # dL/dx_j
    d_h = rows.T @ g
    n = inputs.shape[0]
    d_inputs = np.tile(d_h / n, (n, 1))
    d_outputs = np.outer(g, h)
    return StepGradients(loss, d_inputs, d_outputs)
