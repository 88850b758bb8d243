"""Vocabulary construction: frequency filtering, Huffman coding, noise table."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Vocabulary",
    "build_vocabulary",
    "vocabulary_from_counts",
    "subsample_keep_prob",
]

NOISE_POWER = 0.75


def subsample_keep_prob(freq_fraction: float, sample: float) -> float:
    """Probability of keeping one occurrence of a word during training.

    freq_fraction is the word's share of the corpus token count. sample = 0
    disables subsampling entirely.
    """
    if not 0 < freq_fraction <= 1:
        raise ValueError(f"freq_fraction must be in (0, 1], got {freq_fraction}")
    if sample < 0:
        raise ValueError(f"sample must be non-negative, got {sample}")
    if sample == 0:
        return 1.0
    p = (np.sqrt(freq_fraction / sample) + 1.0) * (sample / freq_fraction)
    return float(min(p, 1.0))


@dataclass
class Vocabulary:
    """Retained words sorted by descending frequency, plus the derived
    structures each output layer needs."""

    words: list[str]
    counts: np.ndarray                       # int64, aligned with words
    total_tokens: int                        # sum of retained counts
    index: dict[str, int] = field(repr=False, default_factory=dict)
    # hierarchical softmax: Huffman code bits and inner-node rows per word,
    # padded to max_code_length
    codes: np.ndarray | None = field(repr=False, default=None)    # uint8 (V, L)
    points: np.ndarray | None = field(repr=False, default=None)   # int32 (V, L)
    code_lengths: np.ndarray | None = field(repr=False, default=None)  # int32 (V,)
    # negative sampling: cumulative noise distribution, monotone, ends at 1.0
    noise_cum: np.ndarray | None = field(repr=False, default=None)     # float64 (V,)

    def __post_init__(self):
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def keep_probs(self, sample: float) -> np.ndarray:
        """Per-word subsampling keep probability under threshold ``sample``."""
        return np.array(
            [
                subsample_keep_prob(c / self.total_tokens, sample)
                for c in self.counts
            ],
            dtype=np.float64,
        )

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Map tokens to indices, silently dropping out-of-vocabulary ones."""
        idx = self.index
        return np.array([idx[t] for t in tokens if t in idx], dtype=np.int32)


def build_vocabulary(
    token_corpus: Iterable[Sequence[str]],
    min_count: int,
    hs: int,
    negative: int,
) -> Vocabulary:
    """Count words across the corpus, drop those below min_count, and build
    the output-layer structures the chosen objective needs."""
    counter: Counter[str] = Counter()
    for tokens in token_corpus:
        counter.update(tokens)
    retained = [(w, c) for w, c in counter.items() if c >= min_count]
    if not retained:
        raise ValueError(
            f"no words with count >= {min_count}; vocabulary would be empty"
        )
    retained.sort(key=lambda wc: (-wc[1], wc[0]))
    words = [w for w, _ in retained]
    counts = np.array([c for _, c in retained], dtype=np.int64)
    return vocabulary_from_counts(words, counts, hs, negative)


def vocabulary_from_counts(
    words: list[str],
    counts: np.ndarray,
    hs: int,
    negative: int,
) -> Vocabulary:
    """Assemble a Vocabulary from an already-ordered word/count listing.

    The derived structures (Huffman tree, noise table) are deterministic
    functions of the counts, so model files store only words and counts and
    rebuild the rest here on load.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if len(words) != len(counts) or len(words) == 0:
        raise ValueError("words and counts must be non-empty and aligned")
    vocab = Vocabulary(list(words), counts, int(counts.sum()))
    if hs:
        vocab.codes, vocab.points, vocab.code_lengths = _build_huffman(counts)
    if not hs and negative > 0:
        vocab.noise_cum = _build_noise_table(counts)
    return vocab


def _build_huffman(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Binary Huffman tree over word frequencies.

    Leaves are word indices 0..V-1, inner nodes V..2V-2 created in merge
    order; the output matrix row for inner node n is n - V. The first-popped
    (lighter) child of each merge gets code bit 0. Ties break on node id, so
    the tree is deterministic for a given frequency ordering.
    """
    n = len(counts)
    parent = np.zeros(2 * n - 1, dtype=np.int64)
    branch = np.zeros(2 * n - 1, dtype=np.uint8)
    heap: list[tuple[int, int]] = [(int(c), i) for i, c in enumerate(counts)]
    heapq.heapify(heap)
    for inner in range(n, 2 * n - 1):
        c1, n1 = heapq.heappop(heap)
        c2, n2 = heapq.heappop(heap)
        parent[n1], branch[n1] = inner, 0
        parent[n2], branch[n2] = inner, 1
        heapq.heappush(heap, (c1 + c2, inner))

    root = 2 * n - 2
    codes_list: list[list[int]] = []
    points_list: list[list[int]] = []
    for leaf in range(n):
        bits: list[int] = []
        path: list[int] = []
        node = leaf
        while node != root:
            bits.append(int(branch[node]))
            path.append(int(parent[node]) - n)
            node = int(parent[node])
        bits.reverse()
        path.reverse()
        codes_list.append(bits)
        points_list.append(path)

    if n == 1:
        # single-word degenerate tree: zero-length code
        return (
            np.zeros((1, 1), dtype=np.uint8),
            np.zeros((1, 1), dtype=np.int32),
            np.zeros(1, dtype=np.int32),
        )

    max_len = max(len(b) for b in codes_list)
    codes = np.zeros((n, max_len), dtype=np.uint8)
    points = np.zeros((n, max_len), dtype=np.int32)
    lengths = np.zeros(n, dtype=np.int32)
    for i, (bits, path) in enumerate(zip(codes_list, points_list)):
        lengths[i] = len(bits)
        codes[i, : len(bits)] = bits
        points[i, : len(path)] = path
    return codes, points, lengths


def _build_noise_table(counts: np.ndarray) -> np.ndarray:
    """Cumulative distribution of count^0.75, for negative-sample draws."""
    weights = np.asarray(counts, dtype=np.float64) ** NOISE_POWER
    cum = np.cumsum(weights)
    cum /= cum[-1]
    cum[-1] = 1.0
    return cum
