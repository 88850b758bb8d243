"""Document-level co-occurrence matrix and pair-sampled scores."""

from __future__ import annotations

import random
import zlib
from itertools import combinations
from typing import Iterable, Sequence

from ..textproc import default_stopwords
from ..textproc.porter import porter_stem

__all__ = ["CooccurrenceMatrix", "build_cooccurrence", "cooccurrence_score"]


class CooccurrenceMatrix:
    """Symmetric sparse counts of unordered distinct token-type pairs.
    A pair's count is the number of documents where both types appear;
    repeats within a document do not add. Diagonal is never stored."""

    def __init__(self, stemmed: bool = False):
        self.stemmed = stemmed
        self.vocabulary: set[str] = set()
        self._counts: dict[tuple[str, str], int] = {}

    @staticmethod
    def _key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    def add_document(self, tokens: Iterable[str]) -> None:
        types = set(tokens)
        if self.stemmed:
            types = {porter_stem(t) for t in types}
        self.vocabulary.update(types)
        for pair in combinations(sorted(types), 2):
            self._counts[pair] = self._counts.get(pair, 0) + 1

    def lookup(self, a: str, b: str) -> int:
        if a == b:
            return 0
        return self._counts.get(self._key(a, b), 0)

    def __len__(self) -> int:
        return len(self._counts)

    def items(self):
        return self._counts.items()


def build_cooccurrence(
    corpus: Iterable[Sequence[str]], stemmed: bool = False
) -> CooccurrenceMatrix:
    matrix = CooccurrenceMatrix(stemmed=stemmed)
    for tokens in corpus:
        matrix.add_document(tokens)
    return matrix


def pair_seed(base_seed: int, query_id: str, neighbor_id: str) -> int:
    """Stable per-pair sampling seed (process-independent)."""
    return zlib.crc32(f"{base_seed}:{query_id}:{neighbor_id}".encode())


def cooccurrence_score(
    d_tokens: Sequence[str],
    c_tokens: Sequence[str],
    matrix: CooccurrenceMatrix,
    n_samples: int = 500,
    rng_seed: int = 0,
    stopwords: frozenset[str] | None = None,
) -> float:
    """Mean matrix count over pairs sampled from D-types x C-types.

    Stopwords are removed first; the stemmed variant then maps tokens into
    the matrix's stem space. Sampling is uniform without replacement; when
    fewer distinct pairs exist than n_samples every pair is used exactly
    once. A pair the matrix never saw counts 0.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if stopwords is None:
        stopwords = default_stopwords()
    d_types = {t for t in d_tokens if t not in stopwords}
    c_types = {t for t in c_tokens if t not in stopwords}
    if matrix.stemmed:
        d_types = {porter_stem(t) for t in d_types}
        c_types = {porter_stem(t) for t in c_types}
    if not d_types or not c_types:
        raise ValueError("no tokens left after stopword removal")
    pairs = [(a, b) for a in sorted(d_types) for b in sorted(c_types)]
    if len(pairs) > n_samples:
        pairs = random.Random(rng_seed).sample(pairs, n_samples)
    return sum(matrix.lookup(a, b) for a, b in pairs) / len(pairs)
