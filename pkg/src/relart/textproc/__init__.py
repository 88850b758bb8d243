"""Shared text processing: tokenization, stopwords, stemming, length measurement.

All functions here are pure and safe for unrestricted parallel use.
"""

from __future__ import annotations

import hashlib
import re
from importlib import resources
from typing import Iterable, Sequence

from relart.textproc.porter import porter_stem

__all__ = [
    "tokenize",
    "porter_stem",
    "load_stopwords",
    "default_stopwords",
    "stopwords_sha256",
    "effective_char_length",
]

# Lowercase alphanumeric runs; hyphens kept only between alphanumerics
# ("il-6" is one token, "-foo" is not). Underscore is not a token character.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)

_DEFAULT_STOPWORDS: frozenset[str] | None = None


def tokenize(text: str) -> list[str]:
    """Split text into lowercase tokens.

    Tokens are maximal runs of letters and digits, possibly joined by
    internal hyphens; every other character is a separator.
    """
    return _TOKEN_RE.findall(text.lower())


def load_stopwords(path) -> frozenset[str]:
    """Load a stopword file: one lowercase token per line, UTF-8."""
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if not word:
                continue
            if word != word.lower():
                raise ValueError(f"stopword entry not lowercase: {word!r}")
            words.append(word)
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The stopword list vendored with the package."""
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        text = resources.files("relart").joinpath("data/stopwords.txt").read_text("utf-8")
        _DEFAULT_STOPWORDS = frozenset(w for w in (l.strip() for l in text.splitlines()) if w)
    return _DEFAULT_STOPWORDS


def stopwords_sha256() -> str:
    """Hash of the vendored stopword file, pinning the list for reproducibility."""
    raw = resources.files("relart").joinpath("data/stopwords.txt").read_bytes()
    return hashlib.sha256(raw).hexdigest()


def effective_char_length(tokens: Sequence[str], stopwords: Iterable[str]) -> int:
    """Character count of a tokenized document with stopwords removed.

    Spaces are excluded by construction since only token characters are
    counted.
    """
    stopset = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return sum(len(tok) for tok in tokens if tok not in stopset)
