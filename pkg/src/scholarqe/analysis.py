"""Deterministic text analysis: tokenize, drop stopwords, stem.

The same chain runs at index, training, and query time so that the index,
the embedding vocabulary, and the expansion candidates share one term space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .porter import stem

# Classic 33-word English stopword list shipped by the usual search platforms.
DEFAULT_STOPWORDS = frozenset(
    "a an and are as at be but by for if in into is it no not of on or such "
    "that the their then there these they this to was will with".split()
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class AnalysisConfig:
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    min_token_len: int = 2
    max_token_len: int = 40

    def __post_init__(self) -> None:
        if not (1 <= self.min_token_len <= self.max_token_len):
            raise ConfigError(
                f"token length bounds must satisfy 1 <= min <= max, "
                f"got {self.min_token_len}..{self.max_token_len}"
            )


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: one word per line, '#' lines are comments."""
    words = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
    return frozenset(words)


def tokenize(text: str, config: AnalysisConfig | None = None) -> list[str]:
    """Lowercase and split on non-alphanumerics.

    Tokens without an alphabetic character are dropped, as are tokens outside
    the configured length bounds.
    """
    config = config or AnalysisConfig()
    tokens = []
    for token in _TOKEN_RE.findall(text.lower()):
        if not (config.min_token_len <= len(token) <= config.max_token_len):
            continue
        if not any(ch.isalpha() for ch in token):
            continue
        tokens.append(token)
    return tokens


def remove_stopwords(tokens: list[str], config: AnalysisConfig) -> list[str]:
    return [t for t in tokens if t not in config.stopwords]


def analyze(text: str, config: AnalysisConfig | None = None) -> list[str]:
    """tokenize -> remove_stopwords -> stem.

    Stopwords are removed before stemming. Stemming can land on a stopword
    ("willed" -> "will") or outside the length bounds ("ks" -> "k"); such
    stems are dropped so output terms always honor the config. Not
    idempotent: re-analyzing joined output may differ, because stemming is
    not idempotent.
    """
    config = config or AnalysisConfig()
    terms = []
    for token in remove_stopwords(tokenize(text, config), config):
        stemmed = stem(token)
        if not stemmed or stemmed in config.stopwords:
            continue
        if not (config.min_token_len <= len(stemmed) <= config.max_token_len):
            continue
        terms.append(stemmed)
    return terms
