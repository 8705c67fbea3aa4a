"""Exception hierarchy shared across the package.

``DataError`` covers everything caused by bad or missing input data and maps
to exit code 2 / HTTP 400; anything else escaping the engine is treated as an
internal error (exit code 3 / HTTP 500).
"""

from __future__ import annotations


class ScholarQEError(Exception):
    """Base class for all package errors."""


class DataError(ScholarQEError):
    """Invalid, malformed, or missing input data."""


class CorpusFormatError(DataError):
    """Corpus file is unreadable or malformed beyond recovery."""


class IndexFormatError(DataError):
    """Index file has a bad magic, wrong version, or is truncated."""


class EmbeddingFormatError(DataError):
    """Embedding interchange file failed to parse."""


class QrelsFormatError(DataError):
    """Relevance judgment file failed to parse."""


class RunFormatError(DataError):
    """Run file failed to parse or violates rank/score ordering."""


class ConfigError(DataError):
    """Configuration file contains unknown keys or bad values."""


class EmptyQueryError(DataError):
    """Query text analyzes to zero terms."""


class NoVocabularyError(DataError):
    """Corpus analyzes to an empty trainable vocabulary."""
