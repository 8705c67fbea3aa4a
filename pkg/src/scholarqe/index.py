"""BM25-scored inverted index with weighted multi-term search and persistence.

Scoring uses k1 = 1.2, b = 0.75 by default and the non-negative idf variant
idf = ln(1 + (N - df + 0.5) / (df + 0.5)), so idf > 0 for every indexed term.
Query weights multiply per-term contributions. Results are ordered by score
descending with ties broken by ascending doc id; zero-scoring documents are
never returned.
"""

from __future__ import annotations

import math
import struct
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalysisConfig, analyze
from .corpus import DocumentStore
from .errors import IndexFormatError
from .fileio import atomic_write

MAGIC = b"SCHQEIDX"
FOOTER = b"SQEFOOT1"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class WeightedQuery:
    """Ordered (term, weight) pairs; terms unique, weights strictly positive."""

    terms: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        seen = set()
        for term, weight in self.terms:
            if term in seen:
                raise ValueError(f"duplicate query term {term!r}")
            if not weight > 0:
                raise ValueError(f"non-positive weight {weight!r} for term {term!r}")
            seen.add(term)


@dataclass(frozen=True)
class RankedList:
    """Entries sorted by descending score, ties by ascending doc id."""

    entries: tuple[tuple[str, float], ...]
    depth: int

    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class IndexStats:
    doc_count: int
    avg_doc_len: float
    vocabulary_size: int


@dataclass
class InvertedIndex:
    doc_ids: list[str]
    doc_lens: list[int]
    postings: dict[str, list[tuple[int, int]]]
    analysis: AnalysisConfig
    k1: float = 1.2
    b: float = 0.75
    _ordinals: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._ordinals:
            self._ordinals = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    @property
    def doc_count(self) -> int:
        return len(self.doc_ids)

    @property
    def avg_doc_len(self) -> float:
        return sum(self.doc_lens) / self.doc_count if self.doc_count else 0.0

    @property
    def vocabulary_size(self) -> int:
        return len(self.postings)

    def stats(self) -> IndexStats:
        return IndexStats(self.doc_count, self.avg_doc_len, self.vocabulary_size)

    def ordinal(self, doc_id: str) -> int | None:
        return self._ordinals.get(doc_id)

    def df(self, term: str) -> int:
        plist = self.postings.get(term)
        return len(plist) if plist else 0

    def idf(self, term: str) -> float:
        n = self.doc_count
        df = self.df(term)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def term_frequency(self, term: str, ordinal: int) -> int:
        plist = self.postings.get(term)
        if not plist:
            return 0
        pos = bisect_left(plist, (ordinal,))
        if pos < len(plist) and plist[pos][0] == ordinal:
            return plist[pos][1]
        return 0


def build_index(
    store: DocumentStore,
    config: AnalysisConfig | None = None,
    k1: float = 1.2,
    b: float = 0.75,
) -> InvertedIndex:
    """Index analyze(title + " " + abstract + " " + body) for every document."""
    config = config or AnalysisConfig()
    doc_ids: list[str] = []
    doc_lens: list[int] = []
    accum: dict[str, list[tuple[int, int]]] = {}
    for ordinal, doc in enumerate(store):
        terms = analyze(doc.text(), config)
        doc_ids.append(doc.id)
        doc_lens.append(len(terms))
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            accum.setdefault(term, []).append((ordinal, tf))
    postings = {term: accum[term] for term in sorted(accum)}
    return InvertedIndex(doc_ids=doc_ids, doc_lens=doc_lens, postings=postings,
                         analysis=config, k1=k1, b=b)


def bm25_term_score(index: InvertedIndex, term: str, ordinal: int) -> float:
    """BM25 contribution of one term to one document; 0 if the term is absent."""
    tf = index.term_frequency(term, ordinal)
    if tf == 0:
        return 0.0
    norm = index.k1 * (1.0 - index.b + index.b * index.doc_lens[ordinal] / index.avg_doc_len)
    return index.idf(term) * (tf * (index.k1 + 1.0)) / (tf + norm)


def search(index: InvertedIndex, query: WeightedQuery, depth: int) -> RankedList:
    """Top-`depth` documents by the weighted sum of per-term BM25 scores."""
    if depth < 1:
        raise ValueError(f"search depth must be >= 1, got {depth}")
    if index.doc_count == 0:
        return RankedList((), depth)
    k1, b = index.k1, index.b
    avgdl = index.avg_doc_len
    scores: dict[int, float] = {}
    for term, weight in query.terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for ordinal, tf in plist:
            norm = k1 * (1.0 - b + b * index.doc_lens[ordinal] / avgdl)
            contribution = idf * (tf * (k1 + 1.0)) / (tf + norm)
            scores[ordinal] = scores.get(ordinal, 0.0) + weight * contribution
    ranked = sorted(
        ((index.doc_ids[o], s) for o, s in scores.items() if s > 0.0),
        key=lambda entry: (-entry[1], entry[0]),
    )
    return RankedList(tuple(ranked[:depth]), depth)


# --- persistence -----------------------------------------------------------


def _write_str(handle, text: str) -> None:
    data = text.encode("utf-8")
    handle.write(struct.pack("<I", len(data)))
    handle.write(data)


class _Reader:
    def __init__(self, handle) -> None:
        self.handle = handle

    def read(self, n: int) -> bytes:
        data = self.handle.read(n)
        if len(data) != n:
            raise IndexFormatError("index file is truncated or corrupt")
        return data

    def u32(self) -> int:
        return struct.unpack("<I", self.read(4))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.read(8))[0]

    def string(self) -> str:
        return self.read(self.u32()).decode("utf-8")


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write the versioned binary index: magic, version, analysis, docs, postings."""
    with atomic_write(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", FORMAT_VERSION))
        handle.write(struct.pack("<dd", index.k1, index.b))
        cfg = index.analysis
        handle.write(struct.pack("<II", cfg.min_token_len, cfg.max_token_len))
        stopwords = sorted(cfg.stopwords)
        handle.write(struct.pack("<I", len(stopwords)))
        for word in stopwords:
            _write_str(handle, word)
        handle.write(struct.pack("<I", index.doc_count))
        for doc_id, doc_len in zip(index.doc_ids, index.doc_lens):
            _write_str(handle, doc_id)
            handle.write(struct.pack("<I", doc_len))
        terms = sorted(index.postings)
        handle.write(struct.pack("<I", len(terms)))
        for term in terms:
            _write_str(handle, term)
            plist = index.postings[term]
            handle.write(struct.pack("<I", len(plist)))
            for ordinal, tf in plist:
                handle.write(struct.pack("<II", ordinal, tf))
        handle.write(FOOTER)


def load_index(path: str | Path) -> InvertedIndex:
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise IndexFormatError(f"cannot read index file {path}: {exc}") from exc
    with handle:
        reader = _Reader(handle)
        if reader.read(8) != MAGIC:
            raise IndexFormatError(f"{path} is not an index file (bad magic)")
        version = reader.u32()
        if version != FORMAT_VERSION:
            raise IndexFormatError(
                f"unsupported index format version {version} (expected {FORMAT_VERSION})"
            )
        k1 = reader.f64()
        b = reader.f64()
        min_len = reader.u32()
        max_len = reader.u32()
        stopwords = frozenset(reader.string() for _ in range(reader.u32()))
        config = AnalysisConfig(stopwords=stopwords, min_token_len=min_len,
                                max_token_len=max_len)
        doc_count = reader.u32()
        doc_ids: list[str] = []
        doc_lens: list[int] = []
        for _ in range(doc_count):
            doc_ids.append(reader.string())
            doc_lens.append(reader.u32())
        postings: dict[str, list[tuple[int, int]]] = {}
        for _ in range(reader.u32()):
            term = reader.string()
            count = reader.u32()
            plist = []
            for _ in range(count):
                ordinal = reader.u32()
                tf = reader.u32()
                plist.append((ordinal, tf))
            postings[term] = plist
        if reader.read(8) != FOOTER:
            raise IndexFormatError("index file is truncated or corrupt (bad footer)")
        if handle.read(1):
            raise IndexFormatError("index file has trailing data")
    return InvertedIndex(doc_ids=doc_ids, doc_lens=doc_lens, postings=postings,
                         analysis=config, k1=k1, b=b)
