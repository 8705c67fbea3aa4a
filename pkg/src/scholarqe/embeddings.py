"""Term vectors: deterministic reference trainer plus the interchange format.

The in-repo trainer is skip-gram with negative sampling over analyzed term
sequences, one sequence per document, single-threaded with a seeded generator
so that identical inputs produce bitwise-identical tables. The text
interchange format is the plug-in point for externally trained vectors
(e.g. contextual transformer embeddings pooled per term): any table whose
terms live in the same stemmed vocabulary drops in unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .analysis import AnalysisConfig, analyze
from .corpus import DocumentStore
from .errors import ConfigError, EmbeddingFormatError, NoVocabularyError
from .fileio import atomic_write

if TYPE_CHECKING:
    from .index import InvertedIndex


@dataclass(frozen=True)
class TrainConfig:
    dimension: int = 256
    window: int = 5
    negative_samples: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_count: int = 5
    seed: int = 1

    def __post_init__(self) -> None:
        if self.dimension < 1 or self.window < 1 or self.epochs < 1 or self.min_count < 1:
            raise ConfigError("dimension, window, epochs, and min_count must be >= 1")
        if self.negative_samples < 0:
            raise ConfigError("negative_samples must be >= 0")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def vocab_size(self) -> int:
        return len(self.vectors)

    def __contains__(self, term: str) -> bool:
        return term in self.vectors

    def get(self, term: str) -> np.ndarray | None:
        return self.vectors.get(term)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero vectors score 0 by convention."""
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    value = float(np.dot(u, v)) / (nu * nv)
    return max(-1.0, min(1.0, value))


def term_similarity(table: EmbeddingTable, a: str, b: str) -> float | None:
    """Cosine of two stored term vectors; None if either term is unknown."""
    va = table.vectors.get(a)
    vb = table.vectors.get(b)
    if va is None or vb is None:
        return None
    return cosine(va, vb)


def doc_embedding(
    table: EmbeddingTable, index: InvertedIndex, terms: list[str]
) -> np.ndarray | None:
    """idf-weighted mean of the in-vocabulary term vectors; None if none are."""
    total = np.zeros(table.dimension)
    weight_sum = 0.0
    for term in terms:
        vec = table.vectors.get(term)
        if vec is None:
            continue
        w = index.idf(term)
        total += w * vec
        weight_sum += w
    if weight_sum == 0.0:
        return None
    return total / weight_sum


def train_embeddings(
    store: DocumentStore,
    analysis: AnalysisConfig | None = None,
    config: TrainConfig | None = None,
) -> EmbeddingTable:
    """Train skip-gram/negative-sampling vectors over the analyzed corpus.

    Vocabulary is every analyzed term with corpus frequency >= min_count,
    ordered by descending frequency (ties lexicographic). Traversal is
    document order, positions left to right, one seeded generator for
    window shrinking and negative draws, so a fixed seed gives
    bitwise-identical tables.
    """
    analysis = analysis or AnalysisConfig()
    config = config or TrainConfig()

    sequences = [analyze(doc.text(), analysis) for doc in store]
    counts: dict[str, int] = {}
    for seq in sequences:
        for term in seq:
            counts[term] = counts.get(term, 0) + 1
    vocab = sorted(
        (t for t, c in counts.items() if c >= config.min_count),
        key=lambda t: (-counts[t], t),
    )
    if not vocab:
        raise NoVocabularyError(
            f"no trainable vocabulary: no term reaches min_count={config.min_count}"
        )
    term_ids = {t: i for i, t in enumerate(vocab)}
    encoded = [
        np.array([term_ids[t] for t in seq if t in term_ids], dtype=np.int64)
        for seq in sequences
    ]

    # unigram^{3/4} noise distribution, cumulative for searchsorted draws
    noise = np.array([counts[t] for t in vocab], dtype=np.float64) ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    rng = np.random.default_rng(config.seed)
    dim = config.dimension
    syn0 = (rng.random((len(vocab), dim)) - 0.5) / dim
    syn1 = np.zeros((len(vocab), dim))

    total_positions = sum(len(seq) for seq in encoded) * config.epochs
    processed = 0
    k = config.negative_samples
    for _ in range(config.epochs):
        for seq in encoded:
            n = len(seq)
            for pos in range(n):
                alpha = config.learning_rate * max(
                    1.0 - processed / max(total_positions, 1), 1e-4
                )
                processed += 1
                center = int(seq[pos])
                span = int(rng.integers(1, config.window + 1))
                for ctx_pos in range(max(0, pos - span), min(n, pos + span + 1)):
                    if ctx_pos == pos:
                        continue
                    target = int(seq[ctx_pos])
                    if k > 0:
                        draws = rng.random(k)
                        negatives = np.searchsorted(noise_cdf, draws)
                        targets = np.concatenate(([target], negatives))
                    else:
                        targets = np.array([target], dtype=np.int64)
                    labels = np.zeros(len(targets))
                    labels[0] = 1.0
                    out_vecs = syn1[targets]
                    # clip keeps exp() in range; sigmoid is saturated out there anyway
                    logits = np.clip(out_vecs @ syn0[center], -35.0, 35.0)
                    preds = 1.0 / (1.0 + np.exp(-logits))
                    grad = (labels - preds) * alpha
                    feedback = grad @ out_vecs
                    np.add.at(syn1, targets, grad[:, None] * syn0[center])
                    syn0[center] += feedback

    return EmbeddingTable(
        dimension=dim,
        vectors={term: syn0[i].copy() for i, term in enumerate(vocab)},
    )


def export_table(table: EmbeddingTable, path: str | Path) -> None:
    """Write the text interchange format: '<vocab> <dim>' header, one term per row."""
    for term, vec in table.vectors.items():
        if len(vec) != table.dimension:
            raise EmbeddingFormatError(
                f"vector for {term!r} has {len(vec)} components, expected {table.dimension}"
            )
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"vector for {term!r} has non-finite components")
    with atomic_write(path) as handle:
        handle.write(f"{table.vocab_size} {table.dimension}\n")
        for term in sorted(table.vectors):
            values = " ".join(repr(float(x)) for x in table.vectors[term])
            handle.write(f"{term} {values}\n")


def import_table(path: str | Path) -> EmbeddingTable:
    """Parse the interchange format; terms are taken verbatim (callers pre-stem)."""
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise EmbeddingFormatError(f"cannot read embeddings file {path}: {exc}") from exc
    with handle:
        header = handle.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingFormatError(f"{path}:1: header must be '<vocab_size> <dimension>'")
        try:
            vocab_size, dimension = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}:1: header fields must be integers") from None
        if vocab_size < 0 or dimension < 1:
            raise EmbeddingFormatError(f"{path}:1: invalid header values {header.strip()!r}")
        vectors: dict[str, np.ndarray] = {}
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dimension + 1:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: expected term + {dimension} values, "
                    f"got {len(fields)} fields"
                )
            term = fields[0]
            if term in vectors:
                raise EmbeddingFormatError(f"{path}:{line_no}: duplicate term {term!r}")
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: non-numeric vector component"
                ) from None
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(f"{path}:{line_no}: non-finite vector component")
            vectors[term] = vec
        if len(vectors) != vocab_size:
            raise EmbeddingFormatError(
                f"{path}: header declares {vocab_size} terms but file has {len(vectors)}"
            )
    return EmbeddingTable(dimension=dimension, vectors=vectors)
