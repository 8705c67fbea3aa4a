"""Four-phase retrieval pipeline: BM25, embedding re-rank, citation-augmented
candidate scoring, reweighted final search.

Phase 1 retrieves the top `initial_depth` documents with plain BM25. Phase 2
permutes that set by cosine between the query centroid and each document's
idf-weighted embedding centroid. Phase 3 pools terms from the top `prf_k`
documents plus (optionally) every in-corpus paper they cite, then weights
each candidate by pool frequency times its best embedding similarity to any
query term. Phase 4 re-searches with original terms at `original_weight` and
the top `expansion_m` candidates at `expansion_weight`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import AnalysisConfig, analyze
from .corpus import CitationGraph, DocumentStore
from .embeddings import EmbeddingTable, cosine, doc_embedding, term_similarity
from .errors import ConfigError, EmptyQueryError
from .index import InvertedIndex, RankedList, WeightedQuery, search

# score assigned to documents without an embedding so they sort after any
# real cosine (which is >= -1)
_NO_EMBEDDING_SCORE = -2.0


@dataclass(frozen=True)
class ExpansionConfig:
    initial_depth: int = 100
    prf_k: int = 4
    expansion_m: int = 10
    original_weight: float = 1.0
    expansion_weight: float = 0.7
    include_citations: bool = True
    use_rerank: bool = True
    log_frequency: bool = False

    def __post_init__(self) -> None:
        if not (1 <= self.prf_k <= self.initial_depth):
            raise ConfigError(
                f"prf_k must be in [1, initial_depth], got prf_k={self.prf_k} "
                f"initial_depth={self.initial_depth}"
            )
        if self.expansion_m < 0:
            raise ConfigError(f"expansion_m must be >= 0, got {self.expansion_m}")
        if not (self.original_weight > 0 and self.expansion_weight > 0):
            raise ConfigError("query term weights must be > 0")


@dataclass(frozen=True)
class CandidateTerm:
    term: str
    frequency: int
    similarity: float
    weight: float

    def __post_init__(self) -> None:
        if self.frequency < 1:
            raise ValueError(f"candidate frequency must be >= 1, got {self.frequency}")
        if not self.similarity > 0:
            raise ValueError(f"candidate similarity must be > 0, got {self.similarity}")


@dataclass
class CandidatePool:
    prf_doc_ids: list[str]
    cited_doc_ids: list[str]
    term_frequencies: dict[str, int]

    @property
    def source_doc_ids(self) -> list[str]:
        return self.prf_doc_ids + self.cited_doc_ids


@dataclass
class ExpandedQuery:
    original_terms: list[str]
    expansion_terms: list[CandidateTerm]
    weighted: WeightedQuery


@dataclass
class PipelineResult:
    initial: RankedList
    reranked: RankedList
    pool: CandidatePool
    expanded: ExpandedQuery
    final: RankedList


def analyze_query(query_text: str, config: AnalysisConfig) -> list[str]:
    """Analyzed query terms, first-occurrence deduplicated; error if empty."""
    terms = list(dict.fromkeys(analyze(query_text, config)))
    if not terms:
        raise EmptyQueryError(f"query {query_text!r} analyzes to no terms")
    return terms


def initial_retrieval(
    index: InvertedIndex, query_text: str, config: ExpansionConfig
) -> RankedList:
    terms = analyze_query(query_text, index.analysis)
    query = WeightedQuery(tuple((t, 1.0) for t in terms))
    return search(index, query, config.initial_depth)


def rerank(
    initial: RankedList,
    table: EmbeddingTable,
    index: InvertedIndex,
    store: DocumentStore,
    query_terms: list[str],
    doc_vector_cache: dict[str, object] | None = None,
) -> RankedList:
    """Permute the initial list by cosine(query centroid, document centroid).

    Documents without an embedding sort last; ties break by the initial BM25
    score (descending) then doc id. If no query term is in the vocabulary the
    input is returned unchanged.
    """
    vectors = [table.vectors[t] for t in query_terms if t in table.vectors]
    if not vectors:
        return initial
    centroid = sum(vectors) / len(vectors)

    cache = doc_vector_cache if doc_vector_cache is not None else {}
    scored = []
    for doc_id, bm25_score in initial.entries:
        if doc_id in cache:
            vec = cache[doc_id]
        else:
            doc = store.get(doc_id)
            terms = analyze(doc.text(), index.analysis) if doc else []
            vec = doc_embedding(table, index, terms)
            cache[doc_id] = vec
        score = cosine(centroid, vec) if vec is not None else _NO_EMBEDDING_SCORE
        scored.append((doc_id, bm25_score, score))
    scored.sort(key=lambda e: (-e[2], -e[1], e[0]))
    return RankedList(tuple((doc_id, score) for doc_id, _, score in scored),
                      initial.depth)


def build_candidate_pool(
    reranked: RankedList,
    graph: CitationGraph,
    store: DocumentStore,
    analysis: AnalysisConfig,
    config: ExpansionConfig,
) -> CandidatePool:
    """Pool term counts from the top prf_k documents and the papers they cite."""
    prf_ids = reranked.doc_ids()[: config.prf_k]
    cited_ids: list[str] = []
    if config.include_citations:
        seen = set(prf_ids)
        for doc_id in prf_ids:
            for ref in graph.out_edges.get(doc_id, []):
                if ref not in seen:
                    seen.add(ref)
                    cited_ids.append(ref)
    frequencies: dict[str, int] = {}
    for doc_id in prf_ids + cited_ids:
        doc = store.get(doc_id)
        if doc is None:
            continue
        for term in analyze(doc.text(), analysis):
            frequencies[term] = frequencies.get(term, 0) + 1
    return CandidatePool(prf_doc_ids=prf_ids, cited_doc_ids=cited_ids,
                         term_frequencies=frequencies)


def score_candidates(
    pool: CandidatePool,
    query_terms: list[str],
    table: EmbeddingTable,
    config: ExpansionConfig | None = None,
) -> list[CandidateTerm]:
    """Weight = pool frequency x best similarity to any query term.

    Query terms themselves, out-of-vocabulary terms, and terms whose best
    similarity is non-positive are excluded. Result is sorted by weight
    descending, ties by term ascending.
    """
    config = config or ExpansionConfig()
    query_set = set(query_terms)
    candidates = []
    for term in sorted(pool.term_frequencies):
        if term in query_set or term not in table:
            continue
        sims = [
            s for s in (term_similarity(table, q, term) for q in query_terms)
            if s is not None
        ]
        if not sims:
            continue
        similarity = max(sims)
        if similarity <= 0:
            continue
        f = pool.term_frequencies[term]
        base = math.log1p(f) if config.log_frequency else f
        candidates.append(
            CandidateTerm(term=term, frequency=f, similarity=similarity,
                          weight=base * similarity)
        )
    candidates.sort(key=lambda c: (-c.weight, c.term))
    return candidates


def select_expansion_terms(
    scored: list[CandidateTerm], config: ExpansionConfig
) -> list[CandidateTerm]:
    return scored[: config.expansion_m]


def build_expanded_query(
    original_terms: list[str],
    selected: list[CandidateTerm],
    config: ExpansionConfig,
) -> ExpandedQuery:
    weighted = WeightedQuery(
        tuple((t, config.original_weight) for t in original_terms)
        + tuple((c.term, config.expansion_weight) for c in selected)
    )
    return ExpandedQuery(original_terms=list(original_terms),
                         expansion_terms=list(selected), weighted=weighted)


def run_pipeline(
    index: InvertedIndex,
    table: EmbeddingTable,
    graph: CitationGraph,
    store: DocumentStore,
    query_text: str,
    config: ExpansionConfig,
    doc_vector_cache: dict[str, object] | None = None,
) -> PipelineResult:
    """All four phases, returning every intermediate product for auditing."""
    original_terms = analyze_query(query_text, index.analysis)
    initial = initial_retrieval(index, query_text, config)
    if config.use_rerank:
        reranked = rerank(initial, table, index, store, original_terms,
                          doc_vector_cache)
    else:
        reranked = initial
    if len(reranked) == 0:
        pool = CandidatePool([], [], {})
        selected: list[CandidateTerm] = []
    else:
        pool = build_candidate_pool(reranked, graph, store, index.analysis, config)
        selected = select_expansion_terms(
            score_candidates(pool, original_terms, table, config), config
        )
    expanded = build_expanded_query(original_terms, selected, config)
    final = search(index, expanded.weighted, config.initial_depth)
    return PipelineResult(initial=initial, reranked=reranked, pool=pool,
                          expanded=expanded, final=final)


def expand_and_search(
    index: InvertedIndex,
    table: EmbeddingTable,
    graph: CitationGraph,
    store: DocumentStore,
    query_text: str,
    config: ExpansionConfig,
) -> tuple[ExpandedQuery, RankedList]:
    result = run_pipeline(index, table, graph, store, query_text, config)
    return result.expanded, result.final


def expansion_audit(query_text: str, result: PipelineResult) -> dict:
    """The JSON audit object emitted by the expand command."""
    return {
        "query": query_text,
        "original_terms": list(result.expanded.original_terms),
        "expansion_terms": [
            {"term": c.term, "f": c.frequency, "sim": c.similarity, "weight": c.weight}
            for c in result.expanded.expansion_terms
        ],
        "prf_docs": list(result.pool.prf_doc_ids),
        "cited_docs": list(result.pool.cited_doc_ids),
    }
