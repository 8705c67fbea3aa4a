"""Engine facade: artifact lifecycle plus query, expansion, and evaluation.

A loaded engine holds the document store, the inverted index, the citation
graph, and (when present) the embedding table, all immutable; queries can
then run concurrently. Building and training write their artifacts through
atomic renames so a failed command never leaves partial files behind.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

from .config import AppConfig
from .corpus import (
    CitationGraph,
    DocumentStore,
    build_citation_graph,
    graph_stats,
    load_graph,
    parse_corpus,
    save_graph,
)
from .embeddings import EmbeddingTable, export_table, import_table, train_embeddings
from .errors import DataError, EmptyQueryError
from .evaluation import (
    MetricReport,
    RunFile,
    evaluate_runs,
    format_report_table,
    load_qrels,
    load_run,
    report_csv_lines,
    write_run,
)
from .expansion import expansion_audit, initial_retrieval, run_pipeline
from .fileio import atomic_write
from .index import InvertedIndex, build_index, load_index, save_index

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BuildResult:
    documents: int
    citation_edges: int
    dangling_references: int
    venues: int
    vocabulary_size: int
    avg_doc_len: float
    index_path: str
    graph_path: str


@dataclass(frozen=True)
class TrainResult:
    vocabulary_size: int
    dimension: int
    embeddings_path: str


@dataclass(frozen=True)
class SearchHit:
    rank: int
    doc_id: str
    score: float
    title: str


@dataclass(frozen=True)
class EvalResult:
    report: MetricReport
    table: str
    csv_path: str
    run_paths: list[str]


def load_topics(path: str | Path) -> list[tuple[str, str]]:
    """TSV topics file: 'topic-id<TAB>query text' per line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read topics file {path}: {exc}") from exc
    topics: list[tuple[str, str]] = []
    seen = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise DataError(f"{path}:{line_no}: expected 'topic-id<TAB>query text'")
        topic_id, _, query = line.partition("\t")
        topic_id = topic_id.strip()
        if not topic_id or topic_id in seen:
            raise DataError(f"{path}:{line_no}: missing or duplicate topic id")
        seen.add(topic_id)
        topics.append((topic_id, query.strip()))
    return topics


class SearchEngine:
    def __init__(self, config: AppConfig) -> None:
        self.config = config
        self.store: DocumentStore | None = None
        self.index: InvertedIndex | None = None
        self.graph: CitationGraph | None = None
        self.table: EmbeddingTable | None = None
        self._doc_vectors: dict[str, object] = {}

    # --- artifact lifecycle ------------------------------------------------

    def _require_corpus_path(self) -> Path:
        if self.config.corpus_path is None:
            raise DataError("corpus_path is not configured")
        return self.config.corpus_path

    def build(self) -> BuildResult:
        """Parse the corpus, build and persist the index and citation graph."""
        store = parse_corpus(self._require_corpus_path())
        graph = build_citation_graph(store)
        index = build_index(store, self.config.analysis,
                            k1=self.config.bm25_k1, b=self.config.bm25_b)
        save_index(index, self.config.index_path)
        save_graph(graph, self.config.graph_path)
        self.store, self.graph, self.index = store, graph, index
        self._doc_vectors = {}
        gstats = graph_stats(graph, store)
        return BuildResult(
            documents=store.count,
            citation_edges=gstats.edge_count,
            dangling_references=gstats.dangling_count,
            venues=gstats.venue_count,
            vocabulary_size=index.vocabulary_size,
            avg_doc_len=index.avg_doc_len,
            index_path=str(self.config.index_path),
            graph_path=str(self.config.graph_path),
        )

    def train(self, seed: int | None = None) -> TrainResult:
        """Train embeddings over the corpus and write the interchange file."""
        if self.store is None:
            self.store = parse_corpus(self._require_corpus_path())
        train_config = self.config.train if seed is None else replace(self.config.train, seed=seed)
        table = train_embeddings(self.store, self.config.analysis, train_config)
        export_table(table, self.config.embeddings_path)
        self.table = table
        self._doc_vectors = {}
        return TrainResult(
            vocabulary_size=table.vocab_size,
            dimension=table.dimension,
            embeddings_path=str(self.config.embeddings_path),
        )

    def load(self) -> None:
        """Load store, index, graph, and (if present) embeddings from disk."""
        self.store = parse_corpus(self._require_corpus_path())
        self.index = load_index(self.config.index_path)
        if self.config.graph_path.exists():
            self.graph = load_graph(self.config.graph_path)
        else:
            log.info("no persisted citation graph; rebuilding from the corpus")
            self.graph = build_citation_graph(self.store)
        if Path(self.config.embeddings_path).exists():
            self.table = import_table(self.config.embeddings_path)
        else:
            self.table = None
        self._doc_vectors = {}

    def ensure_loaded(self) -> None:
        if self.index is None or self.store is None or self.graph is None:
            self.load()

    def _require_table(self) -> EmbeddingTable:
        if self.table is None:
            raise DataError(
                f"embeddings file {self.config.embeddings_path} not found; "
                "run the train command or import an external table first"
            )
        return self.table

    # --- queries -------------------------------------------------------------

    def search(self, query: str, mode: str = "qe", depth: int | None = None) -> list[SearchHit]:
        self.ensure_loaded()
        assert self.index is not None and self.store is not None
        config = self.config.expansion
        if depth is not None:
            config = replace(config, initial_depth=depth)
        if mode == "baseline":
            ranked = initial_retrieval(self.index, query, config)
        elif mode == "qe":
            result = run_pipeline(
                self.index, self._require_table(), self.graph, self.store,
                query, config, self._doc_vectors,
            )
            ranked = result.final
        else:
            raise DataError(f"unknown search mode {mode!r} (expected 'baseline' or 'qe')")
        hits = []
        for rank, (doc_id, score) in enumerate(ranked.entries, start=1):
            doc = self.store.get(doc_id)
            hits.append(SearchHit(rank=rank, doc_id=doc_id, score=score,
                                  title=doc.title if doc else ""))
        return hits

    def expand(self, query: str, include_citations: bool | None = None) -> dict:
        self.ensure_loaded()
        assert self.index is not None and self.store is not None
        config = self.config.expansion
        if include_citations is not None:
            config = replace(config, include_citations=include_citations)
        result = run_pipeline(
            self.index, self._require_table(), self.graph, self.store,
            query, config, self._doc_vectors,
        )
        return expansion_audit(query, result)

    # --- evaluation ------------------------------------------------------------

    def _ranked_for_topic(self, query: str, mode_config, baseline: bool):
        try:
            if baseline:
                return initial_retrieval(self.index, query, mode_config)
            return run_pipeline(
                self.index, self._require_table(), self.graph, self.store,
                query, mode_config, self._doc_vectors,
            ).final
        except EmptyQueryError:
            log.warning("topic query %r analyzes to no terms; empty result", query)
            return None

    def evaluate(
        self,
        extra_run_paths: list[str | Path] | None = None,
        output_dir: str | Path | None = None,
    ) -> EvalResult:
        """Run the three-way comparison over all topics and score every run.

        Internal runs: plain BM25 ("bm25"), expansion without citations
        ("qe_nocit"), and the full pipeline with citations ("qe_full").
        External run files are scored alongside.
        """
        if self.config.qrels_path is None or self.config.topics_path is None:
            raise DataError("qrels_path and topics_path must be configured for eval")
        self.ensure_loaded()
        qrels = load_qrels(self.config.qrels_path)
        topics = load_topics(self.config.topics_path)
        out_dir = Path(output_dir) if output_dir is not None else self.config.output_dir

        base = self.config.expansion
        modes = [
            ("bm25", base, True),
            ("qe_nocit", replace(base, include_citations=False), False),
            ("qe_full", replace(base, include_citations=True), False),
        ]
        runs: list[RunFile] = []
        run_paths: list[str] = []
        for tag, mode_config, baseline in modes:
            results = []
            for topic_id, query in topics:
                ranked = self._ranked_for_topic(query, mode_config, baseline)
                results.append((topic_id, ranked.entries if ranked else ()))
            path = out_dir / f"{tag}.run"
            write_run(results, tag, path)
            run_paths.append(str(path))
            runs.append(load_run(path))
        for extra in extra_run_paths or []:
            runs.append(load_run(extra))

        report = evaluate_runs(runs, qrels)
        header = self.config.provenance()
        csv_path = out_dir / "report.csv"
        with atomic_write(csv_path) as handle:
            handle.write("\n".join(report_csv_lines(report, header)) + "\n")
        table = format_report_table(report, header)
        return EvalResult(report=report, table=table, csv_path=str(csv_path),
                          run_paths=run_paths)

    # --- status ------------------------------------------------------------------

    def stats(self) -> dict:
        self.ensure_loaded()
        assert self.store is not None and self.index is not None and self.graph is not None
        gstats = graph_stats(self.graph, self.store)
        return {
            "documents": self.store.count,
            "citation_edges": gstats.edge_count,
            "dangling_references": gstats.dangling_count,
            "venues": gstats.venue_count,
            "vocabulary_size": self.index.vocabulary_size,
            "avg_doc_len": self.index.avg_doc_len,
            "embeddings_loaded": self.table is not None,
            "embedding_dimension": self.table.dimension if self.table else None,
        }
