"""Corpus ingestion and citation graph construction.

The corpus is UTF-8 JSON Lines, one paper per line. Required keys: "id",
"title", "abstract", "references"; optional: "body", "venue", "year".
Unknown keys are ignored. The citation graph keeps only edges between
papers that are both in the corpus; self-loops and out-of-corpus targets
are dropped (and counted), never stored.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusFormatError
from .fileio import atomic_write

log = logging.getLogger(__name__)

GRAPH_FORMAT = "scholarqe-citation-graph"
GRAPH_VERSION = 1


@dataclass
class Document:
    id: str
    title: str
    abstract: str
    references: list[str]
    body: str = ""
    venue: str = ""
    year: int | None = None

    def text(self) -> str:
        """The single indexed field: title, abstract, and body concatenated."""
        return f"{self.title} {self.abstract} {self.body}"


@dataclass
class DocumentStore:
    documents: dict[str, Document] = field(default_factory=dict)
    invalid_line_count: int = 0
    duplicate_reference_count: int = 0

    @property
    def count(self) -> int:
        return len(self.documents)

    def get(self, doc_id: str) -> Document | None:
        return self.documents.get(doc_id)

    def __iter__(self):
        return iter(self.documents.values())


@dataclass
class CitationGraph:
    nodes: set[str] = field(default_factory=set)
    out_edges: dict[str, list[str]] = field(default_factory=dict)
    in_edges: dict[str, list[str]] = field(default_factory=dict)
    dangling_count: int = 0
    self_loop_count: int = 0

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.out_edges.values())


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    dangling_count: int
    venue_count: int


def _parse_line(raw: str, line_no: int) -> Document | None:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        log.warning("corpus line %d: invalid JSON (%s)", line_no, exc.msg)
        return None
    if not isinstance(obj, dict):
        log.warning("corpus line %d: not a JSON object", line_no)
        return None
    doc_id = obj.get("id")
    title = obj.get("title")
    abstract = obj.get("abstract")
    references = obj.get("references")
    if not isinstance(doc_id, str) or not doc_id:
        log.warning("corpus line %d: missing or empty 'id'", line_no)
        return None
    if not isinstance(title, str) or not isinstance(abstract, str):
        log.warning("corpus line %d: 'title'/'abstract' must be strings", line_no)
        return None
    if not isinstance(references, list) or not all(isinstance(r, str) for r in references):
        log.warning("corpus line %d: 'references' must be an array of strings", line_no)
        return None
    body = obj.get("body", "")
    venue = obj.get("venue", "")
    year = obj.get("year")
    if not isinstance(body, str) or not isinstance(venue, str):
        log.warning("corpus line %d: 'body'/'venue' must be strings", line_no)
        return None
    if year is not None and not isinstance(year, int):
        log.warning("corpus line %d: 'year' must be an integer", line_no)
        return None
    return Document(
        id=doc_id, title=title, abstract=abstract,
        references=list(references), body=body, venue=venue, year=year,
    )


def parse_corpus(path: str | Path) -> DocumentStore:
    """Parse a JSON Lines corpus file into a DocumentStore.

    Invalid lines (bad JSON, schema violations, duplicate ids) are counted
    and skipped with a warning; duplicate references within a document are
    dropped keeping the first occurrence.
    """
    store = DocumentStore()
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read corpus file {path}: {exc}") from exc
    with handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            doc = _parse_line(raw, line_no)
            if doc is None:
                store.invalid_line_count += 1
                continue
            if doc.id in store.documents:
                log.warning("corpus line %d: duplicate id %r, line skipped", line_no, doc.id)
                store.invalid_line_count += 1
                continue
            deduped = list(dict.fromkeys(doc.references))
            dropped = len(doc.references) - len(deduped)
            if dropped:
                store.duplicate_reference_count += dropped
                log.warning(
                    "corpus line %d: dropped %d duplicate reference(s) in %r",
                    line_no, dropped, doc.id,
                )
            doc.references = deduped
            store.documents[doc.id] = doc
    return store


def build_citation_graph(store: DocumentStore) -> CitationGraph:
    """Directed edge (i -> j) for every in-corpus, non-self reference of i."""
    graph = CitationGraph()
    graph.nodes = set(store.documents)
    for doc in store:
        out: list[str] = []
        for ref in doc.references:
            if ref == doc.id:
                graph.self_loop_count += 1
                continue
            if ref not in store.documents:
                graph.dangling_count += 1
                continue
            out.append(ref)
            graph.in_edges.setdefault(ref, []).append(doc.id)
        graph.out_edges[doc.id] = out
    return graph


def out_references(graph: CitationGraph, doc_id: str) -> list[str]:
    return list(graph.out_edges.get(doc_id, []))


def graph_stats(graph: CitationGraph, store: DocumentStore) -> GraphStats:
    venues = {doc.venue for doc in store if doc.venue}
    return GraphStats(
        node_count=len(graph.nodes),
        edge_count=graph.edge_count,
        dangling_count=graph.dangling_count,
        venue_count=len(venues),
    )


def save_graph(graph: CitationGraph, path: str | Path) -> None:
    payload = {
        "format": GRAPH_FORMAT,
        "version": GRAPH_VERSION,
        "nodes": sorted(graph.nodes),
        "out_edges": {k: graph.out_edges[k] for k in sorted(graph.out_edges)},
        "dangling_count": graph.dangling_count,
        "self_loop_count": graph.self_loop_count,
    }
    with atomic_write(path) as handle:
        json.dump(payload, handle, ensure_ascii=False)


def load_graph(path: str | Path) -> CitationGraph:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise CorpusFormatError(f"cannot read citation graph {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"citation graph {path} is not valid JSON: {exc}") from exc
    if payload.get("format") != GRAPH_FORMAT:
        raise CorpusFormatError(f"{path} is not a citation graph file")
    if payload.get("version") != GRAPH_VERSION:
        raise CorpusFormatError(
            f"unsupported citation graph version {payload.get('version')!r} in {path}"
        )
    graph = CitationGraph(
        nodes=set(payload["nodes"]),
        out_edges={k: list(v) for k, v in payload["out_edges"].items()},
        dangling_count=int(payload["dangling_count"]),
        self_loop_count=int(payload.get("self_loop_count", 0)),
    )
    for src, targets in graph.out_edges.items():
        for target in targets:
            graph.in_edges.setdefault(target, []).append(src)
    return graph
