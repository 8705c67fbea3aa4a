"""Corpus parsing and citation graph construction."""

from __future__ import annotations

import random

import pytest

from conftest import make_store, random_corpus, write_corpus
from scholarqe.corpus import (
    build_citation_graph,
    graph_stats,
    load_graph,
    out_references,
    parse_corpus,
    save_graph,
)
from scholarqe.errors import CorpusFormatError


def doc(doc_id, refs=(), title="t", abstract="a", **extra):
    return {"id": doc_id, "title": title, "abstract": abstract,
            "references": list(refs), **extra}


def test_parse_empty_file(tmp_path):
    store = make_store(tmp_path, [])
    assert store.count == 0


def test_parse_single_document(tmp_path):
    store = make_store(tmp_path, [doc("A")])
    assert store.count == 1
    assert store.get("A").title == "t"


def test_parse_missing_file_is_fatal(tmp_path):
    with pytest.raises(CorpusFormatError):
        parse_corpus(tmp_path / "nope.jsonl")


def test_invalid_lines_counted_and_skipped(tmp_path):
    path = tmp_path / "c.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write('{"id": "A", "title": "t", "abstract": "a", "references": []}\n')
        handle.write("not json\n")
        handle.write('{"id": "", "title": "t", "abstract": "a", "references": []}\n')
        handle.write('{"title": "no id", "abstract": "a", "references": []}\n')
        handle.write('{"id": "B", "title": "t", "abstract": "a", "references": "X"}\n')
        handle.write('{"id": "A", "title": "dup", "abstract": "a", "references": []}\n')
    store = parse_corpus(path)
    assert store.count == 1
    assert store.invalid_line_count == 5


def test_unknown_keys_ignored_and_optionals_default(tmp_path):
    store = make_store(tmp_path, [doc("A", junk=123, venue="ACL", year=2001)])
    d = store.get("A")
    assert d.venue == "ACL" and d.year == 2001 and d.body == ""


def test_duplicate_references_deduplicated_first_occurrence(tmp_path):
    store = make_store(tmp_path, [doc("A", refs=["B", "C", "B", "B"]), doc("B"), doc("C")])
    assert store.get("A").references == ["B", "C"]
    assert store.duplicate_reference_count == 2


def test_graph_direct_edges(tmp_path):
    store = make_store(tmp_path, [doc("A", refs=["B", "C"]), doc("B"), doc("C")])
    graph = build_citation_graph(store)
    assert graph.out_edges["A"] == ["B", "C"]
    assert graph.in_edges["B"] == ["A"]
    assert graph.edge_count == 2


def test_graph_drops_self_loops_and_dangling(tmp_path):
    store = make_store(tmp_path, [doc("A", refs=["A", "X"])])
    graph = build_citation_graph(store)
    assert graph.out_edges["A"] == []
    assert graph.dangling_count == 1
    assert graph.self_loop_count == 1


def test_out_references_contract(tmp_path):
    store = make_store(tmp_path, [doc("A", refs=["B", "C"]), doc("B"), doc("C")])
    graph = build_citation_graph(store)
    assert out_references(graph, "A") == ["B", "C"]
    assert out_references(graph, "unknown") == []
    assert out_references(graph, "B") == []


def test_graph_stats_counts(tmp_path):
    store = make_store(tmp_path, [])
    graph = build_citation_graph(store)
    stats = graph_stats(graph, store)
    assert (stats.node_count, stats.edge_count, stats.dangling_count,
            stats.venue_count) == (0, 0, 0, 0)

    store = make_store(
        tmp_path,
        [doc("A", refs=["B"], venue="X"), doc("B", refs=["C"], venue="Y"),
         doc("C", venue="X")],
        name="g.jsonl",
    )
    graph = build_citation_graph(store)
    stats = graph_stats(graph, store)
    assert stats.node_count == 3 and stats.edge_count == 2
    assert stats.venue_count == 2


def test_graph_symmetry_on_random_corpora(tmp_path):
    rng = random.Random(11)
    for trial in range(10):
        store = make_store(tmp_path, random_corpus(rng, 40, 60), name=f"r{trial}.jsonl")
        graph = build_citation_graph(store)
        for src, targets in graph.out_edges.items():
            for target in targets:
                assert src in graph.in_edges[target]
        for target, sources in graph.in_edges.items():
            for src in sources:
                assert target in graph.out_edges[src]
        for src, targets in graph.out_edges.items():
            assert src not in targets  # no self-loops


def test_reference_conservation(tmp_path):
    rng = random.Random(12)
    docs = random_corpus(rng, 50, 80)
    docs[0]["references"] = [docs[0]["id"], "GHOST", docs[1]["id"], docs[1]["id"]]
    store = make_store(tmp_path, docs)
    graph = build_citation_graph(store)
    total_refs_in_store = sum(len(d.references) for d in store)
    assert total_refs_in_store == (
        graph.edge_count + graph.dangling_count + graph.self_loop_count
    )


def test_parse_determinism(tmp_path):
    rng = random.Random(13)
    path = write_corpus(tmp_path / "d.jsonl", random_corpus(rng, 30, 50))
    a, b = parse_corpus(path), parse_corpus(path)
    assert list(a.documents) == list(b.documents)
    ga, gb = build_citation_graph(a), build_citation_graph(b)
    save_graph(ga, tmp_path / "ga.json")
    save_graph(gb, tmp_path / "gb.json")
    assert (tmp_path / "ga.json").read_bytes() == (tmp_path / "gb.json").read_bytes()


def test_graph_roundtrip(tmp_path):
    store = make_store(tmp_path, [doc("A", refs=["B", "X"]), doc("B", refs=["A"])])
    graph = build_citation_graph(store)
    save_graph(graph, tmp_path / "g.json")
    loaded = load_graph(tmp_path / "g.json")
    assert loaded.nodes == graph.nodes
    assert loaded.out_edges == graph.out_edges
    assert loaded.dangling_count == graph.dangling_count


def test_graph_load_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "other"}', encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        load_graph(path)
    with pytest.raises(CorpusFormatError):
        load_graph(tmp_path / "missing.json")
