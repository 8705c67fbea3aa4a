"""Shared fixtures: corpus builders, random corpora, and the planted workspace."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from scholarqe.corpus import DocumentStore, parse_corpus


def write_corpus(path: Path, docs: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(doc) + "\n")
    return path


def make_store(tmp_path: Path, docs: list[dict], name: str = "corpus.jsonl") -> DocumentStore:
    return parse_corpus(write_corpus(tmp_path / name, docs))


def random_vocabulary(rng: random.Random, size: int) -> list[str]:
    consonants = "bcdfghjklmnpqrstvwz"
    vowels = "aeiou"
    vocab = set()
    while len(vocab) < size:
        n = rng.randint(2, 4)
        word = "".join(
            rng.choice(consonants) + rng.choice(vowels) for _ in range(n)
        )
        vocab.add(word)
    return sorted(vocab)


def random_corpus(
    rng: random.Random,
    n_docs: int,
    vocab_size: int,
    max_doc_terms: int = 30,
    cite_prob: float = 0.3,
) -> list[dict]:
    vocab = random_vocabulary(rng, vocab_size)
    doc_ids = [f"D{i:04d}" for i in range(n_docs)]
    docs = []
    for i, doc_id in enumerate(doc_ids):
        n_title = rng.randint(1, 4)
        n_abstract = rng.randint(1, max_doc_terms)
        title = " ".join(rng.choice(vocab) for _ in range(n_title))
        abstract = " ".join(rng.choice(vocab) for _ in range(n_abstract))
        references = [
            other for other in rng.sample(doc_ids, min(4, n_docs))
            if other != doc_id and rng.random() < cite_prob
        ]
        docs.append({
            "id": doc_id, "title": title, "abstract": abstract,
            "references": references, "venue": rng.choice(["A", "B", "C"]),
            "year": rng.randint(1990, 2021),
        })
    return docs


# --- planted end-to-end scenario --------------------------------------------
#
# Designed before the pipeline was built:
#   * query vocabulary:      zork, vint  (all planted words are stemmer fixed
#     points, so surface forms and analyzed terms coincide)
#   * expansion vocabulary:  gleeb, fronx
#   * relevant targets R1-R3 contain ONLY expansion vocabulary, so plain BM25
#     can never retrieve them for the query
#   * PRF docs P1-P4 score highest on the query and cite R1-R3
#   * distractors D1-D10 carry one query term each plus out-of-vocabulary
#     noise terms (murt, plon), keeping query-term document frequencies
#     symmetric
#   * the planted embedding file makes gleeb/fronx cosine-close to both query
#     terms, so citation-sourced candidates win the expansion

PLANTED_QUERY = "zork vint"
PLANTED_RELEVANT = ("R1", "R2", "R3")
PLANTED_EMBEDDINGS = """4 4
zork 1.0 0.0 0.0 0.0
vint 0.0 1.0 0.0 0.0
gleeb 0.9 0.9 0.1 0.0
fronx 0.8 0.85 0.0 0.1
"""


def planted_docs() -> list[dict]:
    docs = []
    cited = {"P1": ["R1"], "P2": ["R2"], "P3": ["R3"], "P4": []}
    for pid in ("P1", "P2", "P3", "P4"):
        docs.append({
            "id": pid, "title": "zork vint", "abstract": "zork vint zork",
            "references": cited[pid], "venue": "V1", "year": 2020,
        })
    for rid in PLANTED_RELEVANT:
        docs.append({
            "id": rid, "title": "gleeb fronx", "abstract": "gleeb fronx gleeb",
            "references": [], "venue": "V2", "year": 2019,
        })
    for i in range(1, 6):
        docs.append({
            "id": f"D{i}", "title": "zork murt", "abstract": "murt plon murt",
            "references": [], "venue": "V3", "year": 2018,
        })
    for i in range(6, 11):
        docs.append({
            "id": f"D{i}", "title": "vint plon", "abstract": "plon murt plon",
            "references": [], "venue": "V3", "year": 2018,
        })
    return docs


@pytest.fixture(scope="session")
def planted_workspace(tmp_path_factory) -> Path:
    """Workspace with the planted corpus, embeddings, qrels, topics, config."""
    root = tmp_path_factory.mktemp("planted")
    write_corpus(root / "corpus.jsonl", planted_docs())
    (root / "vectors.txt").write_text(PLANTED_EMBEDDINGS, encoding="utf-8")
    (root / "topics.tsv").write_text(f"1\t{PLANTED_QUERY}\n", encoding="utf-8")
    (root / "qrels.txt").write_text(
        "1 0 R1 4\n1 0 R2 4\n1 0 R3 3\n", encoding="utf-8"
    )
    (root / "scholarqe.conf").write_text(
        "corpus_path = corpus.jsonl\n"
        "index_path = index.sqe\n"
        "embeddings_path = vectors.txt\n"
        "qrels_path = qrels.txt\n"
        "topics_path = topics.tsv\n"
        "output_dir = runs\n",
        encoding="utf-8",
    )
    return root
