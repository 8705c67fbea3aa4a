"""Graded-judgment evaluation of ranked runs: P@k and nDCG@k, reports.

Qrels lines are "topic-id 0 doc-id grade" with grades on the 0..4 scale
(4 highly relevant ... 0 not relevant). Runs are "topic-id Q0 doc-id rank
score run-tag". A document with grade >= 1 counts as relevant for P@k;
unjudged retrieved documents count as grade 0; a topic judged in the qrels
but missing from a run scores 0 with a warning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import QrelsFormatError, RunFormatError
from .fileio import atomic_write

log = logging.getLogger(__name__)

METRICS = ("P@5", "P@10", "P@20", "nDCG@10")


@dataclass
class Qrels:
    judgments: dict[tuple[str, str], int] = field(default_factory=dict)

    def topics(self) -> list[str]:
        return sorted({topic for topic, _ in self.judgments})

    def grades(self, topic: str) -> dict[str, int]:
        return {
            doc: grade for (t, doc), grade in self.judgments.items() if t == topic
        }

    def grade(self, topic: str, doc_id: str) -> int:
        return self.judgments.get((topic, doc_id), 0)


@dataclass
class RunFile:
    run_tag: str
    topics: dict[str, list[tuple[str, int, float]]] = field(default_factory=dict)

    def ranked_docs(self, topic: str) -> list[str]:
        return [doc for doc, _, _ in self.topics.get(topic, [])]


@dataclass
class MetricReport:
    run_tags: list[str]
    topics: list[str]
    per_topic: dict[tuple[str, str], dict[str, float]]  # (run_tag, metric) -> topic -> value
    means: dict[tuple[str, str], float]


def load_qrels(path: str | Path) -> Qrels:
    qrels = Qrels()
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise QrelsFormatError(f"cannot read qrels file {path}: {exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 4:
                raise QrelsFormatError(
                    f"{path}:{line_no}: expected 'topic 0 doc grade', got {len(fields)} fields"
                )
            topic, _, doc_id, grade_text = fields
            try:
                grade = int(grade_text)
            except ValueError:
                raise QrelsFormatError(
                    f"{path}:{line_no}: grade {grade_text!r} is not an integer"
                ) from None
            if not 0 <= grade <= 4:
                raise QrelsFormatError(
                    f"{path}:{line_no}: grade {grade} outside the 0..4 scale"
                )
            if (topic, doc_id) in qrels.judgments:
                raise QrelsFormatError(
                    f"{path}:{line_no}: duplicate judgment for topic {topic} doc {doc_id}"
                )
            qrels.judgments[(topic, doc_id)] = grade
    return qrels


def precision_at_k(
    ranked_docs: Sequence[str], qrels: Qrels, topic: str, k: int
) -> float:
    """Fraction of the top k that is judged relevant (grade >= 1).

    Fewer than k retrieved documents leaves the divisor at k, so missing
    slots count as non-relevant.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = sum(1 for doc in ranked_docs[:k] if qrels.grade(topic, doc) >= 1)
    return hits / k


def ndcg_at_k(ranked_docs: Sequence[str], qrels: Qrels, topic: str, k: int) -> float:
    """Exponential-gain nDCG: gain 2^g - 1, discount log2(rank + 1)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    dcg = 0.0
    for i, doc in enumerate(ranked_docs[:k], start=1):
        grade = qrels.grade(topic, doc)
        if grade:
            dcg += (2.0 ** grade - 1.0) / math.log2(i + 1)
    ideal = sorted(qrels.grades(topic).values(), reverse=True)[:k]
    idcg = sum(
        (2.0 ** g - 1.0) / math.log2(i + 1) for i, g in enumerate(ideal, start=1) if g
    )
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def evaluate_runs(runs: Sequence[RunFile], qrels: Qrels) -> MetricReport:
    """All four metrics, per topic and mean, for every run.

    Evaluated topics are exactly those present in the qrels.
    """
    if not runs:
        raise ValueError("at least one run is required")
    topics = qrels.topics()
    per_topic: dict[tuple[str, str], dict[str, float]] = {}
    means: dict[tuple[str, str], float] = {}
    for run in runs:
        for metric in METRICS:
            per_topic[(run.run_tag, metric)] = {}
        for topic in topics:
            if topic not in run.topics:
                log.warning(
                    "run %r has no results for topic %s; scoring 0", run.run_tag, topic
                )
            docs = run.ranked_docs(topic)
            values = {
                "P@5": precision_at_k(docs, qrels, topic, 5),
                "P@10": precision_at_k(docs, qrels, topic, 10),
                "P@20": precision_at_k(docs, qrels, topic, 20),
                "nDCG@10": ndcg_at_k(docs, qrels, topic, 10),
            }
            for metric, value in values.items():
                per_topic[(run.run_tag, metric)][topic] = value
        for metric in METRICS:
            col = per_topic[(run.run_tag, metric)]
            means[(run.run_tag, metric)] = (
                sum(col.values()) / len(col) if col else 0.0
            )
    return MetricReport(
        run_tags=[run.run_tag for run in runs],
        topics=topics,
        per_topic=per_topic,
        means=means,
    )


def write_run(
    results: Sequence[tuple[str, Sequence[tuple[str, float]]]],
    run_tag: str,
    path: str | Path,
) -> None:
    """Write '<topic> Q0 <doc> <rank> <score> <tag>' lines, ranks from 1."""
    with atomic_write(path) as handle:
        for topic, entries in results:
            for rank, (doc_id, score) in enumerate(entries, start=1):
                handle.write(f"{topic} Q0 {doc_id} {rank} {score!r} {run_tag}\n")


def load_run(path: str | Path) -> RunFile:
    """Parse and validate a run file (consecutive ranks, non-increasing scores)."""
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise RunFormatError(f"cannot read run file {path}: {exc}") from exc
    run_tag = ""
    topics: dict[str, list[tuple[str, int, float]]] = {}
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 6:
                raise RunFormatError(
                    f"{path}:{line_no}: expected 'topic Q0 doc rank score tag', "
                    f"got {len(fields)} fields"
                )
            topic, _, doc_id, rank_text, score_text, tag = fields
            try:
                rank = int(rank_text)
                score = float(score_text)
            except ValueError:
                raise RunFormatError(
                    f"{path}:{line_no}: bad rank/score {rank_text!r} {score_text!r}"
                ) from None
            if not run_tag:
                run_tag = tag
            elif tag != run_tag:
                raise RunFormatError(
                    f"{path}:{line_no}: mixed run tags {run_tag!r} and {tag!r}"
                )
            entries = topics.setdefault(topic, [])
            if rank != len(entries) + 1:
                raise RunFormatError(
                    f"{path}:{line_no}: rank {rank} not consecutive for topic {topic}"
                )
            if entries and score > entries[-1][2]:
                raise RunFormatError(
                    f"{path}:{line_no}: score increases with rank for topic {topic}"
                )
            entries.append((doc_id, rank, score))
    if not run_tag:
        run_tag = Path(path).stem
    return RunFile(run_tag=run_tag, topics=topics)


def report_csv_lines(report: MetricReport, header_items: Sequence[tuple[str, object]]) -> list[str]:
    """CSV rows (run_tag, metric, topic, value) with '#' provenance header."""
    lines = [f"# {key} = {value}" for key, value in header_items]
    lines.append("run_tag,metric,topic,value")
    for run_tag in report.run_tags:
        for metric in METRICS:
            col = report.per_topic[(run_tag, metric)]
            for topic in report.topics:
                lines.append(f"{run_tag},{metric},{topic},{col[topic]!r}")
            lines.append(f"{run_tag},{metric},ALL,{report.means[(run_tag, metric)]!r}")
    return lines


def format_report_table(
    report: MetricReport, header_items: Sequence[tuple[str, object]]
) -> str:
    """Human-readable mean-per-run table with the same provenance header."""
    lines = [f"# {key} = {value}" for key, value in header_items]
    width = max((len(tag) for tag in report.run_tags), default=3)
    width = max(width, len("run"))
    header = "  ".join([f"{'run':<{width}}"] + [f"{m:>8}" for m in METRICS])
    lines.append(header)
    lines.append("-" * len(header))
    for run_tag in report.run_tags:
        cells = [f"{report.means[(run_tag, metric)]:>8.4f}" for metric in METRICS]
        lines.append("  ".join([f"{run_tag:<{width}}"] + cells))
    return "\n".join(lines)
