"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class StatsResponse(BaseModel):
    documents: int
    citation_edges: int
    dangling_references: int
    venues: int
    vocabulary_size: int
    avg_doc_len: float
    embeddings_loaded: bool
    embedding_dimension: Optional[int] = None


class IndexRequest(BaseModel):
    corpus_path: Optional[str] = Field(None, description="Override the configured corpus path")


class IndexResponse(BaseModel):
    documents: int
    citation_edges: int
    dangling_references: int
    venues: int
    vocabulary_size: int
    avg_doc_len: float
    index_path: str
    graph_path: str


class TrainRequest(BaseModel):
    seed: Optional[int] = Field(None, description="Override the configured RNG seed")


class TrainResponse(BaseModel):
    vocabulary_size: int
    dimension: int
    embeddings_path: str


class SearchRequest(BaseModel):
    query: str
    mode: Literal["baseline", "qe"] = "qe"
    depth: Optional[int] = Field(None, ge=1)


class SearchHitOut(BaseModel):
    rank: int
    doc_id: str
    score: float
    title: str


class SearchResponse(BaseModel):
    query: str
    mode: str
    hits: list[SearchHitOut]


class ExpandRequest(BaseModel):
    query: str
    include_citations: Optional[bool] = None


class ExpansionTermOut(BaseModel):
    term: str
    f: int
    sim: float
    weight: float


class ExpandResponse(BaseModel):
    query: str
    original_terms: list[str]
    expansion_terms: list[ExpansionTermOut]
    prf_docs: list[str]
    cited_docs: list[str]


class EvaluateRequest(BaseModel):
    run_paths: list[str] = Field(default_factory=list,
                                 description="Extra run files to score alongside")
    output_dir: Optional[str] = None


class MetricRow(BaseModel):
    run_tag: str
    metric: str
    topic: str
    value: float


class EvaluateResponse(BaseModel):
    csv_path: str
    run_paths: list[str]
    table: str
    rows: list[MetricRow]
