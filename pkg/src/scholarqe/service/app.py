"""FastAPI application exposing the engine over HTTP.

Artifacts load lazily on first use and stay resident, so one long-running
process serves many search/expand requests. Build and train mutate engine
state and are serialized behind a lock; loaded state is immutable and read
concurrently.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import AppConfig, apply_overrides
from ..engine import SearchEngine
from ..errors import DataError
from ..evaluation import METRICS
from . import schemas


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="scholarqe", version=__version__)
    engine = SearchEngine(config)
    lock = threading.Lock()
    app.state.engine = engine

    @app.exception_handler(DataError)
    async def data_error_handler(_request: Request, exc: DataError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(version=__version__)

    @app.get("/stats", response_model=schemas.StatsResponse)
    def stats() -> schemas.StatsResponse:
        with lock:
            return schemas.StatsResponse(**engine.stats())

    @app.post("/index", response_model=schemas.IndexResponse)
    def build_index(request: schemas.IndexRequest) -> schemas.IndexResponse:
        with lock:
            if request.corpus_path is not None:
                engine.config = apply_overrides(engine.config,
                                                corpus_path=request.corpus_path)
            result = engine.build()
        return schemas.IndexResponse(**result.__dict__)

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(request: schemas.TrainRequest) -> schemas.TrainResponse:
        with lock:
            result = engine.train(seed=request.seed)
        return schemas.TrainResponse(**result.__dict__)

    @app.post("/search", response_model=schemas.SearchResponse)
    def search(request: schemas.SearchRequest) -> schemas.SearchResponse:
        with lock:
            engine.ensure_loaded()
        hits = engine.search(request.query, mode=request.mode, depth=request.depth)
        return schemas.SearchResponse(
            query=request.query,
            mode=request.mode,
            hits=[schemas.SearchHitOut(**hit.__dict__) for hit in hits],
        )

    @app.post("/expand", response_model=schemas.ExpandResponse)
    def expand(request: schemas.ExpandRequest) -> schemas.ExpandResponse:
        with lock:
            engine.ensure_loaded()
        audit = engine.expand(request.query,
                              include_citations=request.include_citations)
        return schemas.ExpandResponse(**audit)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(request: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        with lock:
            engine.ensure_loaded()
            result = engine.evaluate(extra_run_paths=request.run_paths,
                                     output_dir=request.output_dir)
        rows = []
        for run_tag in result.report.run_tags:
            for metric in METRICS:
                col = result.report.per_topic[(run_tag, metric)]
                for topic in result.report.topics:
                    rows.append(schemas.MetricRow(run_tag=run_tag, metric=metric,
                                                  topic=topic, value=col[topic]))
                rows.append(schemas.MetricRow(
                    run_tag=run_tag, metric=metric, topic="ALL",
                    value=result.report.means[(run_tag, metric)],
                ))
        return schemas.EvaluateResponse(csv_path=result.csv_path,
                                        run_paths=result.run_paths,
                                        table=result.table, rows=rows)

    return app
