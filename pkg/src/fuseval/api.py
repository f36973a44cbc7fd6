"""HTTP/JSON facade over the store and the experiment engine.

Handlers are thin delegations: no evaluation logic lives here. Execution is
asynchronous with polling; POST execute returns a job handle immediately and
results become visible per spec as they complete. Every experiment response
includes the materialized split so clients can display the consistency
guarantee.

Routes:
    GET  /api/datasets
    POST /api/datasets
    GET  /api/algorithms
    GET  /api/metrics
    POST /api/experiments
    GET  /api/experiments/{id}
    POST /api/experiments/{id}/execute
    POST /api/experiments/{id}/fusions
    GET  /api/experiments/{id}/results
    GET  /api/experiments/{id}/export?format=latex|trec|csv|bundle
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import engine, export
from .errors import (
    AllWeightsZero,
    DuplicateSpec,
    FusevalError,
    InvalidFusionParams,
    KTooLarge,
    MissingWeight,
    NotFound,
    OverlappingSplit,
    StoreLocked,
    UnknownAlgorithm,
    UnknownMetric,
    UnknownTopicInSplit,
)
from .store import Store, default_store_root

_FIELD_BY_ERROR = {
    OverlappingSplit: "split",
    UnknownTopicInSplit: "split",
    KTooLarge: "split",
    UnknownAlgorithm: "fusions",
    InvalidFusionParams: "fusions",
    MissingWeight: "fusions",
    AllWeightsZero: "fusions",
    UnknownMetric: "metrics",
}


def _error_response(exc: FusevalError) -> JSONResponse:
    if isinstance(exc, NotFound):
        return JSONResponse({"error": str(exc)}, status_code=404)
    if isinstance(exc, DuplicateSpec):
        return JSONResponse({"error": str(exc), "field": "fusions"}, status_code=409)
    if isinstance(exc, StoreLocked):
        return JSONResponse({"error": str(exc)}, status_code=503)
    field = next(
        (f for etype, f in _FIELD_BY_ERROR.items() if isinstance(exc, etype)), None
    )
    body = {"error": str(exc)}
    if field:
        body["field"] = field
    return JSONResponse(body, status_code=400)


def create_app(store_root: str | Path | None = None, static_dir: str | Path | None = None) -> FastAPI:
    store = Store(store_root or default_store_root())
    app = FastAPI(title="fuseval", version="0.1.0")
    execute_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def _lock_for(experiment_id: str) -> threading.Lock:
        with locks_guard:
            return execute_locks.setdefault(experiment_id, threading.Lock())

    @app.exception_handler(FusevalError)
    async def _handle(request: Request, exc: FusevalError):
        return _error_response(exc)

    # --- registries ---

    @app.get("/api/algorithms")
    def algorithms():
        from .fusion import ALGORITHMS

        return [a.as_dict() for a in ALGORITHMS.values()]

    @app.get("/api/metrics")
    def metrics():
        from .metrics import METRICS

        return [m.as_dict() for m in METRICS.values()]

    # --- datasets ---

    @app.get("/api/datasets")
    def list_datasets():
        return [d.as_dict() for d in store.list_datasets()]

    @app.post("/api/datasets", status_code=201)
    def create_dataset(body: dict):
        name = body.get("name", "")
        runs = body.get("runs", [])
        qrels = body.get("qrels", "")
        if not isinstance(runs, list) or not all(isinstance(r, str) for r in runs):
            return JSONResponse(
                {"error": "runs must be a list of TREC run file texts", "field": "runs"},
                status_code=400,
            )
        record = store.ingest_dataset(
            name=name, run_texts=runs, qrels_text=qrels,
            provenance=body.get("provenance", ""),
        )
        return record.as_dict()

    # --- experiments ---

    @app.post("/api/experiments", status_code=201)
    def create_experiment(body: dict):
        return engine.create_experiment(store, body)

    @app.get("/api/experiments")
    def list_experiments():
        return [
            {
                "experiment_id": r["experiment_id"],
                "dataset_id": r["dataset_id"],
                "status": r.get("status", "pending"),
                "created": r.get("created"),
                "split": r["split"],
                "fusions": [
                    {"label": f["label"], "status": f["status"]} for f in r["fusions"]
                ],
            }
            for r in store.list_experiments()
        ]

    @app.get("/api/experiments/{experiment_id}")
    def get_experiment(experiment_id: str):
        return store.get_experiment(experiment_id)

    @app.post("/api/experiments/{experiment_id}/execute", status_code=202)
    def execute(experiment_id: str):
        record = store.get_experiment(experiment_id)  # 404 before spawning
        if record.get("status") == "done":
            return {"experiment_id": experiment_id, "status": "done"}

        def work():
            with _lock_for(experiment_id):
                try:
                    engine.run_experiment(store, experiment_id)
                except FusevalError:
                    pass  # per-spec failures are recorded on the record itself

        threading.Thread(target=work, daemon=True).start()
        return {"experiment_id": experiment_id, "status": "running"}

    @app.post("/api/experiments/{experiment_id}/fusions", status_code=202)
    def add_fusion(experiment_id: str, body: dict):
        record = engine.add_fusion(store, experiment_id, body, execute=False)

        def work():
            with _lock_for(experiment_id):
                try:
                    engine.run_experiment(store, experiment_id)
                except FusevalError:
                    pass

        threading.Thread(target=work, daemon=True).start()
        return {
            "experiment_id": experiment_id,
            "status": "running",
            "fusions": [{"label": f["label"], "status": f["status"]} for f in record["fusions"]],
        }

    @app.get("/api/experiments/{experiment_id}/results")
    def results(experiment_id: str):
        record = store.get_experiment(experiment_id)
        return {
            "experiment_id": experiment_id,
            "status": record.get("status", "pending"),
            "split": record["split"],
            "baseline": record.get("baseline"),
            "fusions": [
                {"label": f["label"], "status": f["status"], "error": f.get("error")}
                for f in record["fusions"]
            ],
            "results": record.get("results"),
        }

    @app.get("/api/experiments/{experiment_id}/export")
    def export_experiment(experiment_id: str, format: str = "latex", spec: str | None = None):
        record = store.get_experiment(experiment_id)
        if format == "latex":
            return Response(export.export_latex(record), media_type="text/x-tex")
        if format == "trec":
            if spec is None:
                done = [f["label"] for f in record["fusions"] if f["status"] == "done"]
                if not done:
                    raise NotFound("no completed fusion specs to export")
                spec = done[0]
            return Response(export.export_trec_run(store, record, spec), media_type="text/plain")
        if format == "csv":
            return Response(export.export_csv_table(record), media_type="text/csv")
        if format == "bundle":
            return Response(
                export.export_bundle(store, record),
                media_type="application/zip",
                headers={"Content-Disposition": f"attachment; filename={experiment_id}.zip"},
            )
        return JSONResponse(
            {"error": f"unknown format {format!r}", "field": "format"}, status_code=400
        )

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
