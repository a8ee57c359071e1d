"""HTTP surface of the generation service.

POST /generate enqueues a sampling job; GET /runs/{id} returns its record
(with the image inline, base64, once done); checkpoints list and hot-swap
under /checkpoints.  Validation errors carry the offending field path."""

from __future__ import annotations

import base64
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from ..checkpoint import CheckpointError
from .config import ServiceConfig
from .runner import GenerationRunner, ModelNotLoaded, UnknownCheckpoint, decode_sketch
from .store import DONE, RunStore


class PairPayload(BaseModel):
    sketch: str = Field(description="base64-encoded grayscale PNG")
    text: str = Field(min_length=1)


class GenerationPayload(BaseModel):
    global_text: Optional[str] = None
    pairs: list[PairPayload] = Field(default_factory=list)
    alpha: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    steps: Optional[int] = Field(default=None, ge=1, le=1000)
    seed: Optional[int] = None


def _json_error(status: int, loc: list, msg: str):
    raise HTTPException(status_code=status, detail=[{"loc": loc, "msg": msg, "type": "value_error"}])


def create_app(config: ServiceConfig | None = None, runner: GenerationRunner | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = runner.store if runner else RunStore(config.data_dir)
    runner = runner or GenerationRunner(config, store)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        runner.start()
        yield
        runner.stop()

    app = FastAPI(title="lots studio service", version="1", lifespan=lifespan)
    app.state.runner = runner
    app.state.config = config

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "model_loaded": runner.model_loaded,
            "active_checkpoint": runner.active_checkpoint,
            "queue_depth": runner.queue.qsize(),
        }

    @app.post("/generate", status_code=202)
    def generate(payload: GenerationPayload) -> dict:
        if len(payload.pairs) > config.max_pairs:
            _json_error(422, ["body", "pairs"], f"at most {config.max_pairs} pairs supported")
        for i, pair in enumerate(payload.pairs):
            try:
                decode_sketch(pair.sketch)
            except Exception:  # noqa: BLE001 - surfaced as a field error
                _json_error(422, ["body", "pairs", i, "sketch"], "not a decodable base64 PNG")
        try:
            run_id = runner.submit(payload.model_dump())
        except ModelNotLoaded as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        record = runner.store.get(run_id) or {}
        return {"run_id": run_id, "status": record.get("status"), "digest": record.get("digest")}

    @app.get("/runs")
    def list_runs() -> dict:
        runs = runner.store.list_runs()
        for r in runs:
            r.pop("request", None)
        return {"runs": runs}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str) -> dict:
        record = runner.store.get(run_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        if record.get("status") == DONE and record.get("image"):
            record["image_base64"] = base64.b64encode(runner.store.load_image(record["image"])).decode()
        return record

    @app.get("/runs/{run_id}/image")
    def get_run_image(run_id: str) -> Response:
        record = runner.store.get(run_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        if record.get("status") != DONE or not record.get("image"):
            raise HTTPException(status_code=404, detail=f"run {run_id} has no image (status {record.get('status')})")
        return Response(content=runner.store.load_image(record["image"]), media_type="image/png")

    @app.get("/checkpoints")
    def list_checkpoints() -> dict:
        return {"checkpoints": runner.list_checkpoints(), "active": runner.active_checkpoint}

    @app.post("/checkpoints/{checkpoint_id}/load")
    def load_checkpoint(checkpoint_id: str) -> dict:
        try:
            active = runner.load(checkpoint_id)
        except UnknownCheckpoint as exc:
            raise HTTPException(status_code=404, detail=f"unknown checkpoint {checkpoint_id}") from exc
        except CheckpointError as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": str(exc), "active": runner.active_checkpoint},
            ) from exc
        return {"active": active}

    return app
