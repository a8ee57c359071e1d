"""Job execution: a FIFO queue drained by a bounded worker pool, with the
model held as an immutable snapshot that checkpoint loads swap atomically.
In-flight jobs keep the snapshot they started with."""

from __future__ import annotations

import base64
import io
import json
import hashlib
import logging
import queue
import random
import threading
import time
import uuid
from pathlib import Path

import numpy as np
from PIL import Image

from ..checkpoint import CheckpointError, load_model
from ..pair_codec import ConditionPair, SketchMap, TextPrompt
from .config import ServiceConfig
from .store import DONE, FAILED, PENDING, RUNNING, RunStore

log = logging.getLogger(__name__)


class ModelNotLoaded(RuntimeError):
    pass


class UnknownCheckpoint(KeyError):
    pass


def request_digest(request: dict) -> str:
    """Stable digest of the canonicalized request JSON (key order free)."""
    return hashlib.sha256(json.dumps(request, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def decode_sketch(b64_png: str) -> SketchMap:
    raw = base64.b64decode(b64_png, validate=True)
    arr = np.asarray(Image.open(io.BytesIO(raw)).convert("L"))
    return SketchMap((arr >= 128).astype(np.uint8))


def encode_png(image_hwc: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image_hwc).save(buf, format="PNG")
    return buf.getvalue()


class GenerationRunner:
    def __init__(self, config: ServiceConfig, store: RunStore):
        self.config = config
        self.store = store
        self.checkpoint_dir = Path(config.checkpoint_dir)
        self.queue: queue.Queue = queue.Queue()
        self._model = None
        self._model_id: str | None = None
        self._swap_lock = threading.Lock()
        self._workers: list[threading.Thread] = []
        self._stop = threading.Event()
        self._seed_rng = random.Random()

    # -- model management ---------------------------------------------------

    @property
    def model_loaded(self) -> bool:
        return self._model is not None

    @property
    def active_checkpoint(self) -> str | None:
        return self._model_id

    def list_checkpoints(self) -> list[dict]:
        self.checkpoint_dir.mkdir(parents=True, exist_ok=True)
        out = []
        for path in sorted(self.checkpoint_dir.glob("*.npz")):
            out.append({"id": path.stem, "active": path.stem == self._model_id})
        return out

    def load(self, checkpoint_id: str) -> str:
        """Swap in a checkpoint; on any load error the previous model stays."""
        path = self.checkpoint_dir / f"{checkpoint_id}.npz"
        if not path.exists():
            raise UnknownCheckpoint(checkpoint_id)
        model, _meta = load_model(path)  # CheckpointError propagates, old model retained
        model.eval()
        with self._swap_lock:
            self._model = model
            self._model_id = checkpoint_id
        log.info("activated checkpoint %s", checkpoint_id)
        return checkpoint_id

    def _snapshot(self):
        with self._swap_lock:
            return self._model, self._model_id

    # -- job lifecycle ------------------------------------------------------

    def start(self) -> None:
        if self._workers:
            return
        self._stop.clear()
        for i in range(max(self.config.workers, 1)):
            t = threading.Thread(target=self._work, name=f"lots-worker-{i}", daemon=True)
            t.start()
            self._workers.append(t)
        if self.config.autoload:
            try:
                self.load(self.config.autoload)
            except (UnknownCheckpoint, CheckpointError) as exc:
                log.warning("autoload of %r failed: %s", self.config.autoload, exc)

    def stop(self) -> None:
        self._stop.set()
        for _ in self._workers:
            self.queue.put(None)
        for t in self._workers:
            t.join(timeout=5)
        self._workers.clear()

    def submit(self, request: dict) -> str:
        if not self.model_loaded:
            raise ModelNotLoaded("no checkpoint loaded")
        run_id = uuid.uuid4().hex
        seed = request.get("seed")
        if seed is None:
            seed = self._seed_rng.randrange(2**31)
        entry = {
            "run_id": run_id,
            "status": PENDING,
            "request": request,
            "digest": request_digest(request),
            "seed": int(seed),
            "checkpoint_id": self._model_id,
            "created_at": time.time(),
        }
        self.store.append(entry)
        self.queue.put(run_id)
        return run_id

    def _work(self) -> None:
        while not self._stop.is_set():
            run_id = self.queue.get()
            if run_id is None:
                return
            run = self.store.get(run_id)
            if run is None:
                continue
            model, model_id = self._snapshot()
            started = time.time()
            self.store.append({"run_id": run_id, "status": RUNNING, "started_at": started, "checkpoint_id": model_id})
            try:
                image_bytes = self._generate(model, run["request"], run["seed"])
                digest = self.store.save_image(image_bytes)
                self.store.append(
                    {
                        "run_id": run_id,
                        "status": DONE,
                        "image": digest,
                        "finished_at": time.time(),
                        "duration_s": round(time.time() - started, 4),
                    }
                )
            except Exception as exc:  # noqa: BLE001 - job failures become run state
                log.exception("run %s failed", run_id)
                self.store.append(
                    {"run_id": run_id, "status": FAILED, "error": str(exc), "finished_at": time.time()}
                )

    def _generate(self, model, request: dict, seed: int) -> bytes:
        if model is None:
            raise ModelNotLoaded("model unloaded before the job ran")
        pairs = [
            ConditionPair(sketch=decode_sketch(p["sketch"]), text=TextPrompt(p["text"]))
            for p in request.get("pairs", [])
        ]
        result = model.sample(
            pairs=pairs,
            global_text=request.get("global_text"),
            steps=int(request.get("steps") or self.config.default_steps),
            alpha=float(request["alpha"]) if request.get("alpha") is not None else self.config.default_alpha,
            seed=seed,
        )
        return encode_png(result.to_uint8())
