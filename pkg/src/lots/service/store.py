"""Run persistence: an append-only JSONL log plus a content-addressed image
store.  Completion is durable before it becomes visible — the log line is
flushed to disk first, then the in-memory view updates."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path

PENDING, RUNNING, DONE, FAILED, INTERRUPTED = "pending", "running", "done", "failed", "interrupted"


class StoreError(RuntimeError):
    pass


class RunStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.images_dir = self.data_dir / "images"
        self.images_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "runs.jsonl"
        self._lock = threading.Lock()
        self._runs: dict[str, dict] = {}
        self._order: list[str] = []
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        with open(self.log_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn tail write from a crash; later entries rewrite state
                self._merge(entry)
        # runs that never completed before a restart cannot resume: their queue
        # entries died with the process
        for run in self._runs.values():
            if run.get("status") in (PENDING, RUNNING):
                run["status"] = INTERRUPTED

    def _merge(self, entry: dict) -> None:
        run_id = entry["run_id"]
        if run_id not in self._runs:
            self._runs[run_id] = {}
            self._order.append(run_id)
        self._runs[run_id].update(entry)

    def append(self, entry: dict) -> None:
        """Durably log a state transition, then publish it."""
        entry = {**entry, "logged_at": time.time()}
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            with open(self.log_path, "a") as fh:
                fh.write(line + "\n")
                fh.flush()
            self._merge(entry)

    def get(self, run_id: str) -> dict | None:
        with self._lock:
            run = self._runs.get(run_id)
            return dict(run) if run else None

    def list_runs(self) -> list[dict]:
        with self._lock:
            return [dict(self._runs[rid]) for rid in reversed(self._order)]

    def save_image(self, png_bytes: bytes) -> str:
        digest = hashlib.sha256(png_bytes).hexdigest()
        path = self.images_dir / f"{digest}.png"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(png_bytes)
            tmp.replace(path)
        return digest

    def load_image(self, digest: str) -> bytes:
        path = self.images_dir / f"{digest}.png"
        if not path.exists():
            raise StoreError(f"no stored image {digest}")
        return path.read_bytes()
