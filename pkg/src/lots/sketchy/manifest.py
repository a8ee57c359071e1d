"""Dataset manifest: one JSON record per image with relative PNG paths and a
versioned header, plus corpus statistics."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
MAX_GARMENTS = 6


class ManifestError(ValueError):
    pass


@dataclass
class GarmentRecord:
    category: str
    description: str
    attributes: list[str]
    parts: list[dict] = field(default_factory=list)  # {"name": ..., "attributes": [...]}
    sketch_path: str = ""
    mask_path: str = ""
    bbox: list[int] = field(default_factory=list)  # y0, x0, y1, x1 on the square canvas
    description_backend: str = "template"
    description_fallback: bool = False


@dataclass
class DatasetRecord:
    image_id: str
    image_path: str
    global_sketch_path: str
    garments: list[GarmentRecord]

    @property
    def num_garments(self) -> int:
        return len(self.garments)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["num_garments"] = self.num_garments
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetRecord":
        return cls(
            image_id=d["image_id"],
            image_path=d["image_path"],
            global_sketch_path=d["global_sketch_path"],
            garments=[GarmentRecord(**{k: v for k, v in g.items()}) for g in d["garments"]],
        )


def corpus_stats(records: list[DatasetRecord]) -> dict:
    counts = [r.num_garments for r in records]
    words = [len(g.description.split()) for r in records for g in r.garments]
    fallbacks = sum(g.description_fallback for r in records for g in r.garments)
    return {
        "num_images": len(records),
        "num_garments": int(sum(counts)),
        "garments_per_image_mean": round(sum(counts) / len(counts), 4) if counts else 0.0,
        "garments_per_image_min": min(counts) if counts else 0,
        "garments_per_image_max": max(counts) if counts else 0,
        "description_words_mean": round(sum(words) / len(words), 4) if words else 0.0,
        "description_fallbacks": int(fallbacks),
    }


def build_manifest(records: list[DatasetRecord], path: str | Path, extra_skipped: int = 0) -> dict:
    """Validate, write, and return the statistics block.  Records violating
    the 1..6 garment bound are skipped and logged, not fatal."""
    kept: list[DatasetRecord] = []
    skipped = extra_skipped
    for r in records:
        if not 1 <= r.num_garments <= MAX_GARMENTS:
            log.warning("skipping %s: %d garments outside 1..%d", r.image_id, r.num_garments, MAX_GARMENTS)
            skipped += 1
            continue
        if any(not g.description.strip() for g in r.garments):
            log.warning("skipping %s: empty description", r.image_id)
            skipped += 1
            continue
        kept.append(r)
    stats = corpus_stats(kept)
    stats["skipped_records"] = skipped
    payload = {
        "version": MANIFEST_VERSION,
        "stats": stats,
        "records": [r.as_dict() for r in kept],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2))
    return stats


def read_manifest(path: str | Path) -> tuple[list[DatasetRecord], dict]:
    data = json.loads(Path(path).read_text())
    version = data.get("version")
    if version != MANIFEST_VERSION:
        raise ManifestError(f"unsupported manifest version {version!r}")
    records = []
    for entry in data["records"]:
        entry = dict(entry)
        entry.pop("num_garments", None)
        records.append(DatasetRecord.from_dict(entry))
    return records, data.get("stats", {})
