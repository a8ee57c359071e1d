"""End-to-end dataset construction.

Reads per-image annotation JSON plus mask/image PNGs, assigns parts to
whole-body garments, renders descriptions and localized sketches on the
padded square canvas, and writes a versioned manifest.  Per-image work is
independent; output ordering is fixed by sorting image ids, so results do not
depend on scheduling."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .descriptions import (
    DescriptionBackend,
    LlmDescriptionBackend,
    RuleBasedClient,
    TemplateDescriptionBackend,
)
from .hierarchy import AnnotationSet, GarmentAnnotation, HierarchyError, assign_parts, build_cooccurrence
from .manifest import MAX_GARMENTS, DatasetRecord, GarmentRecord, build_manifest
from .preprocess import preprocess_image, preprocess_mask
from .sketches import EdgeSketchBackend, SketchBackend, SketchError, compose_global_sketch, generate_local_sketch, mask_bbox
from .taxonomy import DEFAULT_TAXONOMY, Taxonomy

log = logging.getLogger(__name__)


class BuildError(RuntimeError):
    pass


@dataclass
class BuildResult:
    out_dir: Path
    manifest_path: Path
    stats: dict


def load_annotation_set(json_path: Path, annotations_dir: Path) -> tuple[AnnotationSet, str]:
    data = json.loads(json_path.read_text())
    items = []
    for garment in data["garments"]:
        mask = np.asarray(Image.open(annotations_dir / garment["mask"]).convert("L"))
        items.append(
            GarmentAnnotation(
                category=garment["category"],
                level=garment["level"],
                attributes=list(garment.get("attributes", [])),
                mask=(mask >= 128).astype(np.uint8),
            )
        )
    return AnnotationSet(json_path.stem, items), data["image"]


def make_description_backend(name: str, llm_client=None) -> DescriptionBackend:
    if name == "template":
        return TemplateDescriptionBackend()
    if name == "llm":
        return LlmDescriptionBackend(llm_client or RuleBasedClient())
    raise BuildError(f"unknown description backend {name!r}")


def build_dataset(
    annotations_dir: str | Path,
    images_dir: str | Path,
    out_dir: str | Path,
    *,
    description_backend: DescriptionBackend | None = None,
    sketch_backend: SketchBackend | None = None,
    taxonomy: Taxonomy = DEFAULT_TAXONOMY,
    canvas_size: int = 512,
) -> BuildResult:
    annotations_dir = Path(annotations_dir)
    images_dir = Path(images_dir)
    out_dir = Path(out_dir)
    describer = description_backend or TemplateDescriptionBackend()
    sketcher = sketch_backend or EdgeSketchBackend()

    ann_files = sorted(annotations_dir.glob("*.json"))
    if not ann_files:
        log.warning("no annotation files under %s", annotations_dir)

    loaded: list[tuple[AnnotationSet, str]] = []
    for path in ann_files:
        try:
            loaded.append(load_annotation_set(path, annotations_dir))
        except Exception as exc:  # noqa: BLE001 - corrupt records are skipped, not fatal
            log.warning("skipping corrupt annotation %s: %s", path.name, exc)
    cooccurrence = build_cooccurrence([ann for ann, _ in loaded], taxonomy)

    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    records: list[DatasetRecord] = []
    skipped = 0
    for ann, image_rel in loaded:
        try:
            record = _build_record(
                ann, images_dir / image_rel, out_dir, describer, sketcher, taxonomy, cooccurrence, canvas_size
            )
        except (HierarchyError, SketchError, FileNotFoundError, OSError) as exc:
            log.warning("skipping %s: %s", ann.image_id, exc)
            skipped += 1
            continue
        records.append(record)

    manifest_path = out_dir / "manifest.json"
    stats = build_manifest(records, manifest_path, extra_skipped=skipped)
    return BuildResult(out_dir=out_dir, manifest_path=manifest_path, stats=stats)


def _build_record(
    ann: AnnotationSet,
    image_path: Path,
    out_dir: Path,
    describer: DescriptionBackend,
    sketcher: SketchBackend,
    taxonomy: Taxonomy,
    cooccurrence,
    canvas_size: int,
) -> DatasetRecord:
    image = np.asarray(Image.open(image_path).convert("RGB"))
    canvas = preprocess_image(image, canvas_size)
    hierarchy = assign_parts(ann, taxonomy, cooccurrence)
    if len(hierarchy.garments) > MAX_GARMENTS:
        raise HierarchyError(f"{len(hierarchy.garments)} garments exceed the max of {MAX_GARMENTS}")

    image_id = ann.image_id
    sketch_dir = out_dir / "sketches" / image_id
    mask_dir = out_dir / "masks" / image_id
    sketch_dir.mkdir(parents=True, exist_ok=True)
    mask_dir.mkdir(parents=True, exist_ok=True)

    garment_records: list[GarmentRecord] = []
    sketches = []
    for i, garment in enumerate(hierarchy.garments):
        region = preprocess_mask(garment.region, canvas_size)
        if not region.any():
            raise SketchError(f"garment {garment.category} lost its mask in preprocessing")
        sketch = generate_local_sketch(canvas, region, sketcher)
        sketches.append(sketch)
        described = describer.describe(garment)

        sketch_rel = f"sketches/{image_id}/garment_{i}.png"
        mask_rel = f"masks/{image_id}/garment_{i}.png"
        sketch.to_png(out_dir / sketch_rel)
        Image.fromarray(region * 255).save(out_dir / mask_rel)
        garment_records.append(
            GarmentRecord(
                category=garment.category,
                description=described.text,
                attributes=list(garment.attributes),
                parts=[{"name": p.name, "attributes": list(p.attributes)} for p in garment.parts],
                sketch_path=sketch_rel,
                mask_path=mask_rel,
                bbox=list(mask_bbox(region)),
                description_backend=described.backend,
                description_fallback=described.fallback,
            )
        )

    global_sketch = compose_global_sketch(sketches)
    image_rel = f"images/{image_id}.png"
    global_rel = f"sketches/{image_id}/global.png"
    Image.fromarray(canvas).save(out_dir / image_rel)
    global_sketch.to_png(out_dir / global_rel)
    return DatasetRecord(
        image_id=image_id,
        image_path=image_rel,
        global_sketch_path=global_rel,
        garments=garment_records,
    )
