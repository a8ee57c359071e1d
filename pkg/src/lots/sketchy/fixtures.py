"""Synthetic corpora: colored-rectangle garments with known masks and
attributes.  Everything the pipeline and trainer tests need runs from these
generators, with no external dataset download."""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np
from PIL import Image

from ..config import DEFAULT_GLOBAL_TEXT
from ..pair_codec import ConditionPair, SketchMap, TextPrompt
from .hierarchy import GARMENT_PART, WHOLE_BODY, AnnotationSet, GarmentAnnotation

PALETTE = {
    "red": (200, 40, 40),
    "blue": (40, 70, 200),
    "green": (40, 160, 70),
    "black": (25, 25, 25),
    "yellow": (220, 200, 50),
    "purple": (130, 50, 160),
}
MATERIALS = ["cotton", "wool", "denim", "silk", "linen"]
PART_ATTRS = ["wide", "deep", "large", "small", "tapered", "ruffled", "subtle"]
ITEM_POOL = ["shirt", "jacket", "skirt", "dress", "coat", "pants", "vest", "top"]
PART_POOL = ["sleeve", "collar", "pocket", "hem", "neckline", "zipper", "bow"]
REMOVED_POOL = ["bag", "hat", "glasses"]

BACKGROUND = 235


def _rect_mask(h: int, w: int, y0: int, x0: int, y1: int, x1: int) -> np.ndarray:
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[y0:y1, x0:x1] = 1
    return mask


def make_scene(rng: random.Random, size: int = 64) -> tuple[np.ndarray, AnnotationSet, str]:
    """One synthetic image: 2-3 whole-body rectangles plus 0-3 parts that
    overlap them, occasionally a free-floating or dropped-category part."""
    image = np.full((size, size, 3), BACKGROUND, dtype=np.uint8)
    items: list[GarmentAnnotation] = []
    colors = rng.sample(list(PALETTE), k=3)

    for i in range(rng.randint(2, 3)):
        side_h = rng.randint(16, 28)
        side_w = rng.randint(16, 28)
        y0 = rng.randint(0, size - side_h)
        x0 = rng.randint(0, size - side_w)
        mask = _rect_mask(size, size, y0, x0, y0 + side_h, x0 + side_w)
        color = colors[i]
        image[mask.astype(bool)] = PALETTE[color]
        items.append(
            GarmentAnnotation(
                category=rng.choice(ITEM_POOL),
                level=WHOLE_BODY,
                attributes=[color, rng.choice(MATERIALS)],
                mask=mask,
            )
        )

    parts: list[GarmentAnnotation] = []
    for _ in range(rng.randint(0, 3)):
        roll = rng.random()
        if roll < 0.15:  # free-floating: lands in a corner away from items
            mask = _rect_mask(size, size, 0, 0, rng.randint(3, 6), rng.randint(3, 6))
            occupied = np.zeros((size, size), dtype=bool)
            for item in items:
                occupied |= item.mask.astype(bool)
            mask[occupied] = 0
            if not mask.any():
                continue
            category = rng.choice(PART_POOL)
        elif roll < 0.3:  # dropped category, overlapping or not
            host = rng.choice(items)
            ys, xs = np.nonzero(host.mask)
            cy, cx = int(ys[0]), int(xs[0])
            mask = _rect_mask(size, size, cy, cx, min(cy + 8, size), min(cx + 8, size))
            category = rng.choice(REMOVED_POOL)
        else:  # anchored inside one item, possibly straddling a second
            host = rng.choice(items)
            ys, xs = np.nonzero(host.mask)
            k = rng.randrange(len(ys))
            cy, cx = int(ys[k]), int(xs[k])
            side = rng.randint(5, 11)
            mask = _rect_mask(size, size, cy, cx, min(cy + side, size), min(cx + side, size))
            category = rng.choice(PART_POOL)
        shade = tuple(max(c - 60, 0) for c in PALETTE[rng.choice(list(PALETTE))])
        image[mask.astype(bool)] = shade
        parts.append(
            GarmentAnnotation(
                category=category,
                level=GARMENT_PART,
                attributes=[rng.choice(PART_ATTRS)],
                mask=mask,
            )
        )

    image_id = f"scene_{rng.randrange(16**8):08x}"
    return image, AnnotationSet(image_id, items + parts), image_id


def make_corpus(root: str | Path, count: int = 10, seed: int = 0, size: int = 64) -> list[str]:
    """Write a `sketchy build`-compatible corpus: images/, annotations/ with
    per-image JSON and mask PNGs.  Returns the image ids."""
    root = Path(root)
    images_dir = root / "images"
    ann_dir = root / "annotations"
    masks_dir = ann_dir / "masks"
    for d in (images_dir, ann_dir, masks_dir):
        d.mkdir(parents=True, exist_ok=True)

    rng = random.Random(seed)
    ids: list[str] = []
    for n in range(count):
        image, ann, _ = make_scene(rng, size=size)
        image_id = f"img_{n:04d}"
        ids.append(image_id)
        Image.fromarray(image).save(images_dir / f"{image_id}.png")
        garments = []
        for i, a in enumerate(ann.items):
            mask_name = f"masks/{image_id}_{i}.png"
            Image.fromarray(a.mask * 255).save(ann_dir / mask_name)
            garments.append(
                {"category": a.category, "level": a.level, "attributes": a.attributes, "mask": mask_name}
            )
        (ann_dir / f"{image_id}.json").write_text(
            json.dumps({"image": f"{image_id}.png", "garments": garments}, indent=2)
        )
    return ids


def _outline(mask: np.ndarray) -> np.ndarray:
    """1-pixel boundary of a binary region (pixels with a zero 4-neighbour)."""
    padded = np.pad(mask, 1)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:] & mask
    )
    return (mask & ~interior).astype(np.uint8)


def make_training_samples(count: int = 16, size: int = 32, seed: int = 0):
    """Image/pair fixtures for trainer tests: rectangles with outline sketches
    and one-line texts."""
    from ..diffusion.trainer import TrainSample

    rng = random.Random(seed)
    samples = []
    for _ in range(count):
        image = np.full((size, size, 3), 250, dtype=np.uint8)
        pairs: list[ConditionPair] = []
        for _ in range(rng.randint(1, 2)):
            side = rng.randint(size // 4, size // 2)
            y0 = rng.randint(0, size - side)
            x0 = rng.randint(0, size - side)
            color = rng.choice(list(PALETTE))
            mask = _rect_mask(size, size, y0, x0, y0 + side, x0 + side)
            image[mask.astype(bool)] = PALETTE[color]
            pairs.append(
                ConditionPair(
                    sketch=SketchMap(_outline(mask)),
                    text=TextPrompt(f"a {color} {rng.choice(ITEM_POOL)}"),
                )
            )
        samples.append(TrainSample(image=image, pairs=pairs, global_text=DEFAULT_GLOBAL_TEXT))
    return samples
