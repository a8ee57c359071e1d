"""Garment hierarchy assembly from segmentation annotations.

Each part annotation attaches to the whole-body item whose mask it overlaps
the most (ties: larger item mask, then item category name).  Parts touching
nothing fall back to the whole-body category they co-occur with most across
the corpus; parts with no fallback either are recorded as unassigned.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .taxonomy import DEFAULT_TAXONOMY, GARMENT_PART, WHOLE_BODY, Taxonomy

log = logging.getLogger(__name__)


class HierarchyError(ValueError):
    pass


@dataclass
class GarmentAnnotation:
    category: str
    level: str  # whole_body | garment_part
    attributes: list[str]
    mask: np.ndarray  # H×W, binary uint8/bool

    def __post_init__(self):
        self.category = self.category.lower()
        if self.level not in (WHOLE_BODY, GARMENT_PART):
            raise HierarchyError(f"unknown annotation level {self.level!r}")
        self.mask = np.asarray(self.mask)
        if self.mask.ndim != 2:
            raise HierarchyError(f"mask must be 2-D, got shape {self.mask.shape}")
        self.mask = (self.mask > 0).astype(np.uint8)


@dataclass
class AnnotationSet:
    image_id: str
    items: list[GarmentAnnotation]

    def __post_init__(self):
        shapes = {a.mask.shape for a in self.items}
        if len(shapes) > 1:
            raise HierarchyError(f"{self.image_id}: mask shapes differ: {sorted(shapes)}")


@dataclass
class GarmentPart:
    name: str
    attributes: list[str]


@dataclass
class Garment:
    category: str
    attributes: list[str]
    parts: list[GarmentPart] = field(default_factory=list)
    mask: np.ndarray | None = None  # the whole-body mask
    region: np.ndarray | None = None  # whole-body mask ∪ assigned part masks


@dataclass
class ImageHierarchy:
    image_id: str
    garments: list[Garment]
    unassigned: list[str] = field(default_factory=list)  # part categories left out


def _overlap(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(np.logical_and(a, b)))


def build_cooccurrence(
    annotation_sets: list[AnnotationSet], taxonomy: Taxonomy = DEFAULT_TAXONOMY
) -> dict[str, Counter]:
    """Count, per part category, which whole-body category wins the overlap
    argmax across the corpus.  Used as the zero-overlap fallback table."""
    table: dict[str, Counter] = {}
    for ann in annotation_sets:
        items = [a for a in ann.items if a.level == WHOLE_BODY]
        for part in ann.items:
            if part.level != GARMENT_PART or not taxonomy.keeps(part.category):
                continue
            scored = [(_overlap(part.mask, item.mask), item) for item in items]
            scored = [(s, item) for s, item in scored if s > 0]
            if not scored:
                continue
            winner = _argmax_item(scored)
            table.setdefault(part.category, Counter())[winner.category] += 1
    return table


def _argmax_item(scored: list[tuple[int, GarmentAnnotation]]) -> GarmentAnnotation:
    """Largest overlap wins; ties broken by item mask area, then category name."""
    return max(
        scored,
        key=lambda pair: (
            pair[0],
            int(np.count_nonzero(pair[1].mask)),
            # reversed name ordering so that max() picks the lexicographically
            # smaller category on a full tie
            tuple(-ord(c) for c in pair[1].category),
        ),
    )[1]


def assign_parts(
    ann: AnnotationSet,
    taxonomy: Taxonomy = DEFAULT_TAXONOMY,
    cooccurrence: dict[str, Counter] | None = None,
) -> ImageHierarchy:
    items = [a for a in ann.items if a.level == WHOLE_BODY]
    if not items:
        raise HierarchyError(f"{ann.image_id}: no whole-body item present")

    garments = [
        Garment(category=i.category, attributes=list(i.attributes), mask=i.mask, region=i.mask.copy())
        for i in items
    ]
    unassigned: list[str] = []
    for part in ann.items:
        if part.level != GARMENT_PART:
            continue
        if not taxonomy.keeps(part.category):
            continue
        scored = [(_overlap(part.mask, item.mask), item) for item in items]
        positive = [(s, item) for s, item in scored if s > 0]
        if positive:
            winner = _argmax_item(positive)
            idx = next(i for i, item in enumerate(items) if item is winner)
        else:
            idx = _cooccurrence_fallback(part.category, items, cooccurrence)
            if idx is None:
                log.warning("%s: part %r overlaps nothing and has no co-occurrence entry", ann.image_id, part.category)
                unassigned.append(part.category)
                continue
        garments[idx].parts.append(GarmentPart(part.category, list(part.attributes)))
        garments[idx].region = np.logical_or(garments[idx].region, part.mask).astype(np.uint8)
    return ImageHierarchy(ann.image_id, garments, unassigned)


def _cooccurrence_fallback(
    part_category: str,
    items: list[GarmentAnnotation],
    cooccurrence: dict[str, Counter] | None,
) -> int | None:
    counts = (cooccurrence or {}).get(part_category)
    if not counts:
        return None
    best, best_count = None, -1
    for i, item in enumerate(items):
        c = counts.get(item.category, 0)
        if c > best_count or (c == best_count and best is not None and item.category < items[best].category):
            best, best_count = i, c
    if best is None or best_count <= 0:
        return None
    return best
