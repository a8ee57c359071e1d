"""Localized sketch generation: zoom into a garment, sketch it, mask it.

The crop around the garment mask is resized to the sketcher's working
resolution so small items keep their detail, then the sketch is pasted back
into canvas coordinates and everything outside the segmentation mask is
zeroed.  The global sketch is the pixelwise union over garments.
"""

from __future__ import annotations

from typing import Callable, Protocol

import cv2
import numpy as np

from ..pair_codec import SketchMap


class SketchError(ValueError):
    pass


class SketchBackend(Protocol):
    input_size: int

    def __call__(self, gray: np.ndarray) -> np.ndarray: ...


class EdgeSketchBackend:
    """Sobel gradient magnitude binarized with Otsu's threshold."""

    def __init__(self, input_size: int = 128):
        self.input_size = input_size

    def __call__(self, gray: np.ndarray) -> np.ndarray:
        if gray.ndim != 2:
            raise SketchError(f"expected a grayscale image, got shape {gray.shape}")
        g = gray.astype(np.float32)
        gx = cv2.Sobel(g, cv2.CV_32F, 1, 0, ksize=3)
        gy = cv2.Sobel(g, cv2.CV_32F, 0, 1, ksize=3)
        mag = cv2.magnitude(gx, gy)
        peak = float(mag.max())
        if peak <= 0:
            return np.zeros(gray.shape, dtype=np.uint8)
        scaled = (mag * (255.0 / peak)).astype(np.uint8)
        _, binary = cv2.threshold(scaled, 0, 1, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
        return binary.astype(np.uint8)


class ExternalSketchBackend:
    """Adapter for an out-of-process image-to-sketch model."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], input_size: int = 128):
        self.fn = fn
        self.input_size = input_size

    def __call__(self, gray: np.ndarray) -> np.ndarray:
        out = np.asarray(self.fn(gray))
        if out.shape != gray.shape:
            raise SketchError(f"backend returned shape {out.shape}, expected {gray.shape}")
        if not np.isin(out, (0, 1)).all():
            raise SketchError("backend output must be binary {0, 1}")
        return out.astype(np.uint8)


def mask_bbox(mask: np.ndarray, margin: int = 0) -> tuple[int, int, int, int]:
    """(y0, x0, y1, x1) of the nonzero region, clamped to the canvas."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise SketchError("empty mask has no bounding box")
    h, w = mask.shape
    return (
        max(int(ys.min()) - margin, 0),
        max(int(xs.min()) - margin, 0),
        min(int(ys.max()) + 1 + margin, h),
        min(int(xs.max()) + 1 + margin, w),
    )


def generate_local_sketch(
    image: np.ndarray,
    mask: np.ndarray,
    backend: SketchBackend,
    margin: int = 4,
) -> SketchMap:
    if image.ndim != 3 or image.shape[2] != 3:
        raise SketchError(f"expected an H×W×3 image, got shape {image.shape}")
    if mask.shape != image.shape[:2]:
        raise SketchError(f"mask shape {mask.shape} does not match image {image.shape[:2]}")
    mask = (np.asarray(mask) > 0).astype(np.uint8)
    if not mask.any():
        raise SketchError("cannot sketch an empty mask")

    y0, x0, y1, x1 = mask_bbox(mask, margin)
    crop = cv2.cvtColor(image[y0:y1, x0:x1], cv2.COLOR_RGB2GRAY)
    zoomed = cv2.resize(crop, (backend.input_size, backend.input_size), interpolation=cv2.INTER_AREA)
    sketch = backend(zoomed)
    restored = cv2.resize(sketch, (x1 - x0, y1 - y0), interpolation=cv2.INTER_NEAREST)
    canvas = np.zeros(mask.shape, dtype=np.uint8)
    canvas[y0:y1, x0:x1] = restored
    canvas &= mask
    return SketchMap(canvas)


def compose_global_sketch(sketches: list[SketchMap]) -> SketchMap:
    if not sketches:
        raise SketchError("no sketches to compose")
    shapes = {s.grid.shape for s in sketches}
    if len(shapes) > 1:
        raise SketchError(f"sketch canvas sizes differ: {sorted(shapes)}")
    union = np.zeros(sketches[0].grid.shape, dtype=np.uint8)
    for s in sketches:
        union |= s.grid
    return SketchMap(union)
