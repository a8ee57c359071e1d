"""Square-canvas preprocessing: longest side to the target size, aspect ratio
preserved, centered on white padding.  Masks and sketches go through the same
geometry so they stay pixel-aligned with the image."""

from __future__ import annotations

import cv2
import numpy as np


class PreprocessError(ValueError):
    pass


def fit_geometry(height: int, width: int, size: int = 512) -> tuple[int, int, int, int]:
    """(new_h, new_w, top, left) placing the scaled image on a size×size canvas."""
    if height <= 0 or width <= 0:
        raise PreprocessError(f"degenerate image size {height}×{width}")
    if height >= width:
        new_h = size
        new_w = max(round(width * size / height), 1)
    else:
        new_w = size
        new_h = max(round(height * size / width), 1)
    return new_h, new_w, (size - new_h) // 2, (size - new_w) // 2


def preprocess_image(image: np.ndarray, size: int = 512) -> np.ndarray:
    """uint8 H×W×3 -> uint8 size×size×3 with white padding."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise PreprocessError(f"expected H×W×3, got shape {image.shape}")
    new_h, new_w, top, left = fit_geometry(image.shape[0], image.shape[1], size)
    interp = cv2.INTER_AREA if new_h <= image.shape[0] else cv2.INTER_LINEAR
    resized = cv2.resize(image, (new_w, new_h), interpolation=interp)
    canvas = np.full((size, size, 3), 255, dtype=np.uint8)
    canvas[top : top + new_h, left : left + new_w] = resized
    return canvas


def preprocess_mask(mask: np.ndarray, size: int = 512) -> np.ndarray:
    """Binary H×W -> binary size×size on a zero background, same geometry."""
    mask = (np.asarray(mask) > 0).astype(np.uint8)
    if mask.ndim != 2:
        raise PreprocessError(f"expected an H×W mask, got shape {mask.shape}")
    new_h, new_w, top, left = fit_geometry(mask.shape[0], mask.shape[1], size)
    resized = cv2.resize(mask, (new_w, new_h), interpolation=cv2.INTER_NEAREST)
    canvas = np.zeros((size, size), dtype=np.uint8)
    canvas[top : top + new_h, left : left + new_w] = resized
    return canvas
