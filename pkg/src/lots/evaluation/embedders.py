"""Pluggable image embedders.

Metrics only require a callable mapping an H×W×3 uint8 image to a fixed-width
feature vector.  The toy embedder here is a seeded random projection of a
downsampled grayscale view — deterministic, fast, and expressive enough to
distinguish the synthetic fixtures."""

from __future__ import annotations

import cv2
import numpy as np


class ToyImageEmbedder:
    """Grayscale 8×8 thumbnail pushed through a fixed random projection."""

    def __init__(self, dim: int = 16, thumb: int = 8, seed: int = 0):
        self.dim = dim
        self.thumb = thumb
        rng = np.random.default_rng(seed)
        self.weight = rng.standard_normal((thumb * thumb, dim)) / np.sqrt(thumb * thumb)

    def __call__(self, image: np.ndarray) -> np.ndarray:
        image = np.asarray(image)
        if image.ndim == 3:
            image = cv2.cvtColor(image.astype(np.uint8), cv2.COLOR_RGB2GRAY)
        small = cv2.resize(image.astype(np.float64), (self.thumb, self.thumb), interpolation=cv2.INTER_AREA)
        return (small.reshape(-1) / 255.0) @ self.weight
