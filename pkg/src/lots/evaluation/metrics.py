"""Automatic image metrics: embedding cosines (global and per-garment crop),
windowed SSIM, Fréchet distance between feature Gaussians, and a stubbed
VQA-based alignment score."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import cv2
import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

Embedder = Callable[[np.ndarray], np.ndarray]


class MetricError(ValueError):
    pass


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise MetricError("zero-norm embedding has no cosine")
    return float(u @ v / (nu * nv))


def global_clip(gen: np.ndarray, ref: np.ndarray, embedder: Embedder) -> float:
    """Cosine similarity of whole-image embeddings under a shared embedder."""
    return cosine(embedder(gen), embedder(ref))


def _crop_box(mask: np.ndarray, pad: int) -> tuple[int, int, int, int] | None:
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return None
    h, w = mask.shape
    return (
        max(int(ys.min()) - pad, 0),
        max(int(xs.min()) - pad, 0),
        min(int(ys.max()) + 1 + pad, h),
        min(int(xs.max()) + 1 + pad, w),
    )


@dataclass
class LocalClipResult:
    score: float
    per_garment: list[float] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)  # indices of empty masks

    def __float__(self) -> float:
        return self.score


def local_clip(
    gen: np.ndarray,
    ref: np.ndarray,
    masks: Sequence[np.ndarray],
    embedder: Embedder,
    pad: int = 4,
) -> LocalClipResult:
    """Mean cosine over per-garment bounding-box crops of both images."""
    if not len(masks):
        raise MetricError("local similarity needs at least one garment mask")
    scores: list[float] = []
    skipped: list[int] = []
    for i, mask in enumerate(masks):
        box = _crop_box(np.asarray(mask) > 0, pad)
        if box is None:
            log.warning("garment %d: empty mask, skipped", i)
            skipped.append(i)
            continue
        y0, x0, y1, x1 = box
        scores.append(cosine(embedder(gen[y0:y1, x0:x1]), embedder(ref[y0:y1, x0:x1])))
    if not scores:
        raise MetricError("all garment masks were empty")
    return LocalClipResult(score=float(np.mean(scores)), per_garment=scores, skipped=skipped)


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(
    gen: np.ndarray,
    ref: np.ndarray,
    window: int = 11,
    sigma: float = 1.5,
    k1: float = 0.01,
    k2: float = 0.03,
) -> float:
    """Windowed structural similarity, averaged over valid windows and channels.

    Inputs are uint8 or floats in [0, 1]; both are compared on a unit dynamic
    range."""
    gen, ref = np.asarray(gen), np.asarray(ref)
    if gen.shape != ref.shape:
        raise MetricError(f"shape mismatch: {gen.shape} vs {ref.shape}")
    if min(gen.shape[:2]) < window:
        raise MetricError(f"images smaller than the {window}×{window} window")
    x = gen.astype(np.float64) / (255.0 if gen.dtype == np.uint8 else 1.0)
    y = ref.astype(np.float64) / (255.0 if ref.dtype == np.uint8 else 1.0)
    if x.ndim == 2:
        x, y = x[..., None], y[..., None]

    kernel = _gaussian_kernel(window, sigma)
    c1, c2 = k1**2, k2**2
    half = window // 2
    values = []
    for c in range(x.shape[2]):
        xc, yc = x[..., c], y[..., c]

        def smooth(a: np.ndarray) -> np.ndarray:
            full = cv2.filter2D(a, -1, kernel, borderType=cv2.BORDER_CONSTANT)
            return full[half:-half, half:-half]

        mu_x, mu_y = smooth(xc), smooth(yc)
        var_x = smooth(xc * xc) - mu_x * mu_x
        var_y = smooth(yc * yc) - mu_y * mu_y
        cov = smooth(xc * yc) - mu_x * mu_y
        num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
        den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
        values.append(np.mean(num / den))
    return float(np.mean(values))


@dataclass
class FidResult:
    value: float
    ridge_applied: bool = False

    def __float__(self) -> float:
        return self.value


def frechet_distance(
    mu1: np.ndarray, cov1: np.ndarray, mu2: np.ndarray, cov2: np.ndarray, ridge: float = 1e-6
) -> FidResult:
    mu1, mu2 = np.atleast_1d(mu1), np.atleast_1d(mu2)
    cov1, cov2 = np.atleast_2d(cov1), np.atleast_2d(cov2)
    diff = mu1 - mu2
    covmean, _ = scipy.linalg.sqrtm(cov1 @ cov2, disp=False)
    ridged = False
    if not np.isfinite(covmean).all():
        log.warning("singular covariance product; adding %g ridge", ridge)
        eye = np.eye(cov1.shape[0]) * ridge
        covmean, _ = scipy.linalg.sqrtm((cov1 + eye) @ (cov2 + eye), disp=False)
        ridged = True
    covmean = np.real(covmean)
    value = float(diff @ diff + np.trace(cov1) + np.trace(cov2) - 2.0 * np.trace(covmean))
    return FidResult(value=value, ridge_applied=ridged)


def fid(
    gen_images: Sequence[np.ndarray],
    ref_images: Sequence[np.ndarray],
    extractor: Embedder,
    ridge: float = 1e-6,
) -> FidResult:
    """Fréchet distance between Gaussian fits of extracted feature sets."""
    if len(gen_images) < 2 or len(ref_images) < 2:
        raise MetricError("need at least two samples per set to fit a Gaussian")
    feats_g = np.stack([np.asarray(extractor(im), dtype=np.float64).reshape(-1) for im in gen_images])
    feats_r = np.stack([np.asarray(extractor(im), dtype=np.float64).reshape(-1) for im in ref_images])
    mu_g, mu_r = feats_g.mean(axis=0), feats_r.mean(axis=0)
    cov_g = np.cov(feats_g, rowvar=False)
    cov_r = np.cov(feats_r, rowvar=False)
    return frechet_distance(mu_g, cov_g, mu_r, cov_r, ridge=ridge)


class VqaBackend(Protocol):
    def score(self, image: np.ndarray, prompt: str) -> float: ...


def image_key(image: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(image).tobytes()).hexdigest()


class StubVqaBackend:
    """Fixture-backed alignment scorer: replays registered (image, prompt)
    scores; unknown queries fall back to a configured default."""

    def __init__(self, default: float | None = None):
        self.default = default
        self._scores: dict[tuple[str, str], float] = {}

    def register(self, image: np.ndarray, prompt: str, score: float) -> None:
        self._scores[(image_key(image), prompt)] = score

    def score(self, image: np.ndarray, prompt: str) -> float:
        key = (image_key(image), prompt)
        if key in self._scores:
            return self._scores[key]
        if self.default is None:
            raise MetricError("no registered score for this image/prompt")
        return self.default


def vqa_score(image: np.ndarray, prompt: str, backend: VqaBackend | None) -> float | None:
    """Backend-reported alignment probability; None when no backend is wired
    (the metric is then absent from reports, never fabricated)."""
    if backend is None:
        return None
    return float(backend.score(image, prompt))
