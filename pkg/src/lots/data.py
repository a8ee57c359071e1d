"""Bridging dataset manifests to training samples."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .diffusion.trainer import TrainSample
from .pair_codec import ConditionPair, SketchMap, TextPrompt
from .sketchy.manifest import read_manifest


def samples_from_manifest(manifest_path: str | Path, global_text: str | None = None) -> list[TrainSample]:
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    records, _ = read_manifest(manifest_path)
    samples = []
    for record in records:
        image = np.asarray(Image.open(root / record.image_path).convert("RGB"))
        pairs = [
            ConditionPair(
                sketch=SketchMap.from_png(root / g.sketch_path),
                text=TextPrompt(g.description),
            )
            for g in record.garments
        ]
        samples.append(TrainSample(image=image, pairs=pairs, global_text=global_text))
    return samples
