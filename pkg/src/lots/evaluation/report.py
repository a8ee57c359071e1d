"""Batch evaluation over generated/reference directories driven by a dataset
manifest, emitting a JSON report with aggregate and per-sample scores."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..sketchy.manifest import read_manifest
from .agreement import EvalResponse, attribute_scores, krippendorff_alpha, responses_by_unit
from .embedders import ToyImageEmbedder
from .metrics import VqaBackend, fid, global_clip, local_clip, ssim, vqa_score

log = logging.getLogger(__name__)


@dataclass
class MetricReport:
    global_clip: float
    local_clip: float
    ssim: float
    fid: float | None = None
    vqa_score: float | None = None
    per_sample: list[dict] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        # absent metrics stay absent rather than null
        if self.fid is None:
            d.pop("fid")
        if self.vqa_score is None:
            d.pop("vqa_score")
        return d


def _load(path: Path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGB"))


def evaluate_directories(
    gen_dir: str | Path,
    ref_dir: str | Path,
    manifest_path: str | Path,
    report_path: str | Path | None = None,
    embedder=None,
    extractor=None,
    vqa_backend: VqaBackend | None = None,
) -> MetricReport:
    """Score every manifest record whose generated image exists as
    `{gen_dir}/{image_id}.png`; reference images resolve against `ref_dir`."""
    gen_dir, ref_dir = Path(gen_dir), Path(ref_dir)
    embedder = embedder or ToyImageEmbedder()
    extractor = extractor or ToyImageEmbedder(dim=8, seed=7)
    records, _ = read_manifest(manifest_path)
    manifest_root = Path(manifest_path).parent

    per_sample: list[dict] = []
    skipped: list[str] = []
    gens: list[np.ndarray] = []
    refs: list[np.ndarray] = []
    for record in records:
        gen_path = gen_dir / f"{record.image_id}.png"
        ref_path = ref_dir / Path(record.image_path).name
        if not ref_path.exists():
            ref_path = ref_dir / record.image_path
        if not gen_path.exists() or not ref_path.exists():
            log.warning("skipping %s: missing %s", record.image_id, gen_path if not gen_path.exists() else ref_path)
            skipped.append(record.image_id)
            continue
        gen, ref = _load(gen_path), _load(ref_path)
        if gen.shape != ref.shape:
            log.warning("skipping %s: shape mismatch %s vs %s", record.image_id, gen.shape, ref.shape)
            skipped.append(record.image_id)
            continue
        masks = [
            np.asarray(Image.open(manifest_root / g.mask_path).convert("L")) >= 128 for g in record.garments
        ]
        local = local_clip(gen, ref, masks, embedder)
        entry = {
            "image_id": record.image_id,
            "global_clip": global_clip(gen, ref, embedder),
            "local_clip": local.score,
            "local_clip_per_garment": local.per_garment,
            "ssim": ssim(gen, ref),
        }
        prompt = " ".join(g.description for g in record.garments)
        vqa = vqa_score(gen, prompt, vqa_backend)
        if vqa is not None:
            entry["vqa_score"] = vqa
        per_sample.append(entry)
        gens.append(gen)
        refs.append(ref)

    if not per_sample:
        raise FileNotFoundError(f"no evaluable pairs between {gen_dir} and {ref_dir}")

    report = MetricReport(
        global_clip=float(np.mean([e["global_clip"] for e in per_sample])),
        local_clip=float(np.mean([e["local_clip"] for e in per_sample])),
        ssim=float(np.mean([e["ssim"] for e in per_sample])),
        fid=fid(gens, refs, extractor).value if len(gens) >= 2 else None,
        vqa_score=(
            float(np.mean([e["vqa_score"] for e in per_sample]))
            if all("vqa_score" in e for e in per_sample)
            else None
        ),
        per_sample=per_sample,
        skipped=skipped,
    )
    if report_path is not None:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text(json.dumps(report.as_dict(), indent=2))
    return report


def study_report(responses: list[EvalResponse]) -> dict:
    """Aggregate questionnaire answers into placement scores and agreement."""
    scores = attribute_scores(responses)
    alpha = krippendorff_alpha(responses_by_unit(responses))
    out = {**scores, "num_responses": len(responses)}
    out["krippendorff_alpha"] = alpha if alpha is not None else "undefined"
    return out
