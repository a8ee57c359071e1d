"""Evaluation harness: embedding cosines, SSIM, FID, VQA stub, and
human-study aggregation."""

from .agreement import (
    AgreementError,
    EvalResponse,
    attribute_scores,
    f1_score,
    krippendorff_alpha,
    read_responses_csv,
    responses_by_unit,
)
from .embedders import ToyImageEmbedder
from .metrics import (
    FidResult,
    LocalClipResult,
    MetricError,
    StubVqaBackend,
    cosine,
    fid,
    frechet_distance,
    global_clip,
    local_clip,
    ssim,
    vqa_score,
)
from .report import MetricReport, evaluate_directories, study_report

__all__ = [
    "AgreementError",
    "EvalResponse",
    "FidResult",
    "LocalClipResult",
    "MetricError",
    "MetricReport",
    "StubVqaBackend",
    "ToyImageEmbedder",
    "attribute_scores",
    "cosine",
    "evaluate_directories",
    "f1_score",
    "fid",
    "frechet_distance",
    "global_clip",
    "krippendorff_alpha",
    "local_clip",
    "read_responses_csv",
    "responses_by_unit",
    "ssim",
    "study_report",
    "vqa_score",
]
