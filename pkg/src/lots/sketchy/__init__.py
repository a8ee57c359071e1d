"""Dataset construction: garment hierarchies, descriptions, localized
sketches, canvas preprocessing, and the build pipeline."""

from .build import BuildResult, build_dataset, make_description_backend
from .descriptions import (
    DescriptionResult,
    HttpLlmClient,
    LlmDescriptionBackend,
    RuleBasedClient,
    TemplateDescriptionBackend,
    build_prompt,
    parse_reply,
)
from .hierarchy import (
    AnnotationSet,
    Garment,
    GarmentAnnotation,
    GarmentPart,
    HierarchyError,
    ImageHierarchy,
    assign_parts,
    build_cooccurrence,
)
from .manifest import DatasetRecord, GarmentRecord, ManifestError, build_manifest, corpus_stats, read_manifest
from .preprocess import PreprocessError, fit_geometry, preprocess_image, preprocess_mask
from .sketches import (
    EdgeSketchBackend,
    ExternalSketchBackend,
    SketchError,
    compose_global_sketch,
    generate_local_sketch,
    mask_bbox,
)
from .taxonomy import DEFAULT_TAXONOMY, Taxonomy, TaxonomyError, load_taxonomy

__all__ = [
    "AnnotationSet",
    "BuildResult",
    "DatasetRecord",
    "DescriptionResult",
    "EdgeSketchBackend",
    "ExternalSketchBackend",
    "Garment",
    "GarmentAnnotation",
    "GarmentPart",
    "GarmentRecord",
    "HierarchyError",
    "HttpLlmClient",
    "ImageHierarchy",
    "LlmDescriptionBackend",
    "ManifestError",
    "PreprocessError",
    "RuleBasedClient",
    "SketchError",
    "TemplateDescriptionBackend",
    "Taxonomy",
    "TaxonomyError",
    "DEFAULT_TAXONOMY",
    "assign_parts",
    "build_cooccurrence",
    "build_dataset",
    "build_manifest",
    "build_prompt",
    "compose_global_sketch",
    "corpus_stats",
    "fit_geometry",
    "generate_local_sketch",
    "load_taxonomy",
    "make_description_backend",
    "mask_bbox",
    "parse_reply",
    "preprocess_image",
    "preprocess_mask",
    "read_manifest",
]
