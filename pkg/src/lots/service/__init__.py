"""Generation service: HTTP API, run persistence, and the job runner."""

from .app import GenerationPayload, PairPayload, create_app
from .config import ENV_PREFIX, ServiceConfig, load_service_config
from .runner import GenerationRunner, ModelNotLoaded, UnknownCheckpoint, decode_sketch, encode_png, request_digest
from .store import RunStore, StoreError

__all__ = [
    "ENV_PREFIX",
    "GenerationPayload",
    "GenerationRunner",
    "ModelNotLoaded",
    "PairPayload",
    "RunStore",
    "ServiceConfig",
    "StoreError",
    "UnknownCheckpoint",
    "create_app",
    "decode_sketch",
    "encode_png",
    "load_service_config",
    "request_digest",
]
