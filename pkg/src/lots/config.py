"""Dataclass configs for the model, trainer, and dataset pipeline."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

DEFAULT_GLOBAL_TEXT = "A picture of a model posing, high-quality, 4k"

# Dataset-wide cap on the number of sketch-text pairs per sample.
MAX_PAIRS = 6


@dataclass
class EncoderConfig:
    """One entry of the encoder registry (see pair_codec.build_encoder)."""

    name: str = "patch"
    output_dim: int = 96
    seed: int = 0
    # patch encoder
    input_size: tuple[int, int] = (64, 64)
    patch_size: int = 8
    channels: int = 3
    # hash text encoder
    vocab_size: int = 4096
    max_tokens: int = 77


@dataclass
class PairFormerConfig:
    dim: int = 64
    num_tokens: int = 32  # pooled tokens per pair, ablation default
    blocks: int = 2
    heads: int = 4
    ff_mult: int = 4
    feed_forward: bool = True
    segment_embeddings: bool = False


@dataclass
class BackboneConfig:
    latent_channels: int = 3  # identity VAE maps RGB straight through
    latent_size: int = 32
    channels: tuple[int, ...] = (32, 64, 128)
    context_dim: int = 64  # width of the global-text tokens consumed by w
    time_dim: int = 128
    groups: int = 8


@dataclass
class ScheduleConfig:
    timesteps: int = 1000
    beta_start: float = 1e-4
    beta_end: float = 0.02


@dataclass
class ModelConfig:
    adapter_dim: int = 64
    sketch_encoder: EncoderConfig = field(default_factory=lambda: EncoderConfig(name="patch", output_dim=96))
    text_encoder: EncoderConfig = field(default_factory=lambda: EncoderConfig(name="hash", output_dim=64))
    pair_former: PairFormerConfig = field(default_factory=PairFormerConfig)
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    global_text_default: str = DEFAULT_GLOBAL_TEXT
    max_pairs: int = MAX_PAIRS
    seed: int = 0

    def __post_init__(self):
        if self.pair_former.dim != self.adapter_dim:
            self.pair_former.dim = self.adapter_dim

    @classmethod
    def tiny(cls) -> "ModelConfig":
        """Small enough for finite-difference tests and fast CI loops."""
        return cls(
            adapter_dim=16,
            sketch_encoder=EncoderConfig(name="patch", output_dim=24, input_size=(16, 16), patch_size=8),
            text_encoder=EncoderConfig(name="hash", output_dim=16, vocab_size=512, max_tokens=16),
            pair_former=PairFormerConfig(dim=16, num_tokens=4, blocks=2, heads=2, ff_mult=2),
            backbone=BackboneConfig(latent_channels=3, latent_size=16, channels=(8, 12, 16), context_dim=16, time_dim=32, groups=4),
            schedule=ScheduleConfig(timesteps=100),
        )


@dataclass
class TrainConfig:
    learning_rate: float = 1e-5
    batch_size: int = 32
    steps: int = 1000
    cond_dropout: float = 0.1  # joint dropout probability on (global text, pairs)
    alpha: float = 1.0  # guidance scale during training
    seed: int = 0
    checkpoint_every: int = 0  # 0 disables periodic checkpoints
    out_dir: str = "runs"
    variant: str = "pair_former"  # or no_pooling / mean_pooling


@dataclass
class SamplerConfig:
    steps: int = 50
    alpha: float = 1.0
    guidance_scale: float = 1.0  # 1.0 = classifier-free guidance off


@dataclass
class BuildConfig:
    """Dataset construction (`sketchy build`)."""

    canvas_size: int = 512
    description_backend: str = "template"  # or "llm"
    sketcher: str = "edges"  # or "external"
    taxonomy_path: str | None = None  # None = packaged default keep/drop lists
    llm_endpoint: str | None = None
    sketcher_endpoint: str | None = None
    max_pairs: int = MAX_PAIRS


def _from_mapping(cls, data: dict):
    """Recursively build a dataclass from a plain mapping, ignoring unknown keys."""
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if dataclasses.is_dataclass(f.type) and isinstance(value, dict):
            value = _from_mapping(f.type, value)
        elif isinstance(value, dict) and f.name in _NESTED:
            value = _from_mapping(_NESTED[f.name], value)
        elif isinstance(value, list) and f.name == "channels":
            value = tuple(value)
        elif isinstance(value, list) and f.name == "input_size":
            value = tuple(value)
        kwargs[f.name] = value
    return cls(**kwargs)


_NESTED = {
    "sketch_encoder": EncoderConfig,
    "text_encoder": EncoderConfig,
    "pair_former": PairFormerConfig,
    "backbone": BackboneConfig,
    "schedule": ScheduleConfig,
    "model": ModelConfig,
    "train": TrainConfig,
    "sampler": SamplerConfig,
    "build": BuildConfig,
}


def load_config_file(path: str | Path) -> dict:
    """Read a YAML or JSON config file into a plain dict."""
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text) or {}


def model_config_from_file(path: str | Path) -> ModelConfig:
    data = load_config_file(path)
    return _from_mapping(ModelConfig, data.get("model", data))


def train_config_from_file(path: str | Path) -> TrainConfig:
    data = load_config_file(path)
    return _from_mapping(TrainConfig, data.get("train", data))


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)
