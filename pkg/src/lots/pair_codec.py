"""Frozen modality encoders and trainable projectors for sketch-text pairs.

Sketches and texts are embedded by pluggable frozen encoders into per-encoder
raw widths, then projected (linear + layer norm, trainable) into the shared
adapter width.  Desk-scale encoders are a seeded patchify-and-project sketch
encoder and a seeded hash-embedding text encoder; real pretrained encoders can
be registered under new names without touching the call sites.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch import nn

from .config import EncoderConfig

logger = logging.getLogger(__name__)

# Layer-norm epsilon kept well below the smallest row variance we normalize so
# the output variance stays within 1e-5 of one even for low-variance rows.
LAYERNORM_EPS = 1e-8


class PairCodecError(ValueError):
    """Invalid input to an encoder or projector (shape or content)."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SketchMap:
    """Binary H×W sketch canvas with entries in {0, 1}."""

    grid: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid)
        if grid.ndim != 2 or grid.shape[0] <= 0 or grid.shape[1] <= 0:
            raise PairCodecError(f"sketch grid must be 2-D and non-empty, got shape {grid.shape}")
        if not np.isin(grid, (0, 1)).all():
            raise PairCodecError("sketch grid entries must all be 0 or 1")
        object.__setattr__(self, "grid", grid.astype(np.uint8))

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def to_png(self, path: str | Path) -> None:
        """Serialize losslessly to 8-bit grayscale: 0 -> 0, 1 -> 255."""
        Image.fromarray(self.grid * 255, mode="L").save(path)

    @classmethod
    def from_png(cls, path: str | Path) -> "SketchMap":
        arr = np.asarray(Image.open(path).convert("L"))
        return cls((arr >= 128).astype(np.uint8))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "SketchMap":
        """Accept any array-like; nonzero becomes 1."""
        return cls((np.asarray(arr) != 0).astype(np.uint8))

    def resized(self, height: int, width: int) -> "SketchMap":
        """Nearest-neighbour resize that keeps the map binary."""
        img = Image.fromarray(self.grid * 255, mode="L").resize((width, height), Image.NEAREST)
        return SketchMap((np.asarray(img) >= 128).astype(np.uint8))


@dataclass(frozen=True)
class TextPrompt:
    text: str
    role: str = "local"  # "local" or "global"

    def __post_init__(self):
        if self.role not in ("local", "global"):
            raise PairCodecError(f"unknown prompt role {self.role!r}")
        if self.role == "local" and not self.text.strip():
            raise PairCodecError("local text prompt must be non-empty")


@dataclass(frozen=True)
class ConditionPair:
    """One localized conditioning unit: a sketch and its garment text."""

    sketch: SketchMap
    text: TextPrompt

    def __post_init__(self):
        if self.text.role != "local":
            raise PairCodecError("condition pair text must have role 'local'")


@dataclass
class TokenSequence:
    """L×d token matrix from one encoder or projector call."""

    tokens: torch.Tensor
    modality: str  # "sketch" or "text"
    truncated: bool = False

    def __post_init__(self):
        if self.tokens.ndim != 2 or self.tokens.shape[0] < 1:
            raise PairCodecError(f"token matrix must be L×d with L >= 1, got {tuple(self.tokens.shape)}")
        if not torch.isfinite(self.tokens).all():
            raise PairCodecError("token matrix contains non-finite entries")

    @property
    def length(self) -> int:
        return self.tokens.shape[0]

    @property
    def dim(self) -> int:
        return self.tokens.shape[1]


# ---------------------------------------------------------------------------
# frozen encoders
# ---------------------------------------------------------------------------


def _seeded(shape, seed: int, scale: float = 1.0) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(*shape, generator=gen) * scale


class PatchSketchEncoder(nn.Module):
    """Non-overlapping patchify followed by a fixed random linear projection.

    The binary single-channel sketch is replicated to 3 channels (the encoder
    expects RGB-like input), split into patch_size×patch_size patches in raster
    order, each flattened channel-major and multiplied by a frozen seeded
    weight matrix.  Everything lives in buffers: no parameter ever receives a
    gradient.
    """

    frozen = True
    modality = "sketch"

    def __init__(self, input_size=(64, 64), patch_size=8, output_dim=96, channels=3, seed=0, name="patch"):
        super().__init__()
        h, w = (input_size, input_size) if isinstance(input_size, int) else input_size
        if h % patch_size or w % patch_size:
            raise PairCodecError(f"input size {input_size} not divisible by patch size {patch_size}")
        self.name = name
        self.input_size = (h, w)
        self.patch_size = patch_size
        self.channels = channels
        self.output_dim = output_dim
        in_dim = patch_size * patch_size * channels
        self.register_buffer("weight", _seeded((in_dim, output_dim), seed, scale=in_dim**-0.5))

    @property
    def num_tokens(self) -> int:
        h, w = self.input_size
        return (h // self.patch_size) * (w // self.patch_size)

    def forward(self, grid: torch.Tensor) -> torch.Tensor:
        p = self.patch_size
        x = grid.to(self.weight.dtype).unsqueeze(0).repeat(self.channels, 1, 1)  # C×H×W
        # C×H×W -> (H/p × W/p) patches, each flattened as (channel, row, col)
        x = x.unfold(1, p, p).unfold(2, p, p)  # C × nh × nw × p × p
        x = x.permute(1, 2, 0, 3, 4).reshape(-1, self.channels * p * p)
        return x @ self.weight


class HashTextEncoder(nn.Module):
    """Frozen hash-based token embedding table.

    Tokenization is a lowercase alphanumeric split; each token indexes a fixed
    seeded embedding table through sha256, so identical strings always produce
    bit-identical sequences regardless of process hash randomization.
    """

    frozen = True
    modality = "text"

    def __init__(self, vocab_size=4096, output_dim=64, max_tokens=77, seed=0, name="hash"):
        super().__init__()
        self.name = name
        self.vocab_size = vocab_size
        self.output_dim = output_dim
        self.max_tokens = max_tokens
        self.register_buffer("table", _seeded((vocab_size, output_dim), seed))

    @staticmethod
    def tokenize(text: str) -> list[str]:
        return re.findall(r"[a-z0-9]+", text.lower())

    def token_index(self, token: str) -> int:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.vocab_size

    def forward(self, text: str) -> tuple[torch.Tensor, bool]:
        tokens = self.tokenize(text)
        truncated = len(tokens) > self.max_tokens
        tokens = tokens[: self.max_tokens]
        if not tokens:
            # e.g. a punctuation-only global prompt; one reserved row keeps L >= 1
            idx = [0]
        else:
            idx = [self.token_index(t) for t in tokens]
        return self.table[torch.tensor(idx, dtype=torch.long)], truncated


# registry keyed by name for the config file
ENCODER_BUILDERS = {
    "patch": lambda cfg: PatchSketchEncoder(
        input_size=cfg.input_size,
        patch_size=cfg.patch_size,
        output_dim=cfg.output_dim,
        channels=cfg.channels,
        seed=cfg.seed,
    ),
    "hash": lambda cfg: HashTextEncoder(
        vocab_size=cfg.vocab_size,
        output_dim=cfg.output_dim,
        max_tokens=cfg.max_tokens,
        seed=cfg.seed,
    ),
}


def register_encoder(name: str, builder) -> None:
    ENCODER_BUILDERS[name] = builder


def build_encoder(cfg: EncoderConfig) -> nn.Module:
    if cfg.name not in ENCODER_BUILDERS:
        raise PairCodecError(f"unknown encoder {cfg.name!r}; registered: {sorted(ENCODER_BUILDERS)}")
    enc = ENCODER_BUILDERS[cfg.name](cfg)
    for p in enc.parameters():
        p.requires_grad_(False)
    return enc


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def encode_sketch(sketch: SketchMap, enc) -> TokenSequence:
    """Run the frozen sketch encoder; rejects canvas/encoder size mismatches."""
    if enc.modality != "sketch":
        raise PairCodecError(f"encoder {enc.name!r} is not a sketch encoder")
    expected = tuple(enc.input_size)
    got = (sketch.height, sketch.width)
    if got != expected:
        raise PairCodecError(f"sketch shape {got} does not match encoder input {expected}")
    with torch.no_grad():
        tokens = enc(torch.from_numpy(sketch.grid))
    return TokenSequence(tokens=tokens, modality="sketch")


def encode_text(text: TextPrompt, enc) -> TokenSequence:
    """Run the frozen text encoder; long inputs are hard-truncated and flagged."""
    if enc.modality != "text":
        raise PairCodecError(f"encoder {enc.name!r} is not a text encoder")
    if text.role == "local" and not text.text.strip():
        raise PairCodecError("cannot encode empty local text")
    with torch.no_grad():
        tokens, truncated = enc(text.text)
    if truncated:
        logger.warning("text truncated to %d tokens: %.40r", enc.max_tokens, text.text)
    return TokenSequence(tokens=tokens, modality="text", truncated=truncated)


class Projector(nn.Module):
    """Trainable linear map into the adapter width, followed by layer norm."""

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.linear = nn.Linear(in_dim, out_dim)
        self.norm = nn.LayerNorm(out_dim, eps=LAYERNORM_EPS)

    @property
    def in_dim(self) -> int:
        return self.linear.in_features

    @property
    def out_dim(self) -> int:
        return self.linear.out_features

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        return self.norm(self.linear(tokens))


def project(tokens: TokenSequence, proj: Projector) -> TokenSequence:
    """Project raw encoder tokens to the shared adapter width."""
    if tokens.dim != proj.in_dim:
        raise PairCodecError(f"token width {tokens.dim} does not match projector input {proj.in_dim}")
    out = proj(tokens.tokens.to(next(proj.parameters()).dtype))
    return TokenSequence(tokens=out, modality=tokens.modality, truncated=tokens.truncated)
