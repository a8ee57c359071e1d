"""End-to-end generator: encoders, projectors, Pair-Former, denoiser, sampler."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..config import ModelConfig, config_to_dict
from ..pair_codec import (
    ConditionPair,
    Projector,
    TextPrompt,
    build_encoder,
    encode_sketch,
    encode_text,
    project,
)
from ..pair_former import PairFormer, build_condition_tensor, mean_pooling_tensor, no_pooling_tensor
from .backbone import DenoiserBackbone
from .schedule import NoiseSchedule

VARIANTS = ("pair_former", "no_pooling", "mean_pooling")


class SampleError(ValueError):
    pass


@dataclass
class GeneratedImage:
    """3×H×W float image in [0, 1] plus reproducibility provenance."""

    image: np.ndarray
    seed: int
    alpha: float
    steps: int
    condition_digest: str
    run_id: str | None = None

    def to_uint8(self) -> np.ndarray:
        return (np.clip(self.image, 0.0, 1.0) * 255.0).round().astype(np.uint8).transpose(1, 2, 0)


def _canonical_block_order(p: torch.Tensor) -> torch.Tensor:
    """Sort pair blocks by content so attention reductions see a canonical
    key order; attention is order-invariant mathematically, and this makes it
    order-invariant bitwise as well."""
    if p.shape[0] <= 1:
        return p
    keys = [p[i].detach().cpu().numpy().tobytes() for i in range(p.shape[0])]
    order = sorted(range(len(keys)), key=keys.__getitem__)
    return p[torch.tensor(order, dtype=torch.long)]


class LotsModel(nn.Module):
    """Frozen base denoiser and encoders plus the trainable conditioning path."""

    def __init__(self, cfg: ModelConfig | None = None, adapter: bool = True):
        super().__init__()
        cfg = cfg or ModelConfig()
        self.cfg = cfg
        self.with_adapter = adapter
        with torch.random.fork_rng():
            torch.manual_seed(cfg.seed)
            self.sketch_encoder = build_encoder(cfg.sketch_encoder)
            self.text_encoder = build_encoder(cfg.text_encoder)
            self.unet = DenoiserBackbone(cfg.backbone, adapter=adapter, pair_dim=cfg.adapter_dim)
            if adapter:
                self.sketch_proj = Projector(cfg.sketch_encoder.output_dim, cfg.adapter_dim)
                self.text_proj = Projector(cfg.text_encoder.output_dim, cfg.adapter_dim)
                self.pair_former = PairFormer(cfg.pair_former)
        if cfg.text_encoder.output_dim != cfg.backbone.context_dim:
            raise SampleError(
                "global-text encoder width must equal the backbone context dim "
                f"({cfg.text_encoder.output_dim} != {cfg.backbone.context_dim})"
            )
        self.schedule = NoiseSchedule(cfg.schedule)
        for p in self.unet.parameters():
            p.requires_grad_(False)
        if adapter:
            for _, p in self.unet.adapter_parameters():
                p.requires_grad_(True)

    # -- parameter bookkeeping -------------------------------------------------

    def adapter_named_parameters(self):
        if not self.with_adapter:
            return
        for prefix, module in (("sketch_proj", self.sketch_proj), ("text_proj", self.text_proj), ("pair_former", self.pair_former)):
            for name, p in module.named_parameters():
                yield f"{prefix}.{name}", p
        for name, p in self.unet.adapter_parameters():
            yield f"unet.{name}", p

    def adapter_parameters(self):
        for _, p in self.adapter_named_parameters():
            yield p

    def base_named_parameters(self):
        for name, p in self.unet.base_parameters():
            yield f"unet.{name}", p

    def encoder_named_buffers(self):
        for prefix, module in (("sketch_encoder", self.sketch_encoder), ("text_encoder", self.text_encoder)):
            for name, b in module.named_buffers():
                yield f"{prefix}.{name}", b

    # -- conditioning ----------------------------------------------------------

    def prepare_pair(self, pair: ConditionPair):
        """Resize the sketch to the encoder grid, encode both modalities, project to d."""
        h, w = self.sketch_encoder.input_size
        sketch = pair.sketch if (pair.sketch.height, pair.sketch.width) == (h, w) else pair.sketch.resized(h, w)
        hs = project(encode_sketch(sketch, self.sketch_encoder), self.sketch_proj)
        ht = project(encode_text(pair.text, self.text_encoder), self.text_proj)
        return hs, ht

    def condition_tokens(self, pairs: list[ConditionPair], variant: str = "pair_former") -> torch.Tensor | None:
        """Build the token sequence injected through the w-hat branch."""
        if variant not in VARIANTS:
            raise SampleError(f"unknown conditioning variant {variant!r}; expected one of {VARIANTS}")
        if not pairs:
            return None
        prepared = [self.prepare_pair(p) for p in pairs]
        if variant == "pair_former":
            cond = build_condition_tensor(prepared, self.pair_former)
            return _canonical_block_order(cond.p).reshape(-1, self.cfg.adapter_dim)
        if variant == "no_pooling":
            return no_pooling_tensor(prepared)
        return mean_pooling_tensor(prepared)

    def global_text_tokens(self, text: str | None) -> torch.Tensor:
        """Frozen global-text path feeding the base cross-attention branch w."""
        prompt = TextPrompt(text or self.cfg.global_text_default, role="global")
        return encode_text(prompt, self.text_encoder).tokens

    @staticmethod
    def null_text_tokens(context_dim: int) -> torch.Tensor:
        """Unconditional token used for classifier-free dropout and guidance."""
        return torch.zeros(1, context_dim)

    def condition_digest(self, pairs: list[ConditionPair], global_text: str | None) -> str:
        payload = {
            "global_text": global_text or self.cfg.global_text_default,
            "pairs": [
                {"sketch": hashlib.sha256(p.sketch.grid.tobytes()).hexdigest(), "text": p.text.text}
                for p in pairs
            ],
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    # -- generation --------------------------------------------------------------

    def denoise(self, latent, t, text_tokens, pair_tokens, alpha, text_mask=None, pair_mask=None):
        return self.unet(latent, t, text_tokens, pair_tokens, alpha, text_mask, pair_mask)

    @torch.no_grad()
    def sample(
        self,
        pairs: list[ConditionPair] | None = None,
        global_text: str | None = None,
        steps: int = 50,
        alpha: float = 1.0,
        seed: int = 0,
        variant: str = "pair_former",
        guidance_scale: float = 1.0,
        out_size: int | None = None,
    ) -> GeneratedImage:
        pairs = pairs or []
        if not (0.0 <= alpha <= 1.0):
            raise SampleError(f"alpha must lie in [0, 1], got {alpha}")
        if steps < 1:
            raise SampleError("steps must be >= 1")
        if len(pairs) > self.cfg.max_pairs:
            raise SampleError(f"at most {self.cfg.max_pairs} condition pairs supported, got {len(pairs)}")
        canvases = {(p.sketch.height, p.sketch.width) for p in pairs}
        if len(canvases) > 1:
            raise SampleError(f"mixed sketch canvas sizes: {sorted(canvases)}")

        text_tokens = self.global_text_tokens(global_text).unsqueeze(0)
        pair_tokens = None
        if pairs and self.with_adapter:
            pair_tokens = self.condition_tokens(pairs, variant).unsqueeze(0)

        size = self.cfg.backbone.latent_size
        gen = torch.Generator().manual_seed(seed)
        x = torch.randn(1, self.cfg.backbone.latent_channels, size, size, generator=gen)

        ts = self.schedule.sampling_timesteps(steps)
        for i, t in enumerate(ts):
            t_prev = ts[i + 1] if i + 1 < len(ts) else -1
            t_batch = torch.tensor([t], dtype=torch.long)
            eps = self.denoise(x, t_batch, text_tokens, pair_tokens, alpha)
            if guidance_scale != 1.0:
                null = self.null_text_tokens(self.cfg.backbone.context_dim).unsqueeze(0)
                eps_uncond = self.denoise(x, t_batch, null, pair_tokens, alpha)
                eps = eps_uncond + guidance_scale * (eps - eps_uncond)
            x = self.schedule.ddim_step(x, eps, t, t_prev)

        image = ((x[0] + 1.0) / 2.0).clamp(0.0, 1.0).numpy()
        out_hw = (out_size, out_size) if out_size else (canvases.pop() if canvases else None)
        if out_hw and out_hw != image.shape[1:]:
            # deterministic nearest-neighbour rescale to the sketch canvas
            rows = np.floor(np.arange(out_hw[0]) * image.shape[1] / out_hw[0]).astype(int)
            cols = np.floor(np.arange(out_hw[1]) * image.shape[2] / out_hw[1]).astype(int)
            image = image[:, rows][:, :, cols]
        return GeneratedImage(
            image=image,
            seed=seed,
            alpha=alpha,
            steps=steps,
            condition_digest=self.condition_digest(pairs, global_text),
        )

    def baseline_twin(self) -> "LotsModel":
        """Adapter-absent model sharing this model's frozen base weights."""
        twin = LotsModel(self.cfg, adapter=False)
        base = {n: p.detach().clone() for n, p in self.base_named_parameters()}
        state = twin.state_dict()
        for name, value in base.items():
            state[name] = value
        twin.load_state_dict(state)
        return twin
