"""Adapter training loop: noise-prediction MSE with a frozen base denoiser.

Only the projectors, the Pair-Former, and the added w-hat projections receive
gradients; base denoiser weights and encoder tables stay fixed.  Each step
draws one uniform timestep per sample, with joint classifier-free dropout of
the global text and the pair tokens.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
import torch
from PIL import Image

from ..config import TrainConfig
from ..pair_codec import ConditionPair
from .model import LotsModel


class TrainStepError(RuntimeError):
    pass


@dataclass
class TrainSample:
    image: np.ndarray  # H×W×3 uint8
    pairs: list[ConditionPair]
    global_text: str | None = None


def image_to_latent(image: np.ndarray, size: int) -> torch.Tensor:
    """uint8 H×W×3 -> float 3×size×size in [-1, 1] (identity toy autoencoder)."""
    if image.shape[:2] != (size, size):
        image = np.asarray(Image.fromarray(image).resize((size, size), Image.BILINEAR))
    x = torch.from_numpy(image.astype(np.float32) / 255.0)
    return x.permute(2, 0, 1) * 2.0 - 1.0


def _pad_stack(seqs: list[torch.Tensor]) -> tuple[torch.Tensor, torch.Tensor]:
    """Stack variable-length L×d sequences; returns (B×Lmax×d, padding mask)."""
    dim = max(s.shape[1] for s in seqs)
    lmax = max(max(s.shape[0] for s in seqs), 1)
    out = torch.zeros(len(seqs), lmax, dim)
    mask = torch.ones(len(seqs), lmax, dtype=torch.bool)
    for i, s in enumerate(seqs):
        if s.shape[0]:
            out[i, : s.shape[0]] = s
            mask[i, : s.shape[0]] = False
    return out, mask


class AdapterTrainer:
    def __init__(self, model: LotsModel, cfg: TrainConfig | None = None):
        if not model.with_adapter:
            raise TrainStepError("cannot train an adapter-less baseline model")
        self.model = model
        self.cfg = cfg or TrainConfig()
        self.optimizer = torch.optim.Adam(model.adapter_parameters(), lr=self.cfg.learning_rate)
        self.rng = random.Random(self.cfg.seed)
        self.torch_gen = torch.Generator().manual_seed(self.cfg.seed)
        self.step_count = 0
        self.loss_history: list[float] = []

    def _conditioning(self, sample: TrainSample) -> tuple[torch.Tensor, torch.Tensor | None]:
        dropped = self.rng.random() < self.cfg.cond_dropout
        if dropped:
            return self.model.null_text_tokens(self.model.cfg.backbone.context_dim), None
        text = self.model.global_text_tokens(sample.global_text)
        if not sample.pairs:
            return text, None
        cond = self.model.condition_tokens(sample.pairs, self.cfg.variant)
        return text, cond

    def train_step(self, batch: list[TrainSample]) -> float:
        """One optimizer step; returns the scalar loss."""
        if not batch:
            raise TrainStepError("empty batch")
        if any(len(s.pairs) > self.model.cfg.max_pairs for s in batch):
            raise TrainStepError(f"a sample exceeds the configured max of {self.model.cfg.max_pairs} pairs")
        size = self.model.cfg.backbone.latent_size
        latents = torch.stack([image_to_latent(s.image, size) for s in batch])

        texts, conds = [], []
        for s in batch:
            text, cond = self._conditioning(s)
            texts.append(text)
            conds.append(cond if cond is not None else torch.zeros(0, self.model.cfg.adapter_dim))
        text_tokens, text_mask = _pad_stack(texts)
        have_pairs = any(c.shape[0] for c in conds)
        if have_pairs:
            pair_tokens, pair_mask = _pad_stack(conds)
            # fully-masked rows would make softmax degenerate; give them one
            # zero token and rely on the zero-initialized/learned output path
            all_pad = pair_mask.all(dim=1)
            pair_mask[all_pad, 0] = False
        else:
            pair_tokens, pair_mask = None, None

        b = latents.shape[0]
        t = torch.randint(0, self.model.schedule.timesteps, (b,), generator=self.torch_gen)
        eps = torch.randn(latents.shape, generator=self.torch_gen)
        noisy = self.model.schedule.add_noise(latents, eps, t)

        pred = self.model.denoise(noisy, t, text_tokens, pair_tokens, self.cfg.alpha, text_mask, pair_mask)
        loss = torch.nn.functional.mse_loss(pred, eps)
        if not torch.isfinite(loss):
            raise TrainStepError(f"non-finite loss at step {self.step_count}; step aborted")

        self.optimizer.zero_grad(set_to_none=True)
        if loss.requires_grad:
            loss.backward()
            self.optimizer.step()
        # else: conditioning was dropped for the whole batch, so the loss only
        # touches frozen weights and there is nothing for the adapter to learn
        # from this step; record it and move on.
        self.step_count += 1
        value = float(loss.detach())
        self.loss_history.append(value)
        return value

    def smoothed_loss(self, step: int, window: int = 10) -> float:
        """Mean loss over the window ending at 1-based step `step`."""
        lo = max(0, step - window)
        chunk = self.loss_history[lo:step]
        if not chunk:
            raise TrainStepError(f"no recorded losses up to step {step}")
        return float(np.mean(chunk))


def run_training(model: LotsModel, samples: list[TrainSample], cfg: TrainConfig) -> AdapterTrainer:
    """Fixed-step training over an in-memory dataset with seeded batch order."""
    trainer = AdapterTrainer(model, cfg)
    order = list(range(len(samples)))
    rng = random.Random(cfg.seed)
    for _ in range(cfg.steps):
        rng.shuffle(order)
        batch = [samples[i] for i in order[: cfg.batch_size]]
        trainer.train_step(batch)
    return trainer
