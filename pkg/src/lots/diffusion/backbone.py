"""Small U-shaped latent denoiser with frozen base weights.

Three resolution levels with residual blocks and a timestep embedding; each
level carries one cross-attention site whose global-text branch w is part of
the frozen base and whose added pair branch w-hat is trainable.  Constructed
with ``adapter=False`` the same network is the no-adapter baseline: parameter
names of the base coincide, so a baseline can load an adapter checkpoint's
base weights verbatim.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from ..config import BackboneConfig
from .attention import PairedCrossAttention


def timestep_embedding(t: torch.Tensor, dim: int) -> torch.Tensor:
    """Standard sinusoidal embedding of integer timesteps (B -> B×dim)."""
    half = dim // 2
    freqs = torch.exp(-math.log(10000.0) * torch.arange(half, dtype=torch.float32) / max(half - 1, 1))
    args = t.float().unsqueeze(1) * freqs.unsqueeze(0)
    emb = torch.cat([torch.cos(args), torch.sin(args)], dim=1)
    if dim % 2:
        emb = torch.cat([emb, torch.zeros(emb.shape[0], 1)], dim=1)
    return emb


class ResBlock(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, time_dim: int, groups: int):
        super().__init__()
        g_in = math.gcd(groups, in_ch)
        g_out = math.gcd(groups, out_ch)
        self.norm1 = nn.GroupNorm(g_in, in_ch)
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.time_proj = nn.Linear(time_dim, out_ch)
        self.norm2 = nn.GroupNorm(g_out, out_ch)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)
        self.skip = nn.Conv2d(in_ch, out_ch, 1) if in_ch != out_ch else nn.Identity()

    def forward(self, x: torch.Tensor, temb: torch.Tensor) -> torch.Tensor:
        h = self.conv1(nn.functional.silu(self.norm1(x)))
        h = h + self.time_proj(nn.functional.silu(temb)).unsqueeze(-1).unsqueeze(-1)
        h = self.conv2(nn.functional.silu(self.norm2(h)))
        return h + self.skip(x)


class CrossAttnSite(nn.Module):
    """Norm -> paired cross-attention -> residual add, on flattened spatial tokens."""

    def __init__(self, channels: int, context_dim: int, pair_dim: int | None, heads: int, groups: int):
        super().__init__()
        self.norm = nn.GroupNorm(math.gcd(groups, channels), channels)
        self.attn = PairedCrossAttention(channels, context_dim, pair_dim, heads=heads)

    def forward(self, x, text_tokens, pair_tokens, alpha, text_mask=None, pair_mask=None):
        b, c, h, w = x.shape
        tokens = self.norm(x).reshape(b, c, h * w).transpose(1, 2)
        out = self.attn(tokens, text_tokens, pair_tokens, alpha, text_mask, pair_mask)
        return x + out.transpose(1, 2).reshape(b, c, h, w)


class DenoiserBackbone(nn.Module):
    """Noise-prediction UNet; base weights are frozen after construction."""

    def __init__(self, cfg: BackboneConfig | None = None, adapter: bool = True, pair_dim: int | None = None):
        super().__init__()
        cfg = cfg or BackboneConfig()
        self.cfg = cfg
        self.with_adapter = adapter
        pair_dim = pair_dim if adapter else None
        chans = cfg.channels
        heads = 4

        self.time_mlp = nn.Sequential(
            nn.Linear(cfg.time_dim, cfg.time_dim),
            nn.SiLU(),
            nn.Linear(cfg.time_dim, cfg.time_dim),
        )
        self.conv_in = nn.Conv2d(cfg.latent_channels, chans[0], 3, padding=1)

        self.down_blocks = nn.ModuleList()
        self.down_attn = nn.ModuleList()
        self.downsamplers = nn.ModuleList()
        prev = chans[0]
        for i, ch in enumerate(chans):
            self.down_blocks.append(ResBlock(prev, ch, cfg.time_dim, cfg.groups))
            self.down_attn.append(CrossAttnSite(ch, cfg.context_dim, pair_dim, heads, cfg.groups))
            self.downsamplers.append(
                nn.Conv2d(ch, ch, 3, stride=2, padding=1) if i < len(chans) - 1 else nn.Identity()
            )
            prev = ch

        self.mid_block1 = ResBlock(chans[-1], chans[-1], cfg.time_dim, cfg.groups)
        self.mid_block2 = ResBlock(chans[-1], chans[-1], cfg.time_dim, cfg.groups)

        self.up_blocks = nn.ModuleList()
        self.upsamplers = nn.ModuleList()
        prev = chans[-1]
        for i in reversed(range(len(chans))):
            self.up_blocks.append(ResBlock(prev + chans[i], chans[i], cfg.time_dim, cfg.groups))
            self.upsamplers.append(nn.Upsample(scale_factor=2, mode="nearest") if i > 0 else nn.Identity())
            prev = chans[i]

        self.norm_out = nn.GroupNorm(math.gcd(cfg.groups, chans[0]), chans[0])
        # The base stands in for a pretrained denoiser, so its output conv must
        # stay nonzero: with frozen base weights a zero output map would block
        # every gradient path to the trainable pair branch.
        self.conv_out = nn.Conv2d(chans[0], cfg.latent_channels, 3, padding=1)

    def pair_attention_layers(self) -> list[PairedCrossAttention]:
        return [site.attn for site in self.down_attn]

    def base_parameters(self):
        """Every parameter except the added w-hat projections."""
        for name, p in self.named_parameters():
            if "_pair" not in name:
                yield name, p

    def adapter_parameters(self):
        for name, p in self.named_parameters():
            if "_pair" in name:
                yield name, p

    def forward(
        self,
        latent: torch.Tensor,
        t: torch.Tensor,
        text_tokens: torch.Tensor,
        pair_tokens: torch.Tensor | None = None,
        alpha: float = 1.0,
        text_mask: torch.Tensor | None = None,
        pair_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        temb = self.time_mlp(timestep_embedding(t, self.cfg.time_dim))
        h = self.conv_in(latent)
        skips = []
        for block, attn, down in zip(self.down_blocks, self.down_attn, self.downsamplers):
            h = block(h, temb)
            h = attn(h, text_tokens, pair_tokens, alpha, text_mask, pair_mask)
            skips.append(h)
            h = down(h)
        h = self.mid_block1(h, temb)
        h = self.mid_block2(h, temb)
        for block, up in zip(self.up_blocks, self.upsamplers):
            h = torch.cat([h, skips.pop()], dim=1)
            h = block(h, temb)
            h = up(h)
        return self.conv_out(nn.functional.silu(self.norm_out(h)))
