"""Per-pair pooling of sketch+text tokens into k learnable tokens.

Each (sketch, text) pair is processed independently: the shared learnable
tokens z are prepended to the concatenation [z; sketch tokens; text tokens],
two self-attention blocks run over the whole sequence, and the output rows at
the z positions become the pair's pooled representation.  Pairs never attend
to each other; merging is deferred to the denoiser's added cross-attention.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .config import PairFormerConfig
from .pair_codec import TokenSequence

NEG_INF = float("-inf")


class PairFormerError(ValueError):
    pass


@dataclass
class PooledPair:
    p: torch.Tensor  # k×d
    pair_index: int = 0


@dataclass
class ConditionTensor:
    """Stack of pooled pairs, row i produced from pair i alone."""

    p: torch.Tensor  # N×k×d

    @property
    def num_pairs(self) -> int:
        return self.p.shape[0]

    @property
    def num_tokens(self) -> int:
        return self.p.shape[1]

    def flat(self) -> torch.Tensor:
        """(N*k)×d view consumed by the paired cross-attention."""
        n, k, d = self.p.shape
        return self.p.reshape(n * k, d)


class MultiHeadSelfAttention(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads:
            raise PairFormerError(f"dim {dim} not divisible by heads {heads}")
        self.heads = heads
        self.head_dim = dim // heads
        self.scale = self.head_dim**-0.5
        self.to_q = nn.Linear(dim, dim)
        self.to_k = nn.Linear(dim, dim)
        self.to_v = nn.Linear(dim, dim)
        self.to_out = nn.Linear(dim, dim)

    def forward(self, x: torch.Tensor, key_padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        # x: L×d (single sequence; pairs are processed one at a time)
        L, d = x.shape
        q = self.to_q(x).reshape(L, self.heads, self.head_dim).transpose(0, 1)
        k = self.to_k(x).reshape(L, self.heads, self.head_dim).transpose(0, 1)
        v = self.to_v(x).reshape(L, self.heads, self.head_dim).transpose(0, 1)
        scores = torch.matmul(q, k.transpose(-1, -2)) * self.scale  # heads×L×L
        if key_padding_mask is not None:
            # True marks padded keys; they get zero attention weight
            scores = scores.masked_fill(key_padding_mask.view(1, 1, L), NEG_INF)
        attn = scores.softmax(dim=-1)
        out = torch.matmul(attn, v).transpose(0, 1).reshape(L, d)
        return self.to_out(out)


class SelfAttentionBlock(nn.Module):
    """Pre-norm transformer block: attention plus optional feed-forward."""

    def __init__(self, dim: int, heads: int, ff_mult: int = 4, feed_forward: bool = True):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = MultiHeadSelfAttention(dim, heads)
        self.feed_forward = feed_forward
        if feed_forward:
            self.norm2 = nn.LayerNorm(dim)
            self.ff = nn.Sequential(
                nn.Linear(dim, dim * ff_mult),
                nn.GELU(),
                nn.Linear(dim * ff_mult, dim),
            )

    def forward(self, x: torch.Tensor, key_padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        x = x + self.attn(self.norm1(x), key_padding_mask)
        if self.feed_forward:
            x = x + self.ff(self.norm2(x))
        return x


class PairFormer(nn.Module):
    """Self-attention pooling with k shared learnable tokens.

    The same z parameter (one gradient accumulator) is reused for every pair.
    Segment embeddings marking the z / sketch / text spans are off by default.
    """

    def __init__(self, cfg: PairFormerConfig | None = None, **overrides):
        super().__init__()
        cfg = cfg or PairFormerConfig()
        for name, value in overrides.items():
            setattr(cfg, name, value)
        if cfg.num_tokens < 1:
            raise PairFormerError("num_tokens must be >= 1")
        self.cfg = cfg
        self.dim = cfg.dim
        self.num_tokens = cfg.num_tokens
        self.z = nn.Parameter(torch.randn(cfg.num_tokens, cfg.dim) * 0.02)
        self.blocks = nn.ModuleList(
            SelfAttentionBlock(cfg.dim, cfg.heads, cfg.ff_mult, cfg.feed_forward) for _ in range(cfg.blocks)
        )
        if cfg.segment_embeddings:
            self.segments = nn.Parameter(torch.zeros(3, cfg.dim))
        else:
            self.segments = None

    def forward(self, hs: torch.Tensor, ht: torch.Tensor) -> torch.Tensor:
        if hs.ndim != 2 or ht.ndim != 2:
            raise PairFormerError("pair inputs must be L×d matrices")
        if (hs.shape[0] and hs.shape[1] != self.dim) or (ht.shape[0] and ht.shape[1] != self.dim):
            raise PairFormerError(
                f"pair inputs must have dim {self.dim}, got {hs.shape[1] if hs.shape[0] else self.dim}"
                f" and {ht.shape[1] if ht.shape[0] else self.dim}"
            )
        z = self.z
        hs = hs.reshape(-1, self.dim).to(z.dtype)
        ht = ht.reshape(-1, self.dim).to(z.dtype)
        if self.segments is not None:
            z = z + self.segments[0]
            hs = hs + self.segments[1]
            ht = ht + self.segments[2]
        x = torch.cat([z, hs, ht], dim=0)
        for block in self.blocks:
            x = block(x)
        return x[: self.num_tokens]


def _tokens(seq) -> torch.Tensor:
    return seq.tokens if isinstance(seq, TokenSequence) else seq


def pool_pair(hs, ht, former: PairFormer, pair_index: int = 0) -> PooledPair:
    """Pool one projected (sketch, text) token pair into k tokens."""
    return PooledPair(p=former(_tokens(hs), _tokens(ht)), pair_index=pair_index)


def build_condition_tensor(pairs, former: PairFormer) -> ConditionTensor:
    """Stack per-pair poolings; no cross-pair attention or normalization."""
    if not pairs:
        return ConditionTensor(p=torch.zeros(0, former.num_tokens, former.dim))
    rows = [pool_pair(hs, ht, former, i).p for i, (hs, ht) in enumerate(pairs)]
    return ConditionTensor(p=torch.stack(rows, dim=0))


def no_pooling_tensor(pairs) -> torch.Tensor:
    """Ablation: plain concatenation [h1_S; h1_T; ...; hN_S; hN_T]."""
    chunks = []
    for hs, ht in pairs:
        chunks.extend([_tokens(hs), _tokens(ht)])
    if not chunks:
        return torch.zeros(0, 0)
    return torch.cat(chunks, dim=0)


def mean_pooling_tensor(pairs) -> torch.Tensor:
    """Ablation: elementwise mean over pairs of the per-pair concatenations.

    Pairs with unequal (L_S, L_T) lengths are zero-padded to the per-modality
    maxima before averaging; any padding is reported through the return's
    companion flag.
    """
    tensor, _ = mean_pooling_tensor_report(pairs)
    return tensor


def mean_pooling_tensor_report(pairs) -> tuple[torch.Tensor, bool]:
    if not pairs:
        raise PairFormerError("mean pooling undefined for zero pairs")
    hs_list = [_tokens(hs) for hs, _ in pairs]
    ht_list = [_tokens(ht) for _, ht in pairs]
    max_s = max(t.shape[0] for t in hs_list)
    max_t = max(t.shape[0] for t in ht_list)
    padded = any(t.shape[0] != max_s for t in hs_list) or any(t.shape[0] != max_t for t in ht_list)

    def pad(t: torch.Tensor, length: int) -> torch.Tensor:
        if t.shape[0] == length:
            return t
        extra = torch.zeros(length - t.shape[0], t.shape[1], dtype=t.dtype)
        return torch.cat([t, extra], dim=0)

    stacks = [torch.cat([pad(hs, max_s), pad(ht, max_t)], dim=0) for hs, ht in zip(hs_list, ht_list)]
    return torch.stack(stacks, dim=0).mean(dim=0), padded
