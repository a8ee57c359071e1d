"""Cross-attention with an added, trainable pair-conditioning branch.

The frozen global-text branch w attends from denoiser features to the global
prompt tokens.  The added branch w-hat shares w's query projection, owns new
key/value/output projections over the stacked pair tokens, and is combined as

    out = w(x, text) + alpha * w_hat(x, pairs)

with the output projection of w-hat zero-initialized so a freshly built
adapter is exactly the base model.  With alpha = 0 or no pairs the w-hat
branch is skipped entirely, which keeps the alpha=0 path bit-identical to an
adapter-less baseline.
"""

from __future__ import annotations

import torch
from torch import nn

NEG_INF = float("-inf")


class AttentionError(ValueError):
    pass


def _attend(q, k, v, heads: int, key_mask: torch.Tensor | None = None) -> torch.Tensor:
    """Multi-head softmax attention over already-projected q/k/v (B×L×C)."""
    b, lq, c = q.shape
    lk = k.shape[1]
    hd = c // heads
    q = q.reshape(b, lq, heads, hd).transpose(1, 2)
    k = k.reshape(b, lk, heads, hd).transpose(1, 2)
    v = v.reshape(b, lk, heads, hd).transpose(1, 2)
    scores = torch.matmul(q, k.transpose(-1, -2)) * hd**-0.5
    if key_mask is not None:
        # key_mask: B×Lk, True marks padded keys
        scores = scores.masked_fill(key_mask.view(b, 1, 1, lk), NEG_INF)
    attn = scores.softmax(dim=-1)
    out = torch.matmul(attn, v)
    return out.transpose(1, 2).reshape(b, lq, c)


class PairedCrossAttention(nn.Module):
    """w plus optional w-hat over pair tokens, sharing the query projection."""

    def __init__(self, query_dim: int, context_dim: int, pair_dim: int | None, heads: int = 4):
        super().__init__()
        if query_dim % heads:
            raise AttentionError(f"query_dim {query_dim} not divisible by heads {heads}")
        self.heads = heads
        self.to_q = nn.Linear(query_dim, query_dim, bias=False)
        self.to_k = nn.Linear(context_dim, query_dim, bias=False)
        self.to_v = nn.Linear(context_dim, query_dim, bias=False)
        self.to_out = nn.Linear(query_dim, query_dim)
        self.has_adapter = pair_dim is not None
        if self.has_adapter:
            self.to_k_pair = nn.Linear(pair_dim, query_dim, bias=False)
            self.to_v_pair = nn.Linear(pair_dim, query_dim, bias=False)
            self.to_out_pair = nn.Linear(query_dim, query_dim)
            nn.init.zeros_(self.to_out_pair.weight)
            nn.init.zeros_(self.to_out_pair.bias)

    def forward(
        self,
        x: torch.Tensor,
        text_tokens: torch.Tensor,
        pair_tokens: torch.Tensor | None = None,
        alpha: float = 1.0,
        text_mask: torch.Tensor | None = None,
        pair_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        if not (0.0 <= alpha <= 1.0):
            raise AttentionError(f"alpha must lie in [0, 1], got {alpha}")
        q = self.to_q(x)
        out = _attend(q, self.to_k(text_tokens), self.to_v(text_tokens), self.heads, text_mask)
        out = self.to_out(out)
        if pair_tokens is None or pair_tokens.shape[1] == 0 or alpha == 0.0 or not self.has_adapter:
            # the pair branch is defined as the zero tensor here
            return out
        pair_out = _attend(q, self.to_k_pair(pair_tokens), self.to_v_pair(pair_tokens), self.heads, pair_mask)
        return out + alpha * self.to_out_pair(pair_out)
