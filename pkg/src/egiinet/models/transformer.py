"""Pre-normalized ViT-style transformer blocks.

One :class:`SharedTransformer` instance serves as the shared feature extractor and another as the shared
feature transfer network; the same module object is applied to both modalities, so sharing is by identity.
"""

from typing import List, Optional, Tuple

import torch
from torch import nn


class MultiHeadAttention(nn.Module):
    """Scaled dot-product attention that keeps its attention weights.

    Queries come from ``x``; keys and values come from ``context`` (``x`` itself for
    self-attention).
    """

    def __init__(self, dim: int, heads: int, dropout: float = 0.0):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"{type(self).__name__} invalid heads ({heads}). Must divide dim ({dim})")
        self.heads = heads
        self.head_dim = dim // heads
        self.scale = self.head_dim**-0.5

        self.to_q = nn.Linear(dim, dim)
        self.to_k = nn.Linear(dim, dim)
        self.to_v = nn.Linear(dim, dim)
        self.to_out = nn.Linear(dim, dim)
        self.dropout = nn.Dropout(dropout)

    def _split(self, t: torch.Tensor) -> torch.Tensor:
        B, N, _ = t.shape
        return t.reshape(B, N, self.heads, self.head_dim).transpose(1, 2)

    def forward(self, x: torch.Tensor, context: Optional[torch.Tensor] = None) -> Tuple[torch.Tensor, torch.Tensor]:
        """:return: Output of shape (B, N_q, C) and attention weights of shape (B, heads, N_q, N_kv)."""
        context = x if context is None else context
        q = self._split(self.to_q(x))
        k = self._split(self.to_k(context))
        v = self._split(self.to_v(context))

        attn = torch.softmax(torch.matmul(q, k.transpose(-1, -2)) * self.scale, dim=-1)
        out = torch.matmul(self.dropout(attn), v)
        B, _, N, _ = out.shape
        out = out.transpose(1, 2).reshape(B, N, self.heads * self.head_dim)
        return self.to_out(out), attn


class FeedForward(nn.Module):
    def __init__(self, dim: int, expansion: int = 4, dropout: float = 0.0):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(dim, dim * expansion),
            nn.GELU(),
            nn.Dropout(dropout),
            nn.Linear(dim * expansion, dim),
            nn.Dropout(dropout),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class TransformerBlock(nn.Module):
    """Pre-norm block: ``x + MSA(LN(x))`` followed by ``x + FFN(LN(x))``."""

    def __init__(self, dim: int, heads: int, dropout: float = 0.0):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = MultiHeadAttention(dim, heads, dropout)
        self.norm2 = nn.LayerNorm(dim)
        self.ffn = FeedForward(dim, dropout=dropout)

    def forward(self, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        attended, attn = self.attn(self.norm1(x))
        x = x + attended
        x = x + self.ffn(self.norm2(x))
        return x, attn


class SharedTransformer(nn.Module):
    """A stack of ``depth`` transformer blocks mapping (B, N', C') tokens to the same shape.

    A zero-depth stack is the identity.
    """

    def __init__(self, dim: int, depth: int, heads: int, dropout: float = 0.0):
        super().__init__()
        if depth < 0:
            raise ValueError(f"{type(self).__name__} invalid depth ({depth}). Must be >= 0")
        self.dim = dim
        self.blocks = nn.ModuleList([TransformerBlock(dim, heads, dropout) for _ in range(depth)])

    def _check(self, x: torch.Tensor) -> None:
        if x.dim() != 3 or x.shape[-1] != self.dim:
            raise ValueError(f"{type(self).__name__} invalid token shape ({tuple(x.shape)}). Expected (B, N, {self.dim})")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        self._check(x)
        for block in self.blocks:
            x, _ = block(x)
        return x

    def attention_maps(self, x: torch.Tensor) -> List[torch.Tensor]:
        """Run the stack and collect each block's (B, heads, N', N') row-stochastic attention weights."""
        self._check(x)
        maps = list()
        for block in self.blocks:
            x, attn = block(x)
            maps.append(attn)
        return maps
