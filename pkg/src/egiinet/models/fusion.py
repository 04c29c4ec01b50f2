from typing import Tuple

import torch
from torch import nn

from egiinet.models.transformer import MultiHeadAttention


class CrossAttentionFusion(nn.Module):
    """Point cloud tokens attend once over image tokens; the result is added back to the point cloud tokens.

    There is no feed-forward sublayer. With the value and output projections zeroed the
    layer returns its point cloud input unchanged.
    """

    def __init__(self, dim: int, heads: int, dropout: float = 0.0):
        super().__init__()
        self.dim = dim
        self.norm_pc = nn.LayerNorm(dim)
        self.norm_img = nn.LayerNorm(dim)
        self.cross_attn = MultiHeadAttention(dim, heads, dropout)

    def forward(self, f_pc: torch.Tensor, f_img: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """:return: Fused tokens shaped like ``f_pc`` and attention weights (B, heads, N'_pc, N'_img)."""
        if f_pc.dim() != 3 or f_img.dim() != 3 or f_pc.shape[-1] != self.dim or f_img.shape[-1] != self.dim:
            raise ValueError(
                f"{type(self).__name__} invalid token shapes ({tuple(f_pc.shape)}, {tuple(f_img.shape)}). "
                f"Expected (B, N, {self.dim})"
            )
        if f_pc.shape[0] != f_img.shape[0]:
            raise ValueError(f"{type(self).__name__} batch mismatch ({f_pc.shape[0]} vs {f_img.shape[0]})")
        attended, attn = self.cross_attn(self.norm_pc(f_pc), context=self.norm_img(f_img))
        return f_pc + attended, attn
