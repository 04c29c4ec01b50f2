from typing import Optional

import torch
from torch import nn

from egiinet.models.transformer import SharedTransformer


class CompletionDecoder(nn.Module):
    """Decodes fused tokens into a fixed-size complete cloud.

    A short self-attention stack refines the tokens, then a pointwise head expands each of
    the N' tokens into ``num_points / N'`` offsets, concatenated in token order. Offsets are
    placed around the token's anchor center when anchors are given, and around the origin
    otherwise. A learned per-slot template is added to every offset, like the learned
    query points of seed-based decoders; it starts at zero.
    """

    def __init__(self, dim: int, num_tokens: int, num_points: int, depth: int = 2, heads: int = 4):
        super().__init__()
        if num_points % num_tokens != 0:
            raise ValueError(
                f"{type(self).__name__} invalid num_points ({num_points}). Must be a multiple of num_tokens ({num_tokens})"
            )
        self.num_tokens = num_tokens
        self.num_points = num_points
        self.points_per_token = num_points // num_tokens

        self.refine = SharedTransformer(dim, depth, heads)
        self.norm = nn.LayerNorm(dim)
        self.head = nn.Sequential(
            nn.Linear(dim, dim),
            nn.GELU(),
            nn.Linear(dim, 3 * self.points_per_token),
        )
        self.template = nn.Parameter(torch.zeros(num_tokens, self.points_per_token, 3))

    def forward(self, fused: torch.Tensor, anchors: Optional[torch.Tensor] = None) -> torch.Tensor:
        """:param fused: (B, N', C') tokens.
        :param anchors: (B, N', 3) token centers the offsets are relative to.

        :return: (B, num_points, 3) coordinates.
        """
        if fused.dim() != 3 or fused.shape[1] != self.num_tokens:
            raise ValueError(
                f"{type(self).__name__} invalid token shape ({tuple(fused.shape)}). Expected (B, {self.num_tokens}, C)"
            )
        B = fused.shape[0]
        if anchors is not None and tuple(anchors.shape) != (B, self.num_tokens, 3):
            raise ValueError(
                f"{type(self).__name__} invalid anchor shape ({tuple(anchors.shape)}). Expected ({B}, {self.num_tokens}, 3)"
            )
        tokens = self.norm(self.refine(fused))
        offsets = self.head(tokens).reshape(B, self.num_tokens, self.points_per_token, 3) + self.template
        if anchors is not None:
            offsets = offsets + anchors.unsqueeze(2)
        return offsets.reshape(B, self.num_points, 3)
