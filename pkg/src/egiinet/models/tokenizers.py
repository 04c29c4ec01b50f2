"""Tokenizers that turn a view image and a partial point cloud into token sequences of equal length.

The point cloud path mirrors :func:`egiinet.utils.geometry.fps` and
:func:`egiinet.utils.geometry.ball_query` in batched torch form; index selection is
identical, so the numpy kernels act as oracles for it.
"""

from typing import List, Sequence, Tuple

import torch
from torch import nn


def lexsort_points(points: torch.Tensor) -> torch.Tensor:
    """Sort every cloud of a (B, N, 3) batch lexicographically by (x, y, z).

    :return: Index tensor of shape (B, N) such that ``gather(points, idx)`` is sorted.
    """
    B, N, _ = points.shape
    order = torch.arange(N, device=points.device).expand(B, N)
    # Stable passes from least to most significant key.
    for axis in (2, 1, 0):
        keys = torch.gather(points[..., axis], 1, order)
        perm = torch.sort(keys, dim=1, stable=True).indices
        order = torch.gather(order, 1, perm)
    return order


def gather_points(values: torch.Tensor, idx: torch.Tensor) -> torch.Tensor:
    """Gather rows of (B, N, D) ``values`` with a (B, ...) integer index tensor."""
    B = values.shape[0]
    batch = torch.arange(B, device=values.device).view(B, *([1] * (idx.dim() - 1)))
    return values[batch, idx]


@torch.no_grad()
def farthest_point_sample(points: torch.Tensor, k: int) -> torch.Tensor:
    """Batched greedy farthest point sampling starting at index 0 of every cloud.

    Ties go to the lowest index and selected points are never picked again.

    :param points: (B, N, 3) coordinates.
    :param k: Number of centers, in [1, N].

    :return: (B, k) int64 indices in selection order.
    """
    B, N, _ = points.shape
    if k < 1 or k > N:
        raise ValueError(f"farthest_point_sample invalid k ({k}). Must be in [1, {N}].")
    batch = torch.arange(B, device=points.device)
    selected = torch.zeros(B, k, dtype=torch.long, device=points.device)
    min_sq = torch.full((B, N), float("inf"), dtype=points.dtype, device=points.device)
    current = torch.zeros(B, dtype=torch.long, device=points.device)
    for i in range(k):
        selected[:, i] = current
        diff = points - points[batch, current].unsqueeze(1)
        min_sq = torch.minimum(min_sq, (diff * diff).sum(-1))
        min_sq[batch.unsqueeze(1), selected[:, : i + 1]] = float("-inf")
        current = torch.argmax(min_sq, dim=1)
    return selected


@torch.no_grad()
def query_ball(points: torch.Tensor, centers: torch.Tensor, radius: float, max_k: int) -> torch.Tensor:
    """Batched ball query: the center first, then in-radius members in index order, padded with the center.

    :param points: (B, N, 3) coordinates.
    :param centers: (B, S) indices into ``points``.

    :return: (B, S, max_k) int64 member indices.
    """
    B, N, _ = points.shape
    center_xyz = gather_points(points, centers)
    sq = ((center_xyz.unsqueeze(2) - points.unsqueeze(1)) ** 2).sum(-1)

    index = torch.arange(N, device=points.device).expand(B, centers.shape[1], N)
    keys = torch.where(sq <= radius * radius, index, torch.full_like(index, N))
    keys = keys.scatter(2, centers.unsqueeze(-1), -1)
    members = torch.sort(keys, dim=2).values[..., :max_k]
    if members.shape[-1] < max_k:
        pad = torch.full((B, centers.shape[1], max_k - members.shape[-1]), N, device=points.device)
        members = torch.cat([members, pad], dim=-1)

    center_fill = centers.unsqueeze(-1).expand_as(members)
    members = torch.where((members == -1) | (members == N), center_fill, members)
    return members


class PositionalEmbedding(nn.Module):
    """Pointwise two-layer map from center coordinates to token-width embeddings."""

    def __init__(self, dim: int, hidden: int = 64):
        super().__init__()
        self.net = nn.Sequential(nn.Linear(3, hidden), nn.GELU(), nn.Linear(hidden, dim))

    def forward(self, centers: torch.Tensor) -> torch.Tensor:
        return self.net(centers)


class ImageTokenizer(nn.Module):
    """Non-overlapping patch embedding: one token per ``patch_size`` square patch.

    Images are (B, C, H, W) in [0, 1]; single-channel images are replicated to three channels.
    Tokens are ordered row-major over the patch grid.
    """

    def __init__(self, dim: int, patch_size: int, image_size: Tuple[int, int], channels: int = 3):
        super().__init__()
        height, width = image_size
        if patch_size < 1 or height % patch_size != 0 or width % patch_size != 0:
            raise ValueError(
                f"{type(self).__name__} invalid patch_size ({patch_size}). "
                f"Must divide the image size ({height}, {width})"
            )
        self.patch_size = patch_size
        self.image_size = (height, width)
        self.channels = channels
        self.grid = (height // patch_size, width // patch_size)
        self.proj = nn.Conv2d(channels, dim, kernel_size=patch_size, stride=patch_size)

    @property
    def num_tokens(self) -> int:
        return self.grid[0] * self.grid[1]

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() != 4:
            raise ValueError(f"{type(self).__name__} invalid image shape ({tuple(images.shape)}). Expected (B, C, H, W)")
        if images.shape[1] == 1 and self.channels == 3:
            images = images.expand(-1, 3, -1, -1)
        if tuple(images.shape[1:]) != (self.channels, *self.image_size):
            raise ValueError(
                f"{type(self).__name__} invalid image shape ({tuple(images.shape)}). "
                f"Expected (B, {self.channels}, {self.image_size[0]}, {self.image_size[1]})"
            )
        return self.proj(images).flatten(2).transpose(1, 2)


class SetAbstraction(nn.Module):
    """One FPS -> ball query -> pointwise MLP -> max-pool stage.

    Clouds smaller than ``num_centers`` keep every point as a center.
    """

    def __init__(self, num_centers: int, radius: float, max_k: int, in_features: int, out_features: int):
        super().__init__()
        self.num_centers = num_centers
        self.radius = radius
        self.max_k = max_k
        self.mlp = nn.Sequential(
            nn.Linear(3 + in_features, out_features),
            nn.GELU(),
            nn.Linear(out_features, out_features),
        )

    def forward(self, xyz: torch.Tensor, features: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """:return: Center coordinates (B, S, 3), pooled features (B, S, D) and member indices (B, S, K)."""
        centers = farthest_point_sample(xyz.detach(), min(self.num_centers, xyz.shape[1]))
        groups = query_ball(xyz.detach(), centers, self.radius, self.max_k)

        center_xyz = gather_points(xyz, centers)
        relative = gather_points(xyz, groups) - center_xyz.unsqueeze(2)
        grouped = relative
        if features.shape[-1] > 0:
            grouped = torch.cat([relative, gather_points(features, groups)], dim=-1)
        pooled = self.mlp(grouped).max(dim=2).values
        return center_xyz, pooled, groups


class PointTokenizer(nn.Module):
    """Cascaded set-abstraction stages ending in ``num_tokens`` cluster tokens.

    Input clouds are sorted lexicographically before the first stage so that farthest
    point sampling starts from the same geometric point whatever the input order.
    A positional embedding of the final centers is added to the pooled features.
    """

    def __init__(
        self,
        dim: int,
        stages: Sequence[int] = (128, 64),
        radii: Sequence[float] = (0.2, 0.4),
        max_k: int = 16,
    ):
        super().__init__()
        if len(stages) < 1 or len(stages) != len(radii):
            raise ValueError(
                f"{type(self).__name__} invalid stages ({tuple(stages)}) and radii ({tuple(radii)}). "
                "Must be non-empty and of equal length"
            )
        if any(later > earlier for earlier, later in zip(stages, stages[1:])):
            raise ValueError(f"{type(self).__name__} invalid stages ({tuple(stages)}). Must be non-increasing")

        self.stages = tuple(stages)
        layers: List[SetAbstraction] = list()
        in_features = 0
        for i, (num_centers, radius) in enumerate(zip(stages, radii)):
            out_features = dim if i == len(stages) - 1 else dim // 2
            layers.append(SetAbstraction(num_centers, radius, max_k, in_features, out_features))
            in_features = out_features
        self.layers = nn.ModuleList(layers)
        self.pos_embed = PositionalEmbedding(dim)

    @property
    def num_tokens(self) -> int:
        return self.stages[-1]

    def forward(self, points: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """:param points: (B, N, 3) partial clouds with N >= N'.

        :return: Tokens (B, N', C') and their anchor centers (B, N', 3).
        """
        if points.dim() != 3 or points.shape[-1] != 3:
            raise ValueError(f"{type(self).__name__} invalid cloud shape ({tuple(points.shape)}). Expected (B, N, 3)")
        if points.shape[1] < self.num_tokens:
            raise ValueError(
                f"{type(self).__name__} invalid cloud size ({points.shape[1]}). Must be >= {self.num_tokens}"
            )
        xyz = gather_points(points, lexsort_points(points.detach()))
        features = xyz.new_zeros(*xyz.shape[:2], 0)
        for layer in self.layers:
            xyz, features, _ = layer(xyz, features)
        return features + self.pos_embed(xyz), xyz
