"""The view-guided completion network and its ablation variants.

Pipeline: tokenize both modalities -> shared feature extractor -> shared feature transfer
network -> feature transfer losses -> one cross-attention fusion -> completion decoder.

Variants:

* ``full``: one extractor and one transfer network serve both modalities.
* ``no_sharing``: the image path gets its own copies, registered as ``sfe_img`` and ``sftnet_img``.
* ``no_ftloss``: the graph of ``full``; the transfer loss is reported but kept out of ``l_total``.
* ``no_sftnet``: no transfer network; the direct Gram loss on the extracted features replaces the transfer loss.
* ``no_image``: no image tokenizer and no fusion; the view is ignored.
"""

import copy
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import torch
from torch import nn

from egiinet.models.decoder import CompletionDecoder
from egiinet.models.fusion import CrossAttentionFusion
from egiinet.models.interaction import (
    DEFAULT_ALPHA,
    LossBundle,
    chamfer_l1_loss,
    loss_direct_infor,
    loss_infor,
    loss_stc,
    loss_total,
    loss_transfer,
)
from egiinet.models.tokenizers import ImageTokenizer, PointTokenizer
from egiinet.models.transformer import SharedTransformer

LOG = logging.getLogger(__name__)

VARIANTS = ("full", "no_sharing", "no_ftloss", "no_sftnet", "no_image")


@dataclass
class CompletionOutput:
    """Result of one forward pass.

    ``attention`` holds the fusion weights (B, heads, N', N') and is ``None`` for ``no_image``.
    ``bundle`` is ``None`` when no target was given.
    """

    cloud: torch.Tensor
    anchors: torch.Tensor
    attention: Optional[torch.Tensor] = None
    bundle: Optional[LossBundle] = None
    features: Dict[str, torch.Tensor] = field(default_factory=dict)


def count_parameters(model: nn.Module) -> int:
    """Number of distinct learnable scalars; shared modules are counted once."""
    return sum(p.numel() for p in model.parameters() if p.requires_grad)


class EGIInet(nn.Module):
    def __init__(
        self,
        dim: int = 128,
        num_tokens: int = 64,
        image_size: Tuple[int, int] = (64, 64),
        patch_size: int = 8,
        point_stages: Sequence[int] = (128, 64),
        radii: Sequence[float] = (0.2, 0.4),
        max_k: int = 16,
        sfe_depth: int = 4,
        sft_depth: int = 2,
        decoder_depth: int = 2,
        heads: int = 4,
        num_points: int = 1024,
        dropout: float = 0.0,
        alpha: float = DEFAULT_ALPHA,
        variant: str = "full",
    ):
        """:param dim: Token width C'.
        :param num_tokens: Token count N' shared by both modalities.
        :param image_size: (H, W) of the view images.
        :param patch_size: Side of the square image patches.
        :param point_stages: Center counts of the cascaded point stages; the last must equal ``num_tokens``.
        :param radii: Ball query radius of every point stage.
        :param max_k: Ball query cluster width.
        :param sfe_depth: Blocks in the shared feature extractor.
        :param sft_depth: Blocks in the shared feature transfer network.
        :param decoder_depth: Self-attention blocks in the decoder.
        :param heads: Attention heads everywhere.
        :param num_points: Size of the completed cloud.
        :param dropout: Dropout rate of every attention and feed-forward sublayer.
        :param alpha: Weight of the transfer loss in ``l_total``.
        :param variant: One of ``VARIANTS``.
        """
        super().__init__()
        if variant not in VARIANTS:
            raise ValueError(f"{type(self).__name__} invalid variant ({variant}). Must be one of {VARIANTS}")
        if not alpha > 0:
            raise ValueError(f"{type(self).__name__} invalid alpha ({alpha}). Must be > 0")

        self.hparams: Dict[str, Any] = dict(
            dim=dim,
            num_tokens=num_tokens,
            image_size=tuple(image_size),
            patch_size=patch_size,
            point_stages=tuple(point_stages),
            radii=tuple(radii),
            max_k=max_k,
            sfe_depth=sfe_depth,
            sft_depth=sft_depth,
            decoder_depth=decoder_depth,
            heads=heads,
            num_points=num_points,
            dropout=dropout,
            alpha=alpha,
        )
        self.variant = variant
        self.alpha = alpha

        self.point_tokenizer = PointTokenizer(dim, point_stages, radii, max_k)
        if self.point_tokenizer.num_tokens != num_tokens:
            raise ValueError(
                f"{type(self).__name__} token count mismatch: point stages end at "
                f"{self.point_tokenizer.num_tokens}, expected {num_tokens}"
            )
        if variant != "no_image":
            self.image_tokenizer = ImageTokenizer(dim, patch_size, image_size)
            if self.image_tokenizer.num_tokens != num_tokens:
                raise ValueError(
                    f"{type(self).__name__} token count mismatch: image patches give "
                    f"{self.image_tokenizer.num_tokens}, expected {num_tokens}"
                )

        self.sfe = SharedTransformer(dim, sfe_depth, heads, dropout)
        if variant != "no_sftnet":
            self.sftnet = SharedTransformer(dim, sft_depth, heads, dropout)
        if variant == "no_sharing":
            self.sfe_img = SharedTransformer(dim, sfe_depth, heads, dropout)
            self.sftnet_img = SharedTransformer(dim, sft_depth, heads, dropout)
        if variant != "no_image":
            self.fusion = CrossAttentionFusion(dim, heads, dropout)
        self.decoder = CompletionDecoder(dim, num_tokens, num_points, decoder_depth, heads)

    @property
    def uses_image(self) -> bool:
        return self.variant != "no_image"

    @property
    def has_sftnet(self) -> bool:
        return self.variant != "no_sftnet"

    def extractor(self, modality: str) -> SharedTransformer:
        """The feature extractor applied to ``"image"`` or ``"pointcloud"`` tokens."""
        if modality == "image" and self.variant == "no_sharing":
            return self.sfe_img
        return self.sfe

    def transfer(self, modality: str) -> SharedTransformer:
        """The transfer network applied to ``"image"`` or ``"pointcloud"`` tokens."""
        if not self.has_sftnet:
            raise ValueError(f"{type(self).__name__} variant {self.variant} has no transfer network")
        if modality == "image" and self.variant == "no_sharing":
            return self.sftnet_img
        return self.sftnet

    def forward(
        self,
        points: torch.Tensor,
        images: Optional[torch.Tensor] = None,
        target: Optional[torch.Tensor] = None,
    ) -> CompletionOutput:
        """Complete a batch of partial clouds.

        :param points: (B, N, 3) partial clouds.
        :param images: (B, 3, H, W) views in [0, 1]; ignored by ``no_image``.
        :param target: (B, M, 3) complete clouds; when given, the loss bundle is computed.
        """
        f_pc, anchors = self.point_tokenizer(points)
        f_pc_stc = self.extractor("pointcloud")(f_pc)
        f_pc_out = self.transfer("pointcloud")(f_pc_stc) if self.has_sftnet else f_pc_stc
        features = {"f_pc_stc": f_pc_stc, "f_pc_out": f_pc_out}

        attention = None
        fused = f_pc_out
        if self.uses_image:
            if images is None:
                raise ValueError(f"{type(self).__name__} variant {self.variant} requires view images")
            f_img_stc = self.extractor("image")(self.image_tokenizer(images))
            f_img_out = self.transfer("image")(f_img_stc) if self.has_sftnet else f_img_stc
            features.update(f_img_stc=f_img_stc, f_img_out=f_img_out)
            fused, attention = self.fusion(f_pc_out, f_img_out)

        cloud = self.decoder(fused, anchors)
        output = CompletionOutput(cloud=cloud, anchors=anchors, attention=attention, features=features)
        if target is not None:
            output.bundle = self.losses(features, cloud, target)
        return output

    def losses(self, features: Dict[str, torch.Tensor], cloud: torch.Tensor, target: torch.Tensor) -> LossBundle:
        """Assemble the loss bundle of one forward pass according to the variant."""
        f_pc_stc, f_pc_out = features["f_pc_stc"], features["f_pc_out"]
        zero = f_pc_stc.new_zeros(())
        if not self.uses_image:
            l_infor = zero
            l_stc = loss_stc(f_pc_stc, f_pc_out)
        elif not self.has_sftnet:
            l_infor = loss_direct_infor(features["f_img_stc"], f_pc_stc)
            l_stc = zero
        else:
            l_infor = loss_infor(features["f_img_stc"], f_pc_stc, features["f_img_out"], f_pc_out)
            l_stc = loss_stc(f_pc_stc, f_pc_out)

        l_transfer = loss_transfer(l_infor, l_stc)
        l_l1cd = chamfer_l1_loss(cloud, target)
        if self.variant == "no_ftloss":
            l_total = l_l1cd
        else:
            l_total = loss_total(l_transfer, l_l1cd, self.alpha)
        return LossBundle(l_infor, l_stc, l_transfer, l_l1cd, l_total, self.alpha)


def build_model(variant: str = "full", **hparams: Any) -> EGIInet:
    model = EGIInet(variant=variant, **hparams)
    LOG.debug("Built %s model with %d parameters", variant, count_parameters(model))
    return model


def ablate_variant(model: EGIInet, variant: str) -> EGIInet:
    """Derive the ``variant`` graph from ``model``.

    Parameters of components both graphs share are copied over. Going to ``no_sharing``
    duplicates the shared extractor and transfer network into the image path, so the
    derived model initially computes the same completion.

    :raises ValueError: Unknown variant.
    """
    if variant not in VARIANTS:
        raise ValueError(f"ablate_variant invalid variant ({variant}). Must be one of {VARIANTS}")
    derived = EGIInet(variant=variant, **model.hparams)
    state = {k: v for k, v in model.state_dict().items() if k in derived.state_dict()}
    derived.load_state_dict(state, strict=False)
    if variant == "no_sharing" and model.variant != "no_sharing":
        derived.sfe_img.load_state_dict(copy.deepcopy(model.sfe.state_dict()))
        if model.has_sftnet:
            derived.sftnet_img.load_state_dict(copy.deepcopy(model.sftnet.state_dict()))
    return derived.to(next(model.parameters()).device)
